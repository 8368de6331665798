#include "nlmsa/moment_matrices.hpp"

#include "nlmsa/errors.hpp"

namespace nlmsa {

WhitenedMoments build_whitened(const Spectrum& s) {
    return build_whitened(s, derived_moments(s));
}

WhitenedMoments build_whitened(const Spectrum& s, const MomentSet& moments) {
    const int m = s.size();
    WhitenedMoments out;
    out.a_bar.resize(static_cast<size_t>(m));
    out.c_bar.resize(static_cast<size_t>(m));
    out.b_bar = RMatrix(m);
    for (int k = 0; k < m; ++k) {
        out.a_bar[static_cast<size_t>(k)] = 2.0 * moments.mean_sk[static_cast<size_t>(k)];
        out.c_bar[static_cast<size_t>(k)] = moments.self_weighted[static_cast<size_t>(k)];
        out.b_bar(k, k) = moments.second_sk[static_cast<size_t>(k)];
        for (int kb = k + 1; kb < m; ++kb) {
            const double v = moments.cross_fourth.at(k, kb);
            out.b_bar(k, kb) = v;
            out.b_bar(kb, k) = v;
        }
    }
    return out;
}

ScaledMoments build_scaled(const Spectrum& s, const WhitenedMoments& bars) {
    const int m = s.size();
    if (static_cast<int>(bars.a_bar.size()) != m || bars.b_bar.n != m ||
        static_cast<int>(bars.c_bar.size()) != m)
        throw ValidationError("build_scaled: dimensions do not match the spectrum");
    ScaledMoments out;
    out.a.resize(static_cast<size_t>(m));
    out.c.resize(static_cast<size_t>(m));
    out.b = RMatrix(m);
    for (int i = 0; i < m; ++i) {
        out.a[static_cast<size_t>(i)] = s.lambda(i) * bars.a_bar[static_cast<size_t>(i)];
        out.c[static_cast<size_t>(i)] = s.lambda(i) * bars.c_bar[static_cast<size_t>(i)];
        for (int j = 0; j < m; ++j) out.b(i, j) = s.lambda(i) * bars.b_bar(i, j) * s.lambda(j);
    }
    return out;
}

MomentMatrices build_F(const Spectrum& s, double mu) {
    return build_F(s, derived_moments(s), mu);
}

MomentMatrices build_F(const Spectrum& s, const MomentSet& moments, double mu) {
    if (!(mu >= 0.0)) throw ValidationError("build_F: step size must be >= 0");
    MomentMatrices out;
    out.bars = build_whitened(s, moments);
    out.scaled = build_scaled(s, out.bars);
    out.mu = mu;
    const int m = s.size();
    out.F = RMatrix(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) out.F(i, j) = mu * mu * out.scaled.b(i, j);
        out.F(i, i) += 1.0 - mu * out.scaled.a[static_cast<size_t>(i)];
    }
    out.rho_F = spectral_radius(out.F);
    return out;
}

}  // namespace nlmsa
