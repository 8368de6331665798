#include "nlmsa/predictor.hpp"

#include <cmath>
#include <utility>

#include "nlmsa/errors.hpp"

namespace nlmsa {
namespace {

// Whitened-basis working set shared by every predictor operation.
struct Prepared {
    Spectrum spectrum;
    MomentMatrices mm;
    std::vector<cplx> w_whitened;
    std::vector<double> w_power;  // |w_whitened_k|^2
};

Prepared prepare(const FilterScenario& sc) {
    const WhitenedBasis& wb = sc.input_cov.whitened();
    Spectrum spectrum(wb.eigenvalues, sc.spectrum_opt);
    MomentMatrices mm = build_F(spectrum, sc.mu);
    Prepared out{std::move(spectrum), std::move(mm), adjoint_apply(wb.basis, sc.w_opt), {}};
    out.w_power.resize(out.w_whitened.size());
    for (size_t k = 0; k < out.w_whitened.size(); ++k)
        out.w_power[k] = std::norm(out.w_whitened[k]);
    return out;
}

std::vector<double> seed_vector(const Prepared& p, Measure kind) {
    if (kind == Measure::MSD)
        return std::vector<double>(static_cast<size_t>(p.spectrum.size()), 1.0);
    return p.spectrum.eigenvalues();  // EMSE and MSE weight by lambda
}

double noise_term(const Prepared& p, const FilterScenario& sc, const std::vector<double>& g) {
    Accumulator acc;
    for (size_t k = 0; k < g.size(); ++k) acc.add(p.mm.scaled.c[k] * g[k]);
    return sc.mu * sc.mu * sc.noise_var * acc.value();
}

// x = (I - F)^-1 seed, the steady-state weight accumulation.
std::vector<double> steady_weights(const Prepared& p, const std::vector<double>& seed) {
    const int m = p.mm.F.n;
    RMatrix imf(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) imf(i, j) = (i == j ? 1.0 : 0.0) - p.mm.F(i, j);
    return solve(imf, seed);
}

}  // namespace

FilterScenario::FilterScenario(std::vector<cplx> w, double step, double nv, InputCovariance cov,
                               std::optional<CMatrix> walk, Spectrum::Options sopt)
    : w_opt(std::move(w)),
      mu(step),
      noise_var(nv),
      input_cov(std::move(cov)),
      walk_cov(std::move(walk)),
      spectrum_opt(sopt) {
    if (w_opt.empty()) throw ValidationError("FilterScenario: empty weight vector");
    if (dim() != input_cov.dim())
        throw ValidationError("FilterScenario: weight vector and covariance dimensions differ");
    if (!(mu > 0.0)) throw ValidationError("FilterScenario: step size must be > 0");
    if (!(noise_var >= 0.0)) throw ValidationError("FilterScenario: noise variance must be >= 0");
    if (walk_cov) {
        if (walk_cov->n != dim())
            throw ValidationError("FilterScenario: walk covariance dimension differs");
        HermitianEig eig = hermitian_eig(*walk_cov, 1e-12);
        const double scale = std::max(1.0, std::fabs(eig.values.front()));
        for (double v : eig.values)
            if (v < -1e-10 * scale)
                throw ValidationError("FilterScenario: walk covariance is not PSD");
    }
}

LearningCurve learning_curve(const FilterScenario& sc, int iterations, Measure kind) {
    if (iterations < 0) throw ValidationError("learning_curve: iterations must be >= 0");
    if (sc.walk_cov)
        throw ValidationError(
            "learning_curve: transient curves are defined for stationary scenarios only");
    const Prepared p = prepare(sc);
    LearningCurve out;
    out.kind = kind;
    out.source = CurveSource::Theory;
    out.eigenvalues = p.spectrum.eigenvalues();
    out.w_opt_whitened = p.w_whitened;
    out.values.reserve(static_cast<size_t>(iterations));

    std::vector<double> h = seed_vector(p, kind);       // F^i seed
    const std::vector<double> seed = h;
    std::vector<double> g(h.size(), 0.0);               // (I + F + ... + F^{i-1}) seed
    const double offset = kind == Measure::MSE ? sc.noise_var : 0.0;
    for (int i = 0; i < iterations; ++i) {
        Accumulator acc;
        for (size_t k = 0; k < h.size(); ++k) acc.add(p.w_power[k] * h[k]);
        out.values.push_back(acc.value() + noise_term(p, sc, g) + offset);
        h = matvec(p.mm.F, h);
        g = matvec(p.mm.F, g);  // g_{i+1} = seed + F g_i
        for (size_t k = 0; k < g.size(); ++k) g[k] += seed[k];
    }
    return out;
}

double steady_state(const FilterScenario& sc, Measure kind) {
    const Prepared p = prepare(sc);
    if (p.mm.rho_F >= 1.0)
        throw InstabilityError("steady_state: rho(F) >= 1, no steady state at this step size");
    const std::vector<double> x = steady_weights(p, seed_vector(p, kind));
    const double base = noise_term(p, sc, x);
    return kind == Measure::MSE ? base + sc.noise_var : base;
}

double tracking_emse(const FilterScenario& sc) {
    if (!sc.walk_cov) throw ValidationError("tracking_emse: scenario has no walk covariance");
    const Prepared p = prepare(sc);
    if (p.mm.rho_F >= 1.0)
        throw InstabilityError("tracking_emse: rho(F) >= 1, no steady state at this step size");
    const std::vector<double> x = steady_weights(p, p.spectrum.eigenvalues());
    const std::vector<double> fx = matvec(p.mm.F, x);
    const CMatrix rq = conjugate_by_basis(sc.input_cov.whitened().basis, *sc.walk_cov);
    Accumulator walk;
    for (int k = 0; k < rq.n; ++k) walk.add(rq(k, k).real() * fx[static_cast<size_t>(k)]);
    return noise_term(p, sc, x) + walk.value();
}

StabilityReport stability(const FilterScenario& sc) {
    const Prepared p = prepare(sc);
    const int m = p.mm.F.n;
    StabilityReport out;
    out.rho_F = p.mm.rho_F;
    double amax = 0.0;
    for (double v : p.mm.scaled.a) amax = std::max(amax, v);
    out.mean_bound = 4.0 / amax;
    // lambda_max(A^-1 B) through the symmetric similarity B(i,j)/sqrt(a_i a_j).
    RMatrix sym(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            sym(i, j) = p.mm.scaled.b(i, j) /
                        std::sqrt(p.mm.scaled.a[static_cast<size_t>(i)] *
                                  p.mm.scaled.a[static_cast<size_t>(j)]);
    out.meansq_bound = 1.0 / symmetric_eig(sym).values.front();
    return out;
}

}  // namespace nlmsa
