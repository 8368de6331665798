#include "nlmsa/eig_moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "detail_specfun.hpp"
#include "nlmsa/errors.hpp"
#include "nlmsa/linalg.hpp"

// Kernels run in __float128: the divided-difference structure below loses
// roughly one digit per decade of eigenvalue clustering, and spread-mode
// spectra sit at relative gaps of 1e-6 where double would return garbage.

namespace nlmsa {
namespace {

using f128 = __float128;

void check_index(const Spectrum& s, int k, const char* who) {
    if (k < 0 || k >= s.size()) {
        std::ostringstream msg;
        msg << who << ": index " << k << " out of range for M = " << s.size();
        throw ValidationError(msg.str());
    }
}

std::vector<f128> lambda128(const Spectrum& s) {
    std::vector<f128> l(static_cast<size_t>(s.size()));
    for (int k = 0; k < s.size(); ++k) l[static_cast<size_t>(k)] = f128(s.lambda(k));
    return l;
}

// p_i = prod_{j != i} l_i / (l_i - l_j); equals l_i^(M-1) / prod (l_i - l_j).
std::vector<f128> pf_weights_128(const std::vector<f128>& l) {
    const size_t m = l.size();
    std::vector<f128> p(m);
    for (size_t i = 0; i < m; ++i) {
        f128 acc = f128(1);
        for (size_t j = 0; j < m; ++j)
            if (j != i) acc *= l[i] / (l[i] - l[j]);
        p[i] = acc;
    }
    return p;
}

f128 ipow(f128 base, int e) {
    f128 acc = f128(1);
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

f128 mean_sk_128(const std::vector<f128>& l, const std::vector<f128>& p, size_t k) {
    f128 acc = p[k] / l[k];
    for (size_t i = 0; i < l.size(); ++i) {
        if (i == k) continue;
        acc += p[i] * detail::fp<f128>::log(l[i] / l[k]) / (l[i] - l[k]);
    }
    return acc;
}

f128 second_sk_128(const std::vector<f128>& l, const std::vector<f128>& p, size_t k) {
    f128 acc = p[k] / (l[k] * l[k]);
    for (size_t i = 0; i < l.size(); ++i) {
        if (i == k) continue;
        const f128 d = l[i] - l[k];
        acc += f128(2) * p[i] / (l[k] * d) -
               f128(2) * p[i] * detail::fp<f128>::log(l[i] / l[k]) / (d * d);
    }
    return acc;
}

// integral(0, inf) t * prod_l (1 + l_l t)^(-e_l) dt  for sum(e) >= 3.
// Partial fractions at the poles t = -1/l_m: with h(t) = t * prod_{j != m}
// (1 + l_j t)^(-e_j) and E = e_m, the coefficient of (1 + l_m t)^(-j) is
// b_mj = l_m^(j-E) h^{(E-j)}(t0) / (E-j)!. The j = 1 pieces each diverge but
// their ln T parts cancel (sum b_m1 / l_m = 0), leaving (b_m1/l_m) ln l_m.
f128 pf_integral_128(const std::vector<f128>& l, const std::vector<int>& e) {
    const size_t m = l.size();
    f128 acc = f128(0);
    for (size_t pole = 0; pole < m; ++pole) {
        const int ord = e[pole];
        if (ord < 1 || ord > 3) throw ValidationError("pf_integral: exponent out of range");
        const f128 t0 = f128(-1) / l[pole];
        f128 h = t0;
        f128 logd = f128(1) / t0;        // h'/h at t0
        f128 logd2 = f128(-1) / (t0 * t0);  // (h'/h)' at t0
        for (size_t j = 0; j < m; ++j) {
            if (j == pole) continue;
            const f128 w = f128(1) + l[j] * t0;  // (l_pole - l_j) / l_pole
            h *= ipow(f128(1) / w, e[j]);
            logd -= f128(e[j]) * l[j] / w;
            logd2 += f128(e[j]) * l[j] * l[j] / (w * w);
        }
        f128 derivs[3];
        derivs[0] = h;
        derivs[1] = h * logd;
        derivs[2] = h * (logd * logd + logd2) / f128(2);
        for (int j = 1; j <= ord; ++j) {
            const f128 b = ipow(f128(1) / l[pole], ord - j) * derivs[ord - j];
            if (j == 1)
                acc += b / l[pole] * detail::fp<f128>::log(l[pole]);
            else
                acc += b / (l[pole] * f128(j - 1));
        }
    }
    return acc;
}

// E[s_kkbar^2] expanded over the exponential mixture: with g = sqrt(l_k/l_kb),
// s_kkbar^2 Y^2 = g^2 x_k^2 + 2 x_k x_kb + x_kb^2 / g^2 and E[x^a e^{-cx}] =
// a! / (1+c)^(a+1) turn each piece into a pf_integral with bumped exponents.
f128 second_skkbar_128(const std::vector<f128>& l, size_t k, size_t kb) {
    std::vector<int> e(l.size(), 1);
    const f128 g2 = l[k] / l[kb];
    e[k] = 3;
    const f128 i1 = pf_integral_128(l, e);
    e[k] = 2;
    e[kb] = 2;
    const f128 i2 = pf_integral_128(l, e);
    e[k] = 1;
    e[kb] = 3;
    const f128 i3 = pf_integral_128(l, e);
    return f128(2) * g2 * i1 + f128(2) * i2 + f128(2) / g2 * i3;
}

f128 second_r_128(const std::vector<f128>& l, const std::vector<f128>& p) {
    f128 acc = f128(0);
    for (size_t m = 0; m < l.size(); ++m)
        acc -= p[m] / (l[m] * l[m]) * detail::fp<f128>::log(l[m]);
    return acc;
}

f128 second_zk_128(const std::vector<f128>& l, size_t k) {
    const size_t m = l.size();
    f128 det = f128(1);
    for (size_t i = 0; i < m; ++i) det *= l[i];
    f128 acc = f128(0);
    for (size_t i = 0; i < m; ++i) {
        if (i == k) continue;
        f128 d = det;
        for (size_t j = 0; j < m; ++j)
            if (j != k && j != i) d *= f128(1) / l[j] - f128(1) / l[i];
        const f128 eta = f128(1) - l[i] / l[k];
        const f128 f112 = detail::hyp2f1_unit_alpha<f128>(1, 2, eta);
        const f128 f113 = detail::hyp2f1_unit_alpha<f128>(1, 3, eta);
        const f128 f123 = detail::hyp2f1_unit_alpha<f128>(2, 3, eta);
        const f128 f124 = detail::hyp2f1_unit_alpha<f128>(2, 4, eta);
        acc += detail::fp<f128>::log(l[i]) / d +
               l[i] / (l[k] * d) * (f128(1) + f112 - f113) +
               l[i] * l[i] / (l[k] * l[k] * d) * (f124 / f128(3) - f123);
    }
    return acc;
}

// Shared CDF kernel: F(x) = sum_i (l_i x - s_i)^(M-1) step(l_i x - s_i) /
// prod_{j != i} [(s_j - s_i) - (l_j - l_i) x]. Poles never fall inside the
// support analytically; a numerically vanishing factor is reported instead
// of amplified.
double cdf_kernel(const std::vector<double>& lam, const std::vector<double>& sig, double x) {
    const size_t m = lam.size();
    Accumulator acc;
    for (size_t i = 0; i < m; ++i) {
        const double t = lam[i] * x - sig[i];
        if (t <= 0.0) continue;
        double num = 1.0;
        for (size_t n = 0; n + 1 < m; ++n) num *= t;
        double den = 1.0;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double factor = (sig[j] - sig[i]) - (lam[j] - lam[i]) * x;
            const double scale = std::fabs(sig[j] - sig[i]) + std::fabs(lam[j] - lam[i]) * x;
            if (std::fabs(factor) < 1e-12 * scale) {
                std::ostringstream msg;
                msg << "cdf: removable singularity at x = " << x
                    << " (denominator factor vanished; evaluate nearby instead)";
                throw ConditioningError(msg.str());
            }
            den *= factor;
        }
        acc.add(num / den);
    }
    const double v = acc.value();
    if (v < 0.0) {
        if (v < -1e-7)
            throw ConditioningError("cdf: cancellation exceeded tolerance (value below 0)");
        return 0.0;
    }
    if (v > 1.0) {
        if (v > 1.0 + 1e-7)
            throw ConditioningError("cdf: cancellation exceeded tolerance (value above 1)");
        return 1.0;
    }
    return v;
}

}  // namespace

SigmaKKbar::SigmaKKbar(const Spectrum& s, int k_, int kbar_) : k(k_), kbar(kbar_) {
    check_index(s, k_, "SigmaKKbar");
    check_index(s, kbar_, "SigmaKKbar");
    if (k_ == kbar_) throw ValidationError("SigmaKKbar: indices must differ");
    sigma_k = std::sqrt(s.lambda(k_) / s.lambda(kbar_));
    sigma_kbar = std::sqrt(s.lambda(kbar_) / s.lambda(k_));
}

namespace {
size_t pair_index(int m, int k, int kbar) {
    if (k == kbar || k < 0 || kbar < 0 || k >= m || kbar >= m)
        throw ValidationError("PairTable: invalid index pair");
    const int i = std::min(k, kbar);
    const int j = std::max(k, kbar);
    return static_cast<size_t>(i) * (2 * m - i - 1) / 2 + (j - i - 1);
}
}  // namespace

double& PairTable::at(int k, int kbar) { return v_[pair_index(m_, k, kbar)]; }

double PairTable::at(int k, int kbar) const { return v_[pair_index(m_, k, kbar)]; }

std::vector<double> partial_fraction_weights(const Spectrum& s) {
    const auto p = pf_weights_128(lambda128(s));
    std::vector<double> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = static_cast<double>(p[i]);
    return out;
}

double cdf_sk(const Spectrum& s, int k, double x) {
    check_index(s, k, "cdf_sk");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0 / s.lambda(k)) return 1.0;
    std::vector<double> sig(static_cast<size_t>(s.size()), 0.0);
    sig[static_cast<size_t>(k)] = 1.0;
    return cdf_kernel(s.eigenvalues(), sig, x);
}

double cdf_skkbar(const Spectrum& s, const SigmaKKbar& pair, double x) {
    check_index(s, pair.k, "cdf_skkbar");
    check_index(s, pair.kbar, "cdf_skkbar");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0 / std::sqrt(s.lambda(pair.k) * s.lambda(pair.kbar))) return 1.0;
    std::vector<double> sig(static_cast<size_t>(s.size()), 0.0);
    sig[static_cast<size_t>(pair.k)] = pair.sigma_k;
    sig[static_cast<size_t>(pair.kbar)] = pair.sigma_kbar;
    return cdf_kernel(s.eigenvalues(), sig, x);
}

double cdf_r(const Spectrum& s, double x) {
    if (x <= 0.0) return 0.0;
    const auto p = partial_fraction_weights(s);
    Accumulator acc;
    for (int m = 0; m < s.size(); ++m)
        acc.add(p[static_cast<size_t>(m)] * std::exp(-1.0 / (s.lambda(m) * x)));
    return std::min(1.0, std::max(0.0, acc.value()));
}

double pdf_r(const Spectrum& s, double x) {
    if (!(x > 0.0)) throw ValidationError("pdf_r: x must be > 0");
    const auto p = partial_fraction_weights(s);
    Accumulator acc;
    for (int m = 0; m < s.size(); ++m)
        acc.add(p[static_cast<size_t>(m)] / s.lambda(m) * std::exp(-1.0 / (s.lambda(m) * x)));
    return std::max(0.0, acc.value() / (x * x));
}

double pdf_ak(const Spectrum& s, int k, double a) {
    check_index(s, k, "pdf_ak");
    if (!(a > 0.0)) throw ValidationError("pdf_ak: a must be > 0");
    const int m = s.size();
    double det = 1.0;
    for (int i = 0; i < m; ++i) det *= s.lambda(i);
    Accumulator acc;
    for (int i = 0; i < m; ++i) {
        if (i == k) continue;
        double den = 1.0;
        for (int j = 0; j < m; ++j)
            if (j != k && j != i) den *= 1.0 / s.lambda(j) - 1.0 / s.lambda(i);
        acc.add(std::exp(-a / s.lambda(i)) / den);
    }
    return std::max(0.0, s.lambda(k) / det * acc.value());
}

double cond_pdf_zk(const Spectrum& s, int k, double a, double x) {
    check_index(s, k, "cond_pdf_zk");
    if (!(a > 0.0)) throw ValidationError("cond_pdf_zk: a must be > 0");
    const double lk = s.lambda(k);
    if (a == lk) throw ValidationError("cond_pdf_zk: a must differ from lambda_k");
    const double lo = std::min(1.0 / lk, 1.0 / a);
    const double hi = std::max(1.0 / lk, 1.0 / a);
    if (x <= lo || x >= hi) return 0.0;
    const double w = lk * x - 1.0;
    const double expo = (1.0 - a * x) / w;  // x_k value mapped back; >= 0 in support
    if (expo > 700.0) return 0.0;
    return std::fabs(lk - a) / (w * w) * std::exp(-expo);
}

double mean_sk(const Spectrum& s, int k) {
    check_index(s, k, "mean_sk");
    const auto l = lambda128(s);
    return static_cast<double>(mean_sk_128(l, pf_weights_128(l), static_cast<size_t>(k)));
}

double second_moment_sk(const Spectrum& s, int k) {
    check_index(s, k, "second_moment_sk");
    const auto l = lambda128(s);
    return static_cast<double>(second_sk_128(l, pf_weights_128(l), static_cast<size_t>(k)));
}

double second_moment_skkbar(const Spectrum& s, const SigmaKKbar& pair) {
    check_index(s, pair.k, "second_moment_skkbar");
    check_index(s, pair.kbar, "second_moment_skkbar");
    if (pair.k == pair.kbar) throw ValidationError("second_moment_skkbar: indices must differ");
    return static_cast<double>(second_skkbar_128(lambda128(s), static_cast<size_t>(pair.k),
                                                 static_cast<size_t>(pair.kbar)));
}

double second_moment_r(const Spectrum& s) {
    if (s.size() < 3) throw ValidationError("second_moment_r: requires M >= 3 (moment diverges)");
    const auto l = lambda128(s);
    return static_cast<double>(second_r_128(l, pf_weights_128(l)));
}

double cond_second_moment_zk(const Spectrum& s, int k, double a) {
    check_index(s, k, "cond_second_moment_zk");
    if (!(a > 0.0)) throw ValidationError("cond_second_moment_zk: a must be > 0");
    const double lk = s.lambda(k);
    const double x = a / lk;
    // The exp(a/lk) factors pair with the incomplete gammas; use the scaled
    // forms so nothing overflows for a >> lk.
    const double g0 = detail::gamma0_scaled(x);
    const double gm1 = detail::gamma_negone_scaled(x);
    const double c = lk - a;
    return 1.0 / (lk * lk) + 2.0 * c / (lk * lk * lk) * g0 + c * c / (lk * lk * lk * lk) * gm1;
}

double second_moment_zk(const Spectrum& s, int k) {
    check_index(s, k, "second_moment_zk");
    if (s.size() < 3) throw ValidationError("second_moment_zk: requires M >= 3 (moment diverges)");
    return static_cast<double>(second_zk_128(lambda128(s), static_cast<size_t>(k)));
}

MomentSet derived_moments(const Spectrum& s) {
    const int m = s.size();
    const auto l = lambda128(s);
    const auto p = pf_weights_128(l);

    std::vector<f128> msk(static_cast<size_t>(m)), ssk(static_cast<size_t>(m)),
        szk(static_cast<size_t>(m));
    for (size_t k = 0; k < static_cast<size_t>(m); ++k) {
        msk[k] = mean_sk_128(l, p, k);
        ssk[k] = second_sk_128(l, p, k);
        szk[k] = second_zk_128(l, k);
    }
    const f128 sr = second_r_128(l, p);

    MomentSet out;
    out.mean_sk.resize(static_cast<size_t>(m));
    out.second_sk.resize(static_cast<size_t>(m));
    out.second_zk.resize(static_cast<size_t>(m));
    out.self_weighted.resize(static_cast<size_t>(m));
    out.second_skkbar = PairTable(m);
    out.cross_fourth = PairTable(m);
    out.second_r = static_cast<double>(sr);

    auto finish = [](f128 v, const char* what) {
        const double d = static_cast<double>(v);
        if (!std::isfinite(d)) {
            std::ostringstream msg;
            msg << "derived_moments: " << what << " is not finite";
            throw ConditioningError(msg.str());
        }
        if (d < 0.0) {
            if (d < -1e-9) {
                std::ostringstream msg;
                msg << "derived_moments: " << what << " = " << d
                    << " below -1e-9 (numerical breakdown; spectrum too clustered?)";
                throw ConditioningError(msg.str());
            }
            return 0.0;
        }
        return d;
    };

    for (int k = 0; k < m; ++k) {
        const size_t ku = static_cast<size_t>(k);
        out.mean_sk[ku] = finish(msk[ku], "mean_sk");
        out.second_sk[ku] = finish(ssk[ku], "second_sk");
        out.second_zk[ku] = finish(szk[ku], "second_zk");
        out.self_weighted[ku] =
            finish(szk[ku] / f128(2) - ssk[ku] / f128(2) - sr / f128(2), "self_weighted");
    }
    for (int k = 0; k < m; ++k)
        for (int kb = k + 1; kb < m; ++kb) {
            const size_t ku = static_cast<size_t>(k), bu = static_cast<size_t>(kb);
            const f128 skk = second_skkbar_128(l, ku, bu);
            out.second_skkbar.at(k, kb) = finish(skk, "second_skkbar");
            const f128 cross =
                skk / f128(2) - l[ku] / l[bu] * ssk[ku] / f128(2) - l[bu] / l[ku] * ssk[bu] / f128(2);
            out.cross_fourth.at(k, kb) = finish(cross, "cross_fourth");
        }

    Accumulator unit;
    for (int k = 0; k < m; ++k) unit.add(s.lambda(k) * out.mean_sk[static_cast<size_t>(k)]);
    if (std::fabs(unit.value() - 1.0) > 1e-10)
        throw ConditioningError("derived_moments: sum lambda_k E[s_k] strayed from 1");
    return out;
}

}  // namespace nlmsa
