#pragma once

// Precision-generic kernels behind the public specfun API. The moment code
// instantiates these at __float128 because its divided-difference sums lose
// ~16 digits on near-degenerate spectra; the public API instantiates double.

#include <quadmath.h>

#include <cmath>
#include <limits>

namespace nlmsa::detail {

template <class R>
struct fp;

template <>
struct fp<double> {
    static double exp(double x) { return std::exp(x); }
    static double log(double x) { return std::log(x); }
    static double log1p(double x) { return std::log1p(x); }
    static double sqrt(double x) { return std::sqrt(x); }
    static double abs(double x) { return std::fabs(x); }
    static constexpr double eps = std::numeric_limits<double>::epsilon();
    static constexpr double euler = 0.57721566490153286060651209008240243;
};

template <>
struct fp<__float128> {
    static __float128 exp(__float128 x) { return expq(x); }
    static __float128 log(__float128 x) { return logq(x); }
    static __float128 log1p(__float128 x) { return log1pq(x); }
    static __float128 sqrt(__float128 x) { return sqrtq(x); }
    static __float128 abs(__float128 x) { return fabsq(x); }
    static constexpr __float128 eps = FLT128_EPSILON;
    static constexpr __float128 euler = 0.5772156649015328606065120900824024310421Q;
};

// e^x * Gamma(0, x) for x >= 1 via the Lentz continued fraction; the scaled
// form stays finite for large x (Gamma itself underflows near x ~ 745).
template <class R>
R gamma0_cf_scaled(R x) {
    const R tiny = fp<R>::eps * fp<R>::eps * fp<R>::eps;
    R b = x + R(1);
    R c = R(1) / tiny;
    R d = R(1) / b;
    R h = d;
    for (int i = 1; i <= 300; ++i) {
        const R an = -R(i) * R(i);
        b += R(2);
        d = an * d + b;
        if (fp<R>::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (fp<R>::abs(c) < tiny) c = tiny;
        d = R(1) / d;
        const R delta = d * c;
        h *= delta;
        if (fp<R>::abs(delta - R(1)) < fp<R>::eps) break;
    }
    return h;
}

// Gamma(0, x) = -euler - ln x + sum_{n>=1} (-1)^{n+1} x^n / (n n!), x < 1.
template <class R>
R gamma0_series(R x) {
    R acc = -fp<R>::euler - fp<R>::log(x);
    R p = R(1);  // x^n / n!
    R sign = R(1);
    for (int n = 1; n <= 200; ++n) {
        p *= x / R(n);
        const R term = sign * p / R(n);
        acc += term;
        sign = -sign;
        if (fp<R>::abs(term) < fp<R>::eps * (fp<R>::abs(acc) + R(1))) break;
    }
    return acc;
}

template <class R>
R gamma0(R x) {
    if (x < R(1)) return gamma0_series(x);
    return fp<R>::exp(-x) * gamma0_cf_scaled(x);
}

// e^x * Gamma(0, x), finite for all x > 0.
template <class R>
R gamma0_scaled(R x) {
    if (x < R(1)) return fp<R>::exp(x) * gamma0_series(x);
    return gamma0_cf_scaled(x);
}

// Gamma(-1, x) = e^-x / x - Gamma(0, x).
template <class R>
R gamma_negone(R x) {
    if (x < R(1)) return fp<R>::exp(-x) / x - gamma0_series(x);
    return fp<R>::exp(-x) * (R(1) / x - gamma0_cf_scaled(x));
}

// e^x * Gamma(-1, x).
template <class R>
R gamma_negone_scaled(R x) {
    if (x < R(1)) return R(1) / x - fp<R>::exp(x) * gamma0_series(x);
    return R(1) / x - gamma0_cf_scaled(x);
}

// 2F1(1, beta; gamma; z) for the four supported (beta, gamma) pairs and
// z < 1. Series for small |z|; elementary closed forms (which cancel badly
// near z = 0) elsewhere. Coefficient of z^n:
//   (1,2): 1/(n+1)      (1,3): 2/((n+1)(n+2))
//   (2,3): 2/(n+2)      (2,4): 6/((n+2)(n+3))
template <class R>
R hyp2f1_unit_alpha(int beta, int gamma, R z) {
    if (z == R(0)) return R(1);
    if (fp<R>::abs(z) < R(0.5)) {
        R acc = R(0);
        R zn = R(1);
        for (int n = 0; n <= 400; ++n) {
            R coeff;
            if (beta == 1 && gamma == 2)
                coeff = R(1) / R(n + 1);
            else if (beta == 1 && gamma == 3)
                coeff = R(2) / (R(n + 1) * R(n + 2));
            else if (beta == 2 && gamma == 3)
                coeff = R(2) / R(n + 2);
            else
                coeff = R(6) / (R(n + 2) * R(n + 3));
            const R term = coeff * zn;
            acc += term;
            if (fp<R>::abs(term) < fp<R>::eps * fp<R>::abs(acc)) break;
            zn *= z;
        }
        return acc;
    }
    const R L = fp<R>::log1p(-z);  // ln(1-z)
    if (beta == 1 && gamma == 2) return -L / z;
    if (beta == 1 && gamma == 3) return (R(2) / z) * (R(1) + (R(1) - z) / z * L);
    if (beta == 2 && gamma == 3) return (-R(2) / z) * (R(1) + L / z);
    return (R(3) / z) * (-R(1) + R(2) / z + R(2) * (R(1) - z) / (z * z) * L);
}

}  // namespace nlmsa::detail
