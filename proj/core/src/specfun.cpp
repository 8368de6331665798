#include "nlmsa/specfun.hpp"

#include <cmath>

#include "detail_specfun.hpp"
#include "nlmsa/errors.hpp"

namespace nlmsa::specfun {

double upper_incomplete_gamma_zero(double x) {
    if (!(x > 0.0)) throw ValidationError("upper_incomplete_gamma_zero: x must be > 0");
    return detail::gamma0(x);
}

double upper_incomplete_gamma_negone(double x) {
    if (!(x > 0.0)) throw ValidationError("upper_incomplete_gamma_negone: x must be > 0");
    return detail::gamma_negone(x);
}

double gauss_2f1(const HypParams& p, double z) {
    if (!(p.gamma > p.beta && p.beta > 0.0))
        throw ValidationError("gauss_2f1: parameters must satisfy gamma > beta > 0");
    const bool supported = p.alpha == 1.0 &&
                           ((p.beta == 1.0 && p.gamma == 2.0) || (p.beta == 1.0 && p.gamma == 3.0) ||
                            (p.beta == 2.0 && p.gamma == 3.0) || (p.beta == 2.0 && p.gamma == 4.0));
    if (!supported) throw ValidationError("gauss_2f1: unsupported parameter triple");
    if (!(z < 1.0)) throw ValidationError("gauss_2f1: argument must satisfy z < 1");
    return detail::hyp2f1_unit_alpha(static_cast<int>(p.beta), static_cast<int>(p.gamma), z);
}

double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("beta_fn: arguments must be > 0");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

}  // namespace nlmsa::specfun
