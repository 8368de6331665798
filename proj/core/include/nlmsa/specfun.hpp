#pragma once

namespace nlmsa::specfun {

// Hypergeometric parameter triple (alpha, beta; gamma). Only the four triples
// appearing in the z_k second-moment expression are supported:
// (1,1;2), (1,1;3), (1,2;3), (1,2;4). gamma > beta > 0 holds for all of them.
struct HypParams {
    double alpha;
    double beta;
    double gamma;
};

inline constexpr HypParams hyp_1_1_2{1.0, 1.0, 2.0};
inline constexpr HypParams hyp_1_1_3{1.0, 1.0, 3.0};
inline constexpr HypParams hyp_1_2_3{1.0, 2.0, 3.0};
inline constexpr HypParams hyp_1_2_4{1.0, 2.0, 4.0};

// Gamma(0, x) = int_x^inf t^-1 e^-t dt. Relative error <= 1e-10 on
// x in [1e-8, 700]; underflows to 0 for large x. Throws ValidationError
// for x <= 0.
double upper_incomplete_gamma_zero(double x);

// Gamma(-1, x) via the recurrence Gamma(-1,x) = e^-x/x - Gamma(0,x).
double upper_incomplete_gamma_negone(double x);

// 2F1(alpha, beta; gamma; z) for the supported triples, any z < 1.
// Throws ValidationError for z >= 1 or an unsupported triple.
double gauss_2f1(const HypParams& p, double z);

// B(x, y), x > 0, y > 0, relative error <= 1e-12.
double beta_fn(double x, double y);

}  // namespace nlmsa::specfun
