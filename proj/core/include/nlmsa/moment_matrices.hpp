#pragma once

#include <vector>

#include "nlmsa/eig_moments.hpp"
#include "nlmsa/linalg.hpp"
#include "nlmsa/spectrum.hpp"

namespace nlmsa {

// Whitened-basis moment matrices. A_bar and C_bar are diagonal (stored as
// vectors), B_bar is symmetric.
struct WhitenedMoments {
    std::vector<double> a_bar;  // A_bar(k,k) = 2 E[s_k]
    RMatrix b_bar;              // B_bar(k,k) = E[s_k^2]; off-diag cross fourth moment
    std::vector<double> c_bar;  // C_bar(k,k) = E[|u_k|^2 / Y^2]
};

struct ScaledMoments {
    std::vector<double> a;  // A = Lambda A_bar (diagonal)
    RMatrix b;              // B = Lambda B_bar Lambda
    std::vector<double> c;  // C = Lambda C_bar (diagonal)
};

struct MomentMatrices {
    WhitenedMoments bars;
    ScaledMoments scaled;
    RMatrix F;          // F = I - mu A + mu^2 B
    double mu = 0.0;
    double rho_F = 0.0; // spectral radius at this mu
};

WhitenedMoments build_whitened(const Spectrum& s);
WhitenedMoments build_whitened(const Spectrum& s, const MomentSet& moments);
ScaledMoments build_scaled(const Spectrum& s, const WhitenedMoments& bars);

// F for a given step size, plus its spectral radius.
MomentMatrices build_F(const Spectrum& s, double mu);
MomentMatrices build_F(const Spectrum& s, const MomentSet& moments, double mu);

}  // namespace nlmsa
