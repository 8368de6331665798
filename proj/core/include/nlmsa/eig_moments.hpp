#pragma once

#include <vector>

#include "nlmsa/spectrum.hpp"

namespace nlmsa {

// The two nonzero diagonal entries of the pair weighting for s_kkbar:
// sigma_k = sqrt(l_k/l_kbar), sigma_kbar = sqrt(l_kbar/l_k); product is 1.
struct SigmaKKbar {
    int k;
    int kbar;
    double sigma_k;
    double sigma_kbar;

    SigmaKKbar(const Spectrum& s, int k, int kbar);
};

// Symmetric per-pair table, k != kbar, stored once per unordered pair.
class PairTable {
public:
    PairTable() = default;
    explicit PairTable(int m) : m_(m), v_(static_cast<size_t>(m) * (m - 1) / 2, 0.0) {}
    double& at(int k, int kbar);
    double at(int k, int kbar) const;
    int dim() const { return m_; }

private:
    int m_ = 0;
    std::vector<double> v_;
};

// Every ratio-variable moment the moment matrices need, precomputed eagerly
// so the object is immutable and safe to share across threads.
struct MomentSet {
    std::vector<double> mean_sk;     // E[s_k]
    std::vector<double> second_sk;   // E[s_k^2]
    PairTable second_skkbar;         // E[s_kkbar^2]
    double second_r = 0.0;           // E[r^2]
    std::vector<double> second_zk;   // E[z_k^2]
    PairTable cross_fourth;          // E[|u_k|^2 |u_kbar|^2 / Y^2], k != kbar
    std::vector<double> self_weighted;  // E[|u_k|^2 / Y^2]
};

// p_i = l_i^(M-1) / prod_{j != i} (l_i - l_j); sums to 1.
std::vector<double> partial_fraction_weights(const Spectrum& s);

// Distribution functions. CDFs clamp to [0,1] only when the raw value is
// within 1e-7 of the bounds; a larger excursion throws ConditioningError.
double cdf_sk(const Spectrum& s, int k, double x);
double cdf_skkbar(const Spectrum& s, const SigmaKKbar& pair, double x);
double cdf_r(const Spectrum& s, double x);
double pdf_r(const Spectrum& s, double x);
double pdf_ak(const Spectrum& s, int k, double a);
double cond_pdf_zk(const Spectrum& s, int k, double a, double x);

// Moments.
double mean_sk(const Spectrum& s, int k);
double second_moment_sk(const Spectrum& s, int k);
double second_moment_skkbar(const Spectrum& s, const SigmaKKbar& pair);
double second_moment_r(const Spectrum& s);
double cond_second_moment_zk(const Spectrum& s, int k, double a);
double second_moment_zk(const Spectrum& s, int k);

// Assembles the full MomentSet; derived entries are clamped to >= 0 when
// within -1e-9 and a more negative value throws ConditioningError.
MomentSet derived_moments(const Spectrum& s);

}  // namespace nlmsa
