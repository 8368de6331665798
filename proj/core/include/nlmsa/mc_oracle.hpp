#pragma once

#include <cstdint>
#include <vector>

#include "nlmsa/eig_moments.hpp"
#include "nlmsa/rng.hpp"

namespace nlmsa {

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

template <class T>
class PairTableOf {
public:
    PairTableOf() = default;
    explicit PairTableOf(int m) : m_(m), v_(static_cast<size_t>(m) * (m - 1) / 2) {}
    T& at(int k, int kbar) { return v_[index(k, kbar)]; }
    const T& at(int k, int kbar) const { return v_[index(k, kbar)]; }
    int dim() const { return m_; }

private:
    size_t index(int k, int kbar) const {
        int lo = k < kbar ? k : kbar, hi = k < kbar ? kbar : k;
        return static_cast<size_t>(lo) * (2 * m_ - lo - 1) / 2 + (hi - lo - 1);
    }
    int m_ = 0;
    std::vector<T> v_;
};

// Brute-force estimates of every moment the closed forms produce, straight
// from samples of u ~ CN(0, I). mean_r ships too: it adjudicates the
// identity sum_k l_k E[|u_k|^2/Y^2] = E[r].
struct MomentSetEstimate {
    std::vector<MomentEstimate> mean_sk;
    std::vector<MomentEstimate> second_sk;
    PairTableOf<MomentEstimate> second_skkbar;
    MomentEstimate second_r;
    std::vector<MomentEstimate> second_zk;
    PairTableOf<MomentEstimate> cross_fourth;   // sampled directly, not via Table-style combination
    std::vector<MomentEstimate> self_weighted;  // sampled directly
    MomentEstimate mean_r;
};

// Sample means over `samples` draws with standard errors from 100 batch
// means (batch sizes differ by at most one). Deterministic per seed: batch b
// always consumes stream(seed, b), folded in batch order.
MomentSetEstimate estimate_moment_set(const Spectrum& s, std::int64_t samples,
                                      std::uint64_t seed, int threads = 0);

enum class RatioVariable { SK, SKKBAR, R };

struct EmpiricalCdf {
    std::vector<double> probabilities;  // at the given grid points
    double dkw_epsilon = 0.0;           // DKW band half-width at `confidence`
};

// Empirical CDF of s_k (use k), s_kkbar (k and kbar) or r at sorted grid
// points. Throws ValidationError if the grid is unsorted.
EmpiricalCdf empirical_cdf(RatioVariable var, const Spectrum& s, std::int64_t samples,
                           const std::vector<double>& grid, std::uint64_t seed,
                           double confidence = 0.99, int k = 0, int kbar = 1);

}  // namespace nlmsa
