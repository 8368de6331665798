#pragma once

#include <vector>

namespace nlmsa {

// Validated eigenvalue spectrum of the input autocorrelation: the sole input
// to all closed-form moment math. Eigenvalue order is preserved as given;
// per-index results follow that order.
//
// Validity: M >= 3 (E[r^2] and E[z_k^2] diverge below that), every entry
// positive and finite, pairwise relative gap |l_i - l_j| / max(l_i, l_j)
// >= gap_tolerance.
//
// Spread mode: instead of rejecting a clustered spectrum, perturb each
// cluster symmetrically so neighbors sit gap_tolerance apart (trace
// preserved) and record the applied shifts.
class Spectrum {
public:
    struct Options {
        double gap_tolerance = 1e-6;
        bool spread = false;
    };

    explicit Spectrum(std::vector<double> eigenvalues);
    Spectrum(std::vector<double> eigenvalues, Options opt);

    // Relaxed factory for test oracles only: allows M = 2, skips nothing else.
    static Spectrum relaxed_for_tests(std::vector<double> eigenvalues);

    int size() const { return static_cast<int>(lambda_.size()); }
    double lambda(int k) const { return lambda_.at(static_cast<size_t>(k)); }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    double gap_tolerance() const { return gap_tol_; }

    // Per-index shift applied by spread mode (all zero when nothing was
    // clustered or spread mode was off).
    const std::vector<double>& spread_shifts() const { return shifts_; }
    bool spread_applied() const;

private:
    Spectrum() = default;
    std::vector<double> lambda_;
    std::vector<double> shifts_;
    double gap_tol_ = 1e-6;
};

}  // namespace nlmsa
