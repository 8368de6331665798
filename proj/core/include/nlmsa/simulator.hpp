#pragma once

#include <vector>

#include "nlmsa/predictor.hpp"
#include "nlmsa/rng.hpp"

namespace nlmsa {

// One NLMS run. apriori_sq[i] = |u_i w_err_{i-1}|^2 (EMSE sample, taken
// before the plant moves at iteration i), msd[i] = ||w_err_i||^2 after the
// update, mse[i] = |e_i|^2.
struct RunResult {
    std::vector<double> apriori_sq;
    std::vector<double> msd;
    std::vector<double> mse;
};

struct AveragedCurve {
    std::vector<double> mean;
    std::vector<double> std_error;
};

// Per-run tail averages over the final 20% of iterations, aggregated across
// runs (mean and standard error over runs).
struct TailStats {
    double mean = 0.0;
    double std_error = 0.0;
};

struct MonteCarloResult {
    AveragedCurve emse;
    AveragedCurve msd;
    AveragedCurve mse;
    TailStats emse_tail;
    TailStats msd_tail;
    TailStats mse_tail;
    int runs = 0;
};

// Convergence diagnostics of an averaged curve's tail window (final 20%):
// OLS slope with its standard error; converged means the slope is not
// significantly positive and all values are finite.
struct TailDiagnostics {
    double slope = 0.0;
    double slope_se = 0.0;
    double window_mean = 0.0;
    bool converged = false;
};

// u ~ CN(0, R_u) as a row vector: u = g S with g iid CN(0,1) entries and
// S the Hermitian square root of R_u.
std::vector<cplx> gen_regressor(const InputCovariance& cov, Rng& rng);

// Runs the normalized update w_i = w_{i-1} + mu u*/||u||^2 e_i from w_{-1}=0
// against d_i = u_i w^o_i + v_i; the plant does a random walk when walk_cov
// is present. No denominator regularization: an exactly zero-norm regressor
// aborts with SimulationError.
RunResult nlms_run(const FilterScenario& sc, int iterations, Rng& rng);

// Averages `runs` independent runs. Bit-identical output for a given
// (policy, runs, iterations) regardless of `threads` or scheduling: run r
// always uses policy.stream(r) and partial results fold in run order.
MonteCarloResult monte_carlo(const FilterScenario& sc, int iterations, int runs,
                             const RngSeedPolicy& policy, int threads = 0);

TailDiagnostics tail_diagnostics(const std::vector<double>& curve);

}  // namespace nlmsa
