#pragma once

#include <optional>
#include <vector>

#include "nlmsa/covariance.hpp"
#include "nlmsa/moment_matrices.hpp"

namespace nlmsa {

enum class Measure { EMSE, MSD, MSE };
enum class CurveSource { Theory, Simulation };

// Full experiment description. walk_cov absent means a stationary plant.
// spectrum_opt feeds the whitened-spectrum validation (gap tolerance and
// the opt-in cluster spread).
struct FilterScenario {
    std::vector<cplx> w_opt;
    double mu = 0.0;
    double noise_var = 0.0;
    InputCovariance input_cov;
    std::optional<CMatrix> walk_cov;
    Spectrum::Options spectrum_opt{};

    FilterScenario(std::vector<cplx> w, double step, double nv, InputCovariance cov,
                   std::optional<CMatrix> walk = std::nullopt, Spectrum::Options sopt = {});
    int dim() const { return static_cast<int>(w_opt.size()); }
};

struct LearningCurve {
    std::vector<double> values;
    Measure kind = Measure::EMSE;
    CurveSource source = CurveSource::Theory;
    // Rotation applied to w_opt: curve formulas live in the whitened basis.
    std::vector<double> eigenvalues;
    std::vector<cplx> w_opt_whitened;
};

struct StabilityReport {
    double mean_bound = 0.0;    // 2 / lambda_max(A/2), always >= 2
    double meansq_bound = 0.0;  // 1 / lambda_max(A^-1 B)
    double rho_F = 0.0;         // spectral radius at the scenario's mu
};

// Theory curve values[i] = E||w_err_{i-1}||^2 weighted by lambda (EMSE) or by
// ones (MSD); MSE adds noise_var to the EMSE curve. Stationary scenarios only.
LearningCurve learning_curve(const FilterScenario& sc, int iterations, Measure kind);

// Steady-state EMSE/MSD (stationary part). Throws InstabilityError when
// rho(F) >= 1.
double steady_state(const FilterScenario& sc, Measure kind);

// Steady-state EMSE including the random-walk term; requires walk_cov.
double tracking_emse(const FilterScenario& sc);

StabilityReport stability(const FilterScenario& sc);

}  // namespace nlmsa
