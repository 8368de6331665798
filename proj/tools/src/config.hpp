#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlmsa/predictor.hpp"

namespace nlmsa::cli {

// Covariance as written in the config file, kept symbolic so --dump-config
// round-trips the shorthand forms instead of expanding them to matrices.
struct CovarianceSpec {
    enum class Kind { Toeplitz, Diagonal, Matrix, ScaledIdentity };
    Kind kind = Kind::Toeplitz;
    double scalar = 0.0;  // toeplitz alpha or identity scale
    std::vector<double> diag;
    CMatrix matrix;

    // Materialize at dimension m (needed by the shorthand forms).
    CMatrix build(int m) const;
};

struct ExperimentConfig {
    std::vector<double> mu;  // one curve set per step size
    std::vector<cplx> w_opt;
    double noise_variance = 0.0;
    CovarianceSpec input_cov;
    std::optional<CovarianceSpec> walk_cov;
    int iterations = 0;
    int runs = 100;
    std::uint64_t master_seed = 1;
    std::int64_t oracle_samples = 1000000;
    std::string output_path;
    bool spread_mode = false;

    int dim() const { return static_cast<int>(w_opt.size()); }
    FilterScenario scenario(double step) const;
};

// Parse / validate. Field problems raise ValidationError naming the field;
// JSON syntax problems include the parser's byte position.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Normalized JSON (sorted keys, mu always an array, complex entries as
// [re, im] pairs). dump(parse(dump(x))) == dump(x).
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace nlmsa::cli
