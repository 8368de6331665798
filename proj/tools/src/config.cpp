#include "config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlmsa/errors.hpp"

namespace nlmsa::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ValidationError("config field '" + field + "': " + why);
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) bad_field(field, "expected a number");
    return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) bad_field(field, "expected an integer");
    return j.get<std::int64_t>();
}

// A complex entry is either a plain number (real) or a [re, im] pair.
cplx as_complex(const json& j, const std::string& field) {
    if (j.is_number()) return cplx{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    bad_field(field, "expected a number or a [re, im] pair");
}

CMatrix as_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) bad_field(field, "expected a non-empty array of rows");
    const int n = static_cast<int>(j.size());
    CMatrix m(n);
    for (int i = 0; i < n; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            bad_field(field, "rows must all have length " + std::to_string(n));
        for (int c = 0; c < n; ++c)
            m(i, c) = as_complex(row[static_cast<size_t>(c)], field);
    }
    return m;
}

CovarianceSpec parse_cov(const json& j, const std::string& field, bool walk) {
    CovarianceSpec spec;
    if (!j.is_object() || j.size() != 1)
        bad_field(field, "expected an object with exactly one of toeplitz_alpha, "
                         "scaled_identity, diagonal, matrix");
    const auto& [key, val] = *j.items().begin();
    if (key == "toeplitz_alpha" && !walk) {
        spec.kind = CovarianceSpec::Kind::Toeplitz;
        spec.scalar = as_number(val, field + ".toeplitz_alpha");
    } else if (key == "scaled_identity" && walk) {
        spec.kind = CovarianceSpec::Kind::ScaledIdentity;
        spec.scalar = as_number(val, field + ".scaled_identity");
        if (spec.scalar < 0.0) bad_field(field + ".scaled_identity", "must be >= 0");
    } else if (key == "diagonal") {
        spec.kind = CovarianceSpec::Kind::Diagonal;
        if (!val.is_array() || val.empty()) bad_field(field + ".diagonal", "expected an array");
        for (const auto& e : val) spec.diag.push_back(as_number(e, field + ".diagonal"));
    } else if (key == "matrix") {
        spec.kind = CovarianceSpec::Kind::Matrix;
        spec.matrix = as_matrix(val, field + ".matrix");
    } else {
        bad_field(field, "unknown covariance form '" + key + "'");
    }
    return spec;
}

json dump_cov(const CovarianceSpec& spec) {
    json j = json::object();
    switch (spec.kind) {
        case CovarianceSpec::Kind::Toeplitz:
            j["toeplitz_alpha"] = spec.scalar;
            break;
        case CovarianceSpec::Kind::ScaledIdentity:
            j["scaled_identity"] = spec.scalar;
            break;
        case CovarianceSpec::Kind::Diagonal:
            j["diagonal"] = spec.diag;
            break;
        case CovarianceSpec::Kind::Matrix: {
            json rows = json::array();
            for (int i = 0; i < spec.matrix.n; ++i) {
                json row = json::array();
                for (int c = 0; c < spec.matrix.n; ++c)
                    row.push_back({spec.matrix(i, c).real(), spec.matrix(i, c).imag()});
                rows.push_back(std::move(row));
            }
            j["matrix"] = std::move(rows);
            break;
        }
    }
    return j;
}

}  // namespace

CMatrix CovarianceSpec::build(int m) const {
    switch (kind) {
        case Kind::Toeplitz:
            return InputCovariance::toeplitz(m, scalar).matrix();
        case Kind::ScaledIdentity: {
            CMatrix r(m);
            for (int i = 0; i < m; ++i) r(i, i) = scalar;
            return r;
        }
        case Kind::Diagonal: {
            if (static_cast<int>(diag.size()) != m)
                throw ValidationError("covariance diagonal length does not match w_opt length");
            CMatrix r(m);
            for (int i = 0; i < m; ++i) r(i, i) = diag[static_cast<size_t>(i)];
            return r;
        }
        case Kind::Matrix:
            if (matrix.n != m)
                throw ValidationError("covariance matrix dimension does not match w_opt length");
            return matrix;
    }
    throw ValidationError("unreachable covariance kind");
}

FilterScenario ExperimentConfig::scenario(double step) const {
    std::optional<CMatrix> walk;
    if (walk_cov) walk = walk_cov->build(dim());
    return FilterScenario(w_opt, step, noise_variance, InputCovariance(input_cov.build(dim())),
                          std::move(walk), Spectrum::Options{1e-6, spread_mode});
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config root must be a JSON object");

    static const char* known[] = {"mu",         "w_opt",          "noise_variance", "input_cov",
                                  "walk_cov",   "iterations",     "runs",           "master_seed",
                                  "oracle_samples", "output_path", "spread_mode"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ValidationError("config field '" + key + "': unknown field");
    }
    for (const char* req : {"mu", "w_opt", "noise_variance", "input_cov", "iterations"})
        if (!j.contains(req)) bad_field(req, "required field is missing");

    ExperimentConfig cfg;
    if (j["mu"].is_array()) {
        if (j["mu"].empty()) bad_field("mu", "array must be non-empty");
        for (const auto& e : j["mu"]) cfg.mu.push_back(as_number(e, "mu"));
    } else {
        cfg.mu.push_back(as_number(j["mu"], "mu"));
    }
    for (double m : cfg.mu)
        if (!(m > 0.0)) bad_field("mu", "step sizes must be > 0");

    if (!j["w_opt"].is_array() || j["w_opt"].empty())
        bad_field("w_opt", "expected a non-empty array");
    for (const auto& e : j["w_opt"]) cfg.w_opt.push_back(as_complex(e, "w_opt"));

    cfg.noise_variance = as_number(j["noise_variance"], "noise_variance");
    if (cfg.noise_variance < 0.0) bad_field("noise_variance", "must be >= 0");

    cfg.input_cov = parse_cov(j["input_cov"], "input_cov", /*walk=*/false);
    if (j.contains("walk_cov")) cfg.walk_cov = parse_cov(j["walk_cov"], "walk_cov", /*walk=*/true);

    cfg.iterations = static_cast<int>(as_integer(j["iterations"], "iterations"));
    if (cfg.iterations < 0) bad_field("iterations", "must be >= 0");
    if (j.contains("runs")) {
        cfg.runs = static_cast<int>(as_integer(j["runs"], "runs"));
        if (cfg.runs < 1) bad_field("runs", "must be >= 1");
    }
    if (j.contains("master_seed")) {
        if (!j["master_seed"].is_number_unsigned() && !j["master_seed"].is_number_integer())
            bad_field("master_seed", "expected an integer");
        cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    }
    if (j.contains("oracle_samples")) {
        cfg.oracle_samples = as_integer(j["oracle_samples"], "oracle_samples");
        if (cfg.oracle_samples < 1) bad_field("oracle_samples", "must be >= 1");
    }
    if (j.contains("output_path")) {
        if (!j["output_path"].is_string()) bad_field("output_path", "expected a string");
        cfg.output_path = j["output_path"].get<std::string>();
    }
    if (j.contains("spread_mode")) {
        if (!j["spread_mode"].is_boolean()) bad_field("spread_mode", "expected a boolean");
        cfg.spread_mode = j["spread_mode"].get<bool>();
    }

    // Materialize one scenario so cross-field problems (dimension mismatches,
    // non-hermitian matrices, spectrum gaps) surface at parse time.
    (void)cfg.scenario(cfg.mu.front());
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
    json j;
    j["mu"] = cfg.mu;
    json wopt = json::array();
    for (const cplx& w : cfg.w_opt) wopt.push_back({w.real(), w.imag()});
    j["w_opt"] = std::move(wopt);
    j["noise_variance"] = cfg.noise_variance;
    j["input_cov"] = dump_cov(cfg.input_cov);
    if (cfg.walk_cov) j["walk_cov"] = dump_cov(*cfg.walk_cov);
    j["iterations"] = cfg.iterations;
    j["runs"] = cfg.runs;
    j["master_seed"] = cfg.master_seed;
    j["oracle_samples"] = cfg.oracle_samples;
    j["output_path"] = cfg.output_path;
    j["spread_mode"] = cfg.spread_mode;
    return j.dump(2) + "\n";
}

}  // namespace nlmsa::cli
