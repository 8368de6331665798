#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace nlmsa::cli {

const char* const kCsvHeader =
    "iter,emse_theory,msd_theory,mse_theory,"
    "emse_sim,emse_sim_se,msd_sim,msd_sim_se,mse_sim,mse_sim_se";

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_db(double v) { return 10.0 * std::log10(v); }

double se_to_db(double se, double mean) { return 10.0 / std::log(10.0) * se / mean; }

namespace {

void put(std::ostream& os, double value, bool db) {
    os << ',' << format_value(db ? to_db(value) : value);
}

void put_se(std::ostream& os, double se, double mean, bool db) {
    os << ',' << format_value(db ? se_to_db(se, mean) : se);
}

}  // namespace

void write_csv(std::ostream& os, int iterations, const TheoryCurves* theory,
               const MonteCarloResult* sim, bool db) {
    os << kCsvHeader << '\n';
    for (int i = 0; i < iterations; ++i) {
        const auto u = static_cast<size_t>(i);
        os << i;
        if (theory) {
            put(os, theory->emse[u], db);
            put(os, theory->msd[u], db);
            put(os, theory->mse[u], db);
        } else {
            os << ",,,";
        }
        if (sim) {
            put(os, sim->emse.mean[u], db);
            put_se(os, sim->emse.std_error[u], sim->emse.mean[u], db);
            put(os, sim->msd.mean[u], db);
            put_se(os, sim->msd.std_error[u], sim->msd.mean[u], db);
            put(os, sim->mse.mean[u], db);
            put_se(os, sim->mse.std_error[u], sim->mse.mean[u], db);
        } else {
            os << ",,,,,,";
        }
        os << '\n';
    }
}

std::string per_mu_path(const std::string& base, double mu, bool multi) {
    if (!multi) return base;
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_mu%g", mu);
    const size_t dot = base.find_last_of('.');
    const size_t slash = base.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return base + suffix;
    return base.substr(0, dot) + suffix + base.substr(dot);
}

}  // namespace nlmsa::cli
