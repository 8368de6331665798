#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nlmsa/simulator.hpp"

namespace nlmsa::cli {

struct TheoryCurves {
    std::vector<double> emse;
    std::vector<double> msd;
    std::vector<double> mse;
};

// Fixed column schema, version 1:
//   iter,emse_theory,msd_theory,mse_theory,
//   emse_sim,emse_sim_se,msd_sim,msd_sim_se,mse_sim,mse_sim_se
// Absent curve groups leave their fields empty. Values print as %.17g so the
// file is bit-exact reproducible; `db` switches values to 10*log10 with
// standard errors mapped through the same transform (se * 10/ln10 / mean).
extern const char* const kCsvHeader;

void write_csv(std::ostream& os, int iterations, const TheoryCurves* theory,
               const MonteCarloResult* sim, bool db);

std::string format_value(double v);             // %.17g
double to_db(double v);                         // 10 log10 v
double se_to_db(double se, double mean);        // delta method

// Inserts "_mu<value>" before the extension when a config carries several
// step sizes: fig1.csv -> fig1_mu0.1.csv.
std::string per_mu_path(const std::string& base, double mu, bool multi);

}  // namespace nlmsa::cli
