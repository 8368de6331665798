#include "nlmsa/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nlmsa/errors.hpp"

namespace nlmsa {
namespace {

double relative_gap(double a, double b) { return std::fabs(a - b) / std::max(a, b); }

// Index pair with the smallest relative gap, or {-1, -1} if all gaps pass.
std::pair<int, int> worst_pair(const std::vector<double>& v, double tol) {
    const int m = static_cast<int>(v.size());
    std::pair<int, int> bad{-1, -1};
    double worst = tol;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double g = relative_gap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
            if (g < worst) {
                worst = g;
                bad = {i, j};
            }
        }
    return bad;
}

// One spread pass over values sorted ascending: group runs of neighbors whose
// relative gap is below tol, then rewrite each run as an arithmetic
// progression centered on its mean (trace preserved) with spacing slightly
// above the tolerance. A pass can push a run's endpoint into the next value;
// the caller iterates, and the offender merges into a larger run next pass.
bool spread_pass(std::vector<double>& sorted, double tol) {
    const int m = static_cast<int>(sorted.size());
    bool changed = false;
    int run_begin = 0;
    for (int i = 1; i <= m; ++i) {
        const bool chain = i < m && relative_gap(sorted[static_cast<size_t>(i - 1)],
                                                 sorted[static_cast<size_t>(i)]) < tol;
        if (chain) continue;
        const int count = i - run_begin;
        if (count > 1) {
            double sum = 0.0;
            double vmax = 0.0;
            for (int j = run_begin; j < i; ++j) {
                sum += sorted[static_cast<size_t>(j)];
                vmax = std::max(vmax, sorted[static_cast<size_t>(j)]);
            }
            const double mean = sum / count;
            const double delta = tol * vmax * 1.01;
            for (int j = run_begin; j < i; ++j)
                sorted[static_cast<size_t>(j)] =
                    mean + (j - run_begin - (count - 1) / 2.0) * delta;
            changed = true;
        }
        run_begin = i;
    }
    return changed;
}

}  // namespace

Spectrum::Spectrum(std::vector<double> eigenvalues) : Spectrum(std::move(eigenvalues), Options()) {}

Spectrum::Spectrum(std::vector<double> eigenvalues, Options opt) {
    lambda_ = std::move(eigenvalues);
    gap_tol_ = opt.gap_tolerance;
    const int m = size();
    if (m < 3) throw ValidationError("Spectrum: at least 3 eigenvalues required");
    if (!(gap_tol_ > 0.0)) throw ValidationError("Spectrum: gap tolerance must be > 0");
    for (int k = 0; k < m; ++k) {
        const double l = lambda_[static_cast<size_t>(k)];
        if (!std::isfinite(l) || !(l > 0.0))
            throw ValidationError("Spectrum: eigenvalues must be positive and finite");
    }
    shifts_.assign(static_cast<size_t>(m), 0.0);

    auto bad = worst_pair(lambda_, gap_tol_);
    if (bad.first < 0) return;

    if (!opt.spread) {
        std::ostringstream msg;
        msg << "Spectrum: eigenvalues " << bad.first << " and " << bad.second
            << " are closer than the relative gap tolerance " << gap_tol_
            << " (enable spread mode to perturb clusters)";
        throw ValidationError(msg.str());
    }

    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return lambda_[static_cast<size_t>(a)] < lambda_[static_cast<size_t>(b)]; });
    std::vector<double> sorted(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) sorted[static_cast<size_t>(i)] = lambda_[static_cast<size_t>(order[static_cast<size_t>(i)])];

    for (int pass = 0; pass < m && spread_pass(sorted, gap_tol_); ++pass) {
    }

    for (int i = 0; i < m; ++i) {
        const int src = order[static_cast<size_t>(i)];
        shifts_[static_cast<size_t>(src)] = sorted[static_cast<size_t>(i)] - lambda_[static_cast<size_t>(src)];
        lambda_[static_cast<size_t>(src)] = sorted[static_cast<size_t>(i)];
    }

    bad = worst_pair(lambda_, gap_tol_);
    if (bad.first >= 0)
        throw ValidationError("Spectrum: spread mode failed to separate the cluster");
}

Spectrum Spectrum::relaxed_for_tests(std::vector<double> eigenvalues) {
    if (eigenvalues.size() < 2)
        throw ValidationError("Spectrum: at least 2 eigenvalues required");
    if (eigenvalues.size() == 2) {
        Spectrum s;
        s.lambda_ = std::move(eigenvalues);
        s.shifts_.assign(2, 0.0);
        for (double l : s.lambda_)
            if (!std::isfinite(l) || !(l > 0.0))
                throw ValidationError("Spectrum: eigenvalues must be positive and finite");
        if (worst_pair(s.lambda_, s.gap_tol_).first >= 0)
            throw ValidationError("Spectrum: eigenvalues closer than the gap tolerance");
        return s;
    }
    return Spectrum(std::move(eigenvalues));
}

bool Spectrum::spread_applied() const {
    for (double s : shifts_)
        if (s != 0.0) return true;
    return false;
}

}  // namespace nlmsa
