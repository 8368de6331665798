#include "nlmsa/simulator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "nlmsa/errors.hpp"

namespace nlmsa {
namespace {

// Runs are folded in fixed blocks of 4 so the reduction order (and thus the
// output bits) never depends on the thread count.
constexpr int kBlockRuns = 4;

int resolve_threads(int threads, int jobs) {
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return t < jobs ? t : jobs;
}

int tail_window(int iterations) {
    const int w = iterations / 5;
    return w > 1 ? w : 1;
}

double window_mean(const std::vector<double>& v, int window) {
    Accumulator acc;
    for (size_t i = v.size() - static_cast<size_t>(window); i < v.size(); ++i) acc.add(v[i]);
    return acc.value() / window;
}

struct BlockPartial {
    // Per-iteration sums and squared sums across the block's runs, one pair
    // per curve (emse, msd, mse).
    std::array<std::vector<double>, 3> sum;
    std::array<std::vector<double>, 3> sumsq;
    // Per-run tail means over the final 20%, in run order within the block.
    std::vector<std::array<double, 3>> tails;
};

TailStats tail_over_runs(const std::vector<std::array<double, 3>>& tails, int curve) {
    const int runs = static_cast<int>(tails.size());
    Accumulator acc;
    for (const auto& t : tails) acc.add(t[static_cast<size_t>(curve)]);
    const double mean = acc.value() / runs;
    TailStats out{mean, 0.0};
    if (runs >= 2) {
        Accumulator var;
        for (const auto& t : tails) {
            const double d = t[static_cast<size_t>(curve)] - mean;
            var.add(d * d);
        }
        out.std_error = std::sqrt(std::max(0.0, var.value() / (runs - 1)) / runs);
    }
    return out;
}

}  // namespace

std::vector<cplx> gen_regressor(const InputCovariance& cov, Rng& rng) {
    const int m = cov.dim();
    const CMatrix& s = cov.sqrt_matrix();
    std::vector<cplx> g(static_cast<size_t>(m));
    for (int a = 0; a < m; ++a) g[static_cast<size_t>(a)] = rng.cnormal();
    std::vector<cplx> u(static_cast<size_t>(m), cplx{0.0, 0.0});
    for (int j = 0; j < m; ++j) {
        cplx acc{0.0, 0.0};
        for (int a = 0; a < m; ++a) acc += g[static_cast<size_t>(a)] * s(a, j);
        u[static_cast<size_t>(j)] = acc;
    }
    return u;
}

RunResult nlms_run(const FilterScenario& sc, int iterations, Rng& rng) {
    if (iterations < 1) throw ValidationError("nlms_run: iterations must be >= 1");
    const int m = sc.dim();
    RunResult out;
    out.apriori_sq.resize(static_cast<size_t>(iterations));
    out.msd.resize(static_cast<size_t>(iterations));
    out.mse.resize(static_cast<size_t>(iterations));

    std::vector<cplx> w(static_cast<size_t>(m), cplx{0.0, 0.0});
    std::vector<cplx> w_o = sc.w_opt;
    const double noise_std = std::sqrt(sc.noise_var);

    CMatrix sqrt_q;
    if (sc.walk_cov) {
        HermitianEig eig = hermitian_eig(*sc.walk_cov, 1e-12);
        sqrt_q = CMatrix(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                cplx acc{0.0, 0.0};
                for (int k = 0; k < m; ++k)
                    acc += eig.basis(i, k) *
                           std::sqrt(std::max(0.0, eig.values[static_cast<size_t>(k)])) *
                           std::conj(eig.basis(j, k));
                sqrt_q(i, j) = acc;
            }
    }

    std::vector<cplx> gq(static_cast<size_t>(m));
    for (int i = 0; i < iterations; ++i) {
        const std::vector<cplx> u = gen_regressor(sc.input_cov, rng);

        cplx apriori{0.0, 0.0};  // u_i (w^o_{i-1} - w_{i-1}), before the plant moves
        for (int j = 0; j < m; ++j)
            apriori += u[static_cast<size_t>(j)] * (w_o[static_cast<size_t>(j)] - w[static_cast<size_t>(j)]);
        out.apriori_sq[static_cast<size_t>(i)] = std::norm(apriori);

        if (sc.walk_cov) {
            for (int a = 0; a < m; ++a) gq[static_cast<size_t>(a)] = rng.cnormal();
            for (int a = 0; a < m; ++a) {
                cplx q{0.0, 0.0};
                for (int k = 0; k < m; ++k) q += sqrt_q(a, k) * gq[static_cast<size_t>(k)];
                w_o[static_cast<size_t>(a)] += q;
            }
        }

        const cplx v = noise_std * rng.cnormal();
        cplx d = v;
        cplx predicted{0.0, 0.0};
        double norm2 = 0.0;
        for (int j = 0; j < m; ++j) {
            d += u[static_cast<size_t>(j)] * w_o[static_cast<size_t>(j)];
            predicted += u[static_cast<size_t>(j)] * w[static_cast<size_t>(j)];
            norm2 += std::norm(u[static_cast<size_t>(j)]);
        }
        const cplx e = d - predicted;
        if (norm2 == 0.0)
            throw SimulationError("nlms_run: regressor with exactly zero norm (no regularizer)");
        const cplx gain = sc.mu / norm2 * e;
        for (int j = 0; j < m; ++j) w[static_cast<size_t>(j)] += std::conj(u[static_cast<size_t>(j)]) * gain;

        double dev = 0.0;
        for (int j = 0; j < m; ++j)
            dev += std::norm(w_o[static_cast<size_t>(j)] - w[static_cast<size_t>(j)]);
        out.msd[static_cast<size_t>(i)] = dev;
        out.mse[static_cast<size_t>(i)] = std::norm(e);
    }
    return out;
}

MonteCarloResult monte_carlo(const FilterScenario& sc, int iterations, int runs,
                             const RngSeedPolicy& policy, int threads) {
    if (runs < 1) throw ValidationError("monte_carlo: runs must be >= 1");
    if (iterations < 1) throw ValidationError("monte_carlo: iterations must be >= 1");

    const int nblocks = (runs + kBlockRuns - 1) / kBlockRuns;
    const int window = tail_window(iterations);
    std::vector<BlockPartial> partials(static_cast<size_t>(nblocks));

    auto do_block = [&](int b) {
        BlockPartial& part = partials[static_cast<size_t>(b)];
        for (auto& v : part.sum) v.assign(static_cast<size_t>(iterations), 0.0);
        for (auto& v : part.sumsq) v.assign(static_cast<size_t>(iterations), 0.0);
        const int lo = b * kBlockRuns;
        const int hi = std::min(runs, lo + kBlockRuns);
        for (int r = lo; r < hi; ++r) {
            Rng rng = policy.stream(static_cast<std::uint64_t>(r));
            const RunResult run = nlms_run(sc, iterations, rng);
            const std::vector<double>* curves[3] = {&run.apriori_sq, &run.msd, &run.mse};
            for (int c = 0; c < 3; ++c)
                for (int i = 0; i < iterations; ++i) {
                    const double x = (*curves[c])[static_cast<size_t>(i)];
                    part.sum[static_cast<size_t>(c)][static_cast<size_t>(i)] += x;
                    part.sumsq[static_cast<size_t>(c)][static_cast<size_t>(i)] += x * x;
                }
            part.tails.push_back({window_mean(run.apriori_sq, window),
                                  window_mean(run.msd, window), window_mean(run.mse, window)});
        }
    };

    const int nthreads = resolve_threads(threads, nblocks);
    if (nthreads <= 1) {
        for (int b = 0; b < nblocks; ++b) do_block(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) do_block(b);
            });
        for (auto& t : pool) t.join();
    }

    MonteCarloResult out;
    out.runs = runs;
    AveragedCurve* curves[3] = {&out.emse, &out.msd, &out.mse};
    for (int c = 0; c < 3; ++c) {
        curves[c]->mean.resize(static_cast<size_t>(iterations));
        curves[c]->std_error.resize(static_cast<size_t>(iterations));
        for (int i = 0; i < iterations; ++i) {
            Accumulator s, s2;
            for (int b = 0; b < nblocks; ++b) {
                s.add(partials[static_cast<size_t>(b)].sum[static_cast<size_t>(c)][static_cast<size_t>(i)]);
                s2.add(partials[static_cast<size_t>(b)].sumsq[static_cast<size_t>(c)][static_cast<size_t>(i)]);
            }
            const double mean = s.value() / runs;
            curves[c]->mean[static_cast<size_t>(i)] = mean;
            double se = 0.0;
            if (runs >= 2) {
                const double var = std::max(0.0, (s2.value() - runs * mean * mean) / (runs - 1));
                se = std::sqrt(var / runs);
            }
            curves[c]->std_error[static_cast<size_t>(i)] = se;
        }
    }

    std::vector<std::array<double, 3>> tails;
    tails.reserve(static_cast<size_t>(runs));
    for (const auto& part : partials)
        tails.insert(tails.end(), part.tails.begin(), part.tails.end());
    out.emse_tail = tail_over_runs(tails, 0);
    out.msd_tail = tail_over_runs(tails, 1);
    out.mse_tail = tail_over_runs(tails, 2);
    return out;
}

TailDiagnostics tail_diagnostics(const std::vector<double>& curve) {
    if (curve.size() < 5) throw ValidationError("tail_diagnostics: curve too short");
    const int n = static_cast<int>(curve.size());
    const int w = std::max(3, tail_window(n));
    const size_t start = curve.size() - static_cast<size_t>(w);

    TailDiagnostics out;
    bool finite = true;
    Accumulator my;
    for (int i = 0; i < w; ++i) {
        const double y = curve[start + static_cast<size_t>(i)];
        if (!std::isfinite(y)) finite = false;
        my.add(y);
    }
    if (!finite) return out;  // converged = false, stats meaningless

    const double ybar = my.value() / w;
    const double xbar = (w - 1) / 2.0;
    Accumulator sxy, sxx, sse;
    for (int i = 0; i < w; ++i) {
        const double dx = i - xbar;
        sxy.add(dx * (curve[start + static_cast<size_t>(i)] - ybar));
        sxx.add(dx * dx);
    }
    out.slope = sxy.value() / sxx.value();
    out.window_mean = ybar;
    for (int i = 0; i < w; ++i) {
        const double r = curve[start + static_cast<size_t>(i)] - ybar - out.slope * (i - xbar);
        sse.add(r * r);
    }
    const double sigma2 = w > 2 ? sse.value() / (w - 2) : 0.0;
    out.slope_se = std::sqrt(sigma2 / sxx.value());
    out.converged = std::isfinite(out.slope) && out.slope <= 3.0 * out.slope_se;
    return out;
}

}  // namespace nlmsa
