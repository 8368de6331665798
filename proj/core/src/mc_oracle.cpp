#include "nlmsa/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "nlmsa/errors.hpp"
#include "nlmsa/linalg.hpp"

namespace nlmsa {
namespace {

// Standard errors come from batch means: heavy right tails (r^2, z_k^2 at
// small M) make the naive per-sample variance estimator unstable.
constexpr int kBatches = 100;

int resolve_threads(int threads, int jobs) {
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return t < jobs ? t : jobs;
}

// Flat statistic layout: per-index blocks, then per-pair blocks, then
// scalars. Keeps the batch loop a tight array walk.
struct Layout {
    int m = 0;
    int pairs = 0;
    int mean_sk = 0, second_sk = 0, second_zk = 0, self_weighted = 0;
    int second_skkbar = 0, cross_fourth = 0, second_r = 0, mean_r = 0, total = 0;

    explicit Layout(int dim) : m(dim), pairs(dim * (dim - 1) / 2) {
        int at = 0;
        mean_sk = at, at += m;
        second_sk = at, at += m;
        second_zk = at, at += m;
        self_weighted = at, at += m;
        second_skkbar = at, at += pairs;
        cross_fourth = at, at += pairs;
        second_r = at++, mean_r = at++;
        total = at;
    }
};

struct Batch {
    std::int64_t count = 0;
    std::vector<double> sums;
};

void accumulate_batch(const Spectrum& s, const Layout& lay, std::int64_t count, Rng& rng,
                      Batch& out) {
    const int m = s.size();
    out.count = count;
    out.sums.assign(static_cast<size_t>(lay.total), 0.0);
    std::vector<double> x(static_cast<size_t>(m));
    std::vector<double> g(static_cast<size_t>(lay.pairs));  // sqrt(l_k / l_kb), pair order
    {
        int idx = 0;
        for (int k = 0; k < m; ++k)
            for (int kb = k + 1; kb < m; ++kb)
                g[static_cast<size_t>(idx++)] = std::sqrt(s.lambda(k) / s.lambda(kb));
    }
    for (std::int64_t n = 0; n < count; ++n) {
        double y = 0.0;
        for (int k = 0; k < m; ++k) {
            x[static_cast<size_t>(k)] = std::norm(rng.cnormal());
            y += s.lambda(k) * x[static_cast<size_t>(k)];
        }
        const double inv = 1.0 / y;
        const double inv2 = inv * inv;
        for (int k = 0; k < m; ++k) {
            const double xk = x[static_cast<size_t>(k)];
            const double sk = xk * inv;
            const double zk = (xk + 1.0) * inv;
            out.sums[static_cast<size_t>(lay.mean_sk + k)] += sk;
            out.sums[static_cast<size_t>(lay.second_sk + k)] += sk * sk;
            out.sums[static_cast<size_t>(lay.second_zk + k)] += zk * zk;
            out.sums[static_cast<size_t>(lay.self_weighted + k)] += xk * inv2;
        }
        int idx = 0;
        for (int k = 0; k < m; ++k)
            for (int kb = k + 1; kb < m; ++kb, ++idx) {
                const double gg = g[static_cast<size_t>(idx)];
                const double skk = (gg * x[static_cast<size_t>(k)] + x[static_cast<size_t>(kb)] / gg) * inv;
                out.sums[static_cast<size_t>(lay.second_skkbar + idx)] += skk * skk;
                out.sums[static_cast<size_t>(lay.cross_fourth + idx)] +=
                    x[static_cast<size_t>(k)] * x[static_cast<size_t>(kb)] * inv2;
            }
        out.sums[static_cast<size_t>(lay.second_r)] += inv2;
        out.sums[static_cast<size_t>(lay.mean_r)] += inv;
    }
}

MomentEstimate finish_stat(const std::vector<Batch>& batches, int stat, std::int64_t samples) {
    Accumulator total;
    for (const Batch& b : batches) total.add(b.sums[static_cast<size_t>(stat)]);
    const double value = total.value() / static_cast<double>(samples);
    Accumulator dev;
    for (const Batch& b : batches) {
        const double bm = b.sums[static_cast<size_t>(stat)] / static_cast<double>(b.count);
        dev.add(static_cast<double>(b.count) * (bm - value) * (bm - value));
    }
    const double var = dev.value() / (static_cast<double>(kBatches - 1) * static_cast<double>(samples));
    return MomentEstimate{value, std::sqrt(std::max(0.0, var)), samples};
}

}  // namespace

MomentSetEstimate estimate_moment_set(const Spectrum& s, std::int64_t samples, std::uint64_t seed,
                                      int threads) {
    if (samples < 10000)
        throw ValidationError("estimate_moment_set: at least 1e4 samples required");
    const Layout lay(s.size());
    const RngSeedPolicy policy{seed};

    std::vector<Batch> batches(static_cast<size_t>(kBatches));
    auto do_batch = [&](int b) {
        const std::int64_t base = samples / kBatches;
        const std::int64_t count = base + (b < samples % kBatches ? 1 : 0);
        Rng rng = policy.stream(static_cast<std::uint64_t>(b));
        accumulate_batch(s, lay, count, rng, batches[static_cast<size_t>(b)]);
    };
    const int nthreads = resolve_threads(threads, kBatches);
    if (nthreads <= 1) {
        for (int b = 0; b < kBatches; ++b) do_batch(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < kBatches; b = next.fetch_add(1)) do_batch(b);
            });
        for (auto& t : pool) t.join();
    }

    const int m = s.size();
    MomentSetEstimate out;
    out.mean_sk.resize(static_cast<size_t>(m));
    out.second_sk.resize(static_cast<size_t>(m));
    out.second_zk.resize(static_cast<size_t>(m));
    out.self_weighted.resize(static_cast<size_t>(m));
    out.second_skkbar = PairTableOf<MomentEstimate>(m);
    out.cross_fourth = PairTableOf<MomentEstimate>(m);
    for (int k = 0; k < m; ++k) {
        out.mean_sk[static_cast<size_t>(k)] = finish_stat(batches, lay.mean_sk + k, samples);
        out.second_sk[static_cast<size_t>(k)] = finish_stat(batches, lay.second_sk + k, samples);
        out.second_zk[static_cast<size_t>(k)] = finish_stat(batches, lay.second_zk + k, samples);
        out.self_weighted[static_cast<size_t>(k)] =
            finish_stat(batches, lay.self_weighted + k, samples);
    }
    int idx = 0;
    for (int k = 0; k < m; ++k)
        for (int kb = k + 1; kb < m; ++kb, ++idx) {
            out.second_skkbar.at(k, kb) = finish_stat(batches, lay.second_skkbar + idx, samples);
            out.cross_fourth.at(k, kb) = finish_stat(batches, lay.cross_fourth + idx, samples);
        }
    out.second_r = finish_stat(batches, lay.second_r, samples);
    out.mean_r = finish_stat(batches, lay.mean_r, samples);
    return out;
}

EmpiricalCdf empirical_cdf(RatioVariable var, const Spectrum& s, std::int64_t samples,
                           const std::vector<double>& grid, std::uint64_t seed, double confidence,
                           int k, int kbar) {
    if (samples < 1) throw ValidationError("empirical_cdf: samples must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("empirical_cdf: confidence must be in (0, 1)");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ValidationError("empirical_cdf: grid must be sorted ascending");
    const int m = s.size();
    if (k < 0 || k >= m || (var == RatioVariable::SKKBAR && (kbar < 0 || kbar >= m || kbar == k)))
        throw ValidationError("empirical_cdf: index out of range");

    const RngSeedPolicy policy{seed};
    std::vector<double> values(static_cast<size_t>(samples));
    const double gg =
        var == RatioVariable::SKKBAR ? std::sqrt(s.lambda(k) / s.lambda(kbar)) : 0.0;

    std::int64_t offset = 0;
    for (int b = 0; b < kBatches; ++b) {
        const std::int64_t count = samples / kBatches + (b < samples % kBatches ? 1 : 0);
        Rng rng = policy.stream(static_cast<std::uint64_t>(b));
        std::vector<double> x(static_cast<size_t>(m));
        for (std::int64_t n = 0; n < count; ++n) {
            double y = 0.0;
            for (int j = 0; j < m; ++j) {
                x[static_cast<size_t>(j)] = std::norm(rng.cnormal());
                y += s.lambda(j) * x[static_cast<size_t>(j)];
            }
            double v = 0.0;
            switch (var) {
                case RatioVariable::SK: v = x[static_cast<size_t>(k)] / y; break;
                case RatioVariable::SKKBAR:
                    v = (gg * x[static_cast<size_t>(k)] + x[static_cast<size_t>(kbar)] / gg) / y;
                    break;
                case RatioVariable::R: v = 1.0 / y; break;
            }
            values[static_cast<size_t>(offset + n)] = v;
        }
        offset += count;
    }

    std::sort(values.begin(), values.end());
    EmpiricalCdf out;
    out.probabilities.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const auto it = std::upper_bound(values.begin(), values.end(), grid[i]);
        out.probabilities[i] =
            static_cast<double>(it - values.begin()) / static_cast<double>(samples);
    }
    out.dkw_epsilon = std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
    return out;
}

}  // namespace nlmsa
