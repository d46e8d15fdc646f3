// Timing comparison between the OpenMP lattice-search kernel / seed sweep and
// their serial counterparts. Prints wall-clock times and the speedup.
#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mvo/experiment.hpp"
#include "mvo/markets.hpp"
#include "mvo/solver.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

mvo::Moments make_moments(Eigen::Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    mvo::Vector mu(m);
    mvo::Matrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        mu[i] = 1.0 + 0.05 * g(rng);
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = 0.1 * g(rng);
    }
    mvo::Matrix sigma = a * a.transpose();
    return {mu, sigma};
}

void bench_lattice(double grid_step) {
    const auto m = make_moments(4, 7);
    const mvo::RiskAversion alpha(4.0);

    auto t0 = Clock::now();
    const auto serial = mvo::brute_force_mv_serial(alpha, m, grid_step);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = mvo::brute_force_mv(alpha, m, grid_step);
    const double tp = seconds_since(t0);

    const bool same =
        (serial.portfolio.weights() - parallel.portfolio.weights()).norm() == 0.0;
    std::printf("lattice search  step=%-8g serial %8.3fs  parallel %8.3fs  "
                "speedup %5.2fx  identical=%s\n",
                grid_step, ts, tp, ts / tp, same ? "yes" : "NO");
}

void bench_seed_sweep(int seeds, std::size_t horizon) {
    const auto chain = mvo::make_reversible_chain(6, 3, 11);

    auto run_one = [&](int s) {
        mvo::ExperimentConfig cfg;
        cfg.market = chain;
        cfg.strategy.kind = mvo::StrategyKind::constant;
        cfg.strategy.alpha = 2.0;
        cfg.horizon = horizon;
        cfg.seed = static_cast<std::uint64_t>(s + 1);
        return mvo::run_experiment(cfg).metrics.growth;
    };

    auto t0 = Clock::now();
    double acc_serial = 0.0;
    for (int s = 0; s < seeds; ++s) acc_serial += run_one(s);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    double acc_parallel = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(+ : acc_parallel)
    for (int s = 0; s < seeds; ++s) acc_parallel += run_one(s);
    const double tp = seconds_since(t0);

    std::printf("seed sweep      seeds=%-6d serial %8.3fs  parallel %8.3fs  "
                "speedup %5.2fx  identical=%s\n",
                seeds, ts, tp, ts / tp,
                acc_serial == acc_parallel ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; parallel timings run serially\n");
#endif
    bench_lattice(1.0 / 128.0);
    bench_lattice(1.0 / 256.0);
    bench_seed_sweep(16, 20000);
    return 0;
}
