#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvo/experiment.hpp"

namespace {

void apply_overrides(mvo::ExperimentConfig& cfg, long long seed,
                     long long horizon, long long report_every,
                     const std::string& output) {
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (horizon >= 0) cfg.horizon = static_cast<std::size_t>(horizon);
    if (report_every >= 0)
        cfg.report_every = static_cast<std::size_t>(report_every);
    if (!output.empty()) cfg.output = output;
}

void print_summary(const mvo::RunSummary& s) {
    const auto& m = s.metrics;
    std::printf("strategy        %s\n", s.strategy_name.c_str());
    std::printf("periods         %zu\n", m.n);
    std::printf("mean            %.10g\n", m.mean);
    std::printf("variance        %.10g\n", m.variance);
    if (m.sharpe_valid && !m.sharpe_infinite)
        std::printf("sharpe          %.10g\n", m.sharpe);
    else
        std::printf("sharpe          n/a\n");
    std::printf("growth rate     %.10g\n", m.growth);
    std::printf("final wealth    %.10g\n", m.wealth);
    std::printf("utility         %.10g  (alpha=%.10g)\n", m.utility,
                s.alpha_selected);
    if (s.ground_truth_gap)
        std::printf("oracle gap      %.10g\n", *s.ground_truth_gap);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential mean-variance portfolio engine"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global overrides after the subcommand

    long long seed = -1, horizon = -1, report_every = -1;
    std::string output;
    app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--horizon", horizon, "Override the number of periods");
    app.add_option("--report-every", report_every,
                   "Override the trace interval (0: final record only)");
    app.add_option("--output", output, "Override the trace output path");

    std::string run_config;
    auto* run = app.add_subcommand("run", "Run one strategy on one market");
    run->add_option("config", run_config, "key = value config file")
        ->required()
        ->check(CLI::ExistingFile);

    std::vector<std::string> cmp_configs;
    auto* cmp = app.add_subcommand(
        "compare", "Run several strategies on the identical return path");
    cmp->add_option("configs", cmp_configs, "config files (shared market/seed)")
        ->required()
        ->expected(2, -1)
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = mvo::parse_config_file(run_config);
            apply_overrides(cfg, seed, horizon, report_every, output);
            print_summary(mvo::run_experiment(cfg));
        } else {
            std::vector<mvo::ExperimentConfig> cfgs;
            for (const auto& path : cmp_configs) {
                cfgs.push_back(mvo::parse_config_file(path));
                apply_overrides(cfgs.back(), seed, horizon, report_every,
                                output.empty() ? "" : output + "." +
                                    std::to_string(cfgs.size() - 1));
            }
            const auto results = mvo::compare_strategies(cfgs);
            for (std::size_t i = 0; i < results.size(); ++i) {
                if (i) std::printf("\n");
                print_summary(results[i]);
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
