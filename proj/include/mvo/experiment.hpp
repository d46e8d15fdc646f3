#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvo/markets.hpp"
#include "mvo/metrics.hpp"
#include "mvo/strategies.hpp"

namespace mvo {

enum class StrategyKind { constant, adaptive, bayesian, fixed };

struct StrategySpec {
    StrategyKind kind = StrategyKind::constant;
    double alpha = 1.0;             // constant / bayesian; also reporting alpha
    std::vector<double> alphas;     // adaptive candidate set
    ObjectiveKind objective = ObjectiveKind::sharpe;
    std::optional<Vector> fixed_weights;

    std::string name() const;
};

using MarketSpec = std::variant<IidSpec, MarkovChainSpec, CsvSource>;

struct ExperimentConfig {
    MarketSpec market;
    StrategySpec strategy;
    std::size_t horizon = 1000;
    std::size_t h = 8;  // warm-up
    std::uint64_t seed = 1;
    std::size_t report_every = 0;  // 0: final record only
    std::string output;            // trace path; empty: no trace file

    void validate() const;
};

struct RunSummary {
    std::string strategy_name;
    MetricsReport metrics;
    double alpha_selected = 0.0;          // adaptive: final selection
    std::optional<double> ground_truth_gap;
    std::uint64_t path_hash = 0;          // FNV-1a over realized returns
};

// Advances market and strategy in lockstep for the configured horizon,
// writing trace records (one JSON object per line) when an output path is
// set, and returns the final summary.
RunSummary run_experiment(const ExperimentConfig& cfg);

// Runs each strategy on the identical realized return path (same market spec
// and seed) and returns per-strategy summaries; paired-path fairness is
// verified through the path hashes.
std::vector<RunSummary> compare_strategies(
    const std::vector<ExperimentConfig>& cfgs);

// Canonical text form of a market spec; used for paired-run equality checks.
std::string serialize_market(const MarketSpec& market);

// key = value config file; see README for the schema.
ExperimentConfig parse_config_file(const std::string& path);

// Limiting moments when the market provides exact ground truth
// (i.i.d. analytic / Markov stationary enumeration); nullopt for CSV.
std::optional<Moments> limiting_moments(const MarketSpec& market);

}  // namespace mvo
