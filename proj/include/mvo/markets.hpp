#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mvo/types.hpp"

namespace mvo {

using Rng = std::mt19937_64;

// Discrete i.i.d. law on a finite set of return vectors.
struct DiscreteDist {
    std::vector<ReturnVector> points;
    Vector probs;
};

// exp of a Gaussian, redrawn until all entries fall inside the bounds; the
// truncation mass is kept negligible by construction so the analytic
// lognormal moments remain valid ground truth.
struct TruncatedLognormal {
    Vector mu_log;
    Matrix sigma_log;
};

struct IidSpec {
    std::variant<TruncatedLognormal, DiscreteDist> distribution;
    double lower = 1e-6;                 // entrywise lower bound, > 0
    double upper = kDefaultNormBound;    // entrywise upper bound

    Eigen::Index dimension() const;
    void validate() const;
};

ReturnVector iid_sample(const IidSpec& spec, Rng& rng);

// Exact limiting moments: enumeration for the discrete law, analytic
// lognormal formulas otherwise.
Moments iid_limit_moments(const IidSpec& spec);

// Finite-state reversible chain with per-state return vectors; ground truth
// for the Bayesian conditional laws.
struct MarkovChainSpec {
    std::vector<ReturnVector> state_returns;
    Matrix transition;  // row-stochastic, entrywise positive
    Vector stationary;

    Eigen::Index state_count() const { return transition.rows(); }
    Eigen::Index dimension() const { return state_returns.front().size(); }
    void validate() const;  // positivity, detailed balance, non-redundancy
};

// Draws the next state from the current transition row and emits the return
// vector of the new state.
std::pair<ReturnVector, Eigen::Index> markov_step(const MarkovChainSpec& spec,
                                                  Eigen::Index state, Rng& rng);

// Exact conditional law of the next return given the current state: the
// transition row over the state returns.
Moments conditional_moments(const MarkovChainSpec& spec, Eigen::Index state);

// Moments of the stationary law; the ground-truth limiting empirical moments.
Moments stationary_moments(const MarkovChainSpec& spec);

// Random reversible chain fixture: symmetric strictly positive transition
// matrix (uniform stationary law) and state returns in general position,
// retried until every conditional covariance clears the redundancy tolerance.
MarkovChainSpec make_reversible_chain(Eigen::Index K, Eigen::Index m,
                                      std::uint64_t seed);

enum class CsvKind { prices, returns };

struct CsvSource {
    std::string path;
    CsvKind kind = CsvKind::returns;
    double norm_bound = kDefaultNormBound;
    bool clamp_out_of_bound = false;  // otherwise reject with DataError
};

struct CsvData {
    std::vector<std::string> asset_names;
    std::vector<ReturnVector> returns;
};

// CSV contract: UTF-8, comma-separated, header row of asset names, one row of
// finite positive decimals per period; prices mode needs >= 2 rows and emits
// consecutive ratios.
CsvData load_csv(const CsvSource& src);

}  // namespace mvo
