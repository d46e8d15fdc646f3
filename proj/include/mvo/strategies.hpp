#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "mvo/moments.hpp"
#include "mvo/solver.hpp"

namespace mvo {

enum class ObjectiveKind { sharpe, log_growth };

// Online M-V strategy with a fixed risk aversion: uniform during the h-period
// warm-up, afterwards the M-V optimum under the empirical moments of all
// observations seen so far.
class ConstantAlphaStrategy {
  public:
    ConstantAlphaStrategy(Eigen::Index m, RiskAversion alpha, std::size_t h,
                          SolveOptions opts = {})
        : alpha_(alpha), h_(h), acc_(m), opts_(std::move(opts)) {
        if (h_ < 1) throw ConfigError("warm-up length must be >= 1");
        if (m < 2) throw ConfigError("need at least two assets");
    }

    Portfolio next() {
        if (acc_.count() < h_) return Portfolio::uniform(acc_.dimension());
        SolveOptions o = opts_;
        o.initial = warm_;
        const SolveResult r = solve_mv(alpha_, acc_.moments(), o);
        warm_ = r.portfolio.weights();
        return r.portfolio;
    }

    void observe(const ReturnVector& x) { acc_.accumulate(x); }

    RiskAversion alpha() const { return alpha_; }
    const MomentAccumulator& accumulator() const { return acc_; }

  private:
    RiskAversion alpha_;
    std::size_t h_;
    MomentAccumulator acc_;
    SolveOptions opts_;
    std::optional<Vector> warm_;
};

// Meta-strategy over a grid of risk aversions: each candidate runs the
// constant-alpha rule; candidates are scored on the empirical distribution by
// Sharpe ratio or mean log-return, and the winner closest to the portfolio
// selected two periods earlier is played.
class AdaptiveAlphaStrategy {
  public:
    AdaptiveAlphaStrategy(Eigen::Index m, std::vector<RiskAversion> alphas,
                          ObjectiveKind objective, std::size_t h,
                          SolveOptions opts = {});

    // Must be called exactly once per period, before observe().
    std::pair<Portfolio, RiskAversion> next();
    void observe(const ReturnVector& x) { acc_.accumulate(x); }

    const MomentAccumulator& accumulator() const { return acc_; }

  private:
    double score(const Portfolio& b, const Moments& m) const;

    std::vector<RiskAversion> alphas_;
    ObjectiveKind objective_;
    std::size_t h_;
    MomentAccumulator acc_;
    SolveOptions opts_;
    std::vector<std::optional<Vector>> warm_;
    std::deque<Vector> selected_;  // most recent first: b_{n-1}, b_{n-2}
};

// Oracle rule: the M-V optimum under the true conditional moments of the next
// return given the past.
inline Portfolio bayesian_next(const Moments& oracle_moments,
                               const RiskAversion& alpha,
                               const SolveOptions& opts = {}) {
    return solve_mv(alpha, oracle_moments, opts).portfolio;
}

}  // namespace mvo
