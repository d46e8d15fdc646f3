#include "mvo/strategies.hpp"

#include <cmath>
#include <limits>

namespace mvo {

AdaptiveAlphaStrategy::AdaptiveAlphaStrategy(Eigen::Index m,
                                             std::vector<RiskAversion> alphas,
                                             ObjectiveKind objective,
                                             std::size_t h, SolveOptions opts)
    : alphas_(std::move(alphas)),
      objective_(objective),
      h_(h),
      acc_(m),
      opts_(std::move(opts)),
      warm_(alphas_.size()) {
    if (alphas_.empty()) throw ConfigError("candidate alpha set is empty");
    for (std::size_t i = 1; i < alphas_.size(); ++i)
        if (alphas_[i].value() <= alphas_[i - 1].value())
            throw ConfigError("candidate alphas must be strictly increasing");
    if (h_ < 1) throw ConfigError("warm-up length must be >= 1");
    const Vector uni = Portfolio::uniform(m).weights();
    selected_ = {uni, uni};
}

double AdaptiveAlphaStrategy::score(const Portfolio& b,
                                    const Moments& m) const {
    if (objective_ == ObjectiveKind::log_growth)
        return acc_.mean_log_return(b);
    const double mean = b.weights().dot(m.mu);
    const double var = b.weights().dot(m.sigma * b.weights());
    if (var <= 0.0) return std::numeric_limits<double>::infinity();
    return mean / std::sqrt(var);
}

std::pair<Portfolio, RiskAversion> AdaptiveAlphaStrategy::next() {
    const Eigen::Index m = acc_.dimension();
    if (acc_.count() < h_) {
        const Portfolio uni = Portfolio::uniform(m);
        selected_.push_front(uni.weights());
        selected_.pop_back();
        return {uni, alphas_.front()};
    }

    const Moments mom = acc_.moments();
    std::vector<Portfolio> candidates;
    std::vector<double> scores;
    candidates.reserve(alphas_.size());
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
        SolveOptions o = opts_;
        o.initial = warm_[i];
        const SolveResult r = solve_mv(alphas_[i], mom, o);
        warm_[i] = r.portfolio.weights();
        candidates.push_back(r.portfolio);
        scores.push_back(score(r.portfolio, mom));
    }

    double best_score = scores[0];
    for (double s : scores) best_score = std::max(best_score, s);
    const double band = std::isinf(best_score)
                            ? 0.0
                            : 1e-12 * std::max(1.0, std::abs(best_score));

    // Among the arg-max set, pick the candidate closest to the portfolio
    // selected two periods earlier; increasing-alpha scan order makes the
    // smallest alpha win exact distance ties.
    const Vector& anchor = selected_.back();
    std::size_t pick = alphas_.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
        if (scores[i] < best_score - band) continue;
        const double d = (candidates[i].weights() - anchor).norm();
        if (d < best_dist) {
            best_dist = d;
            pick = i;
        }
    }

    selected_.push_front(candidates[pick].weights());
    selected_.pop_back();
    return {candidates[pick], alphas_[pick]};
}

}  // namespace mvo
