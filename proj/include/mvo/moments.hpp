#pragma once

#include <map>
#include <vector>

#include "mvo/types.hpp"

namespace mvo {

// Streaming representation of the empirical distribution of observed returns:
// count, mean, centered second-moment sums (Welford updates), plus the full
// observation history, which the log-growth objective needs.
class MomentAccumulator {
  public:
    explicit MomentAccumulator(Eigen::Index m,
                               double norm_bound = kDefaultNormBound)
        : norm_bound_(norm_bound),
          mean_(Vector::Zero(m)),
          scatter_(Matrix::Zero(m, m)) {
        if (m < 1) throw InvalidInputError("asset count must be >= 1");
    }

    void accumulate(const ReturnVector& x) {
        if (x.size() != mean_.size())
            throw InvalidInputError("return vector dimension mismatch");
        if (x.values().norm() > norm_bound_)
            throw InvalidInputError("return vector exceeds norm bound");
        history_.push_back(x);
        // Group exact repeats (finite-support markets) so that history-wide
        // sample means cost O(#distinct) instead of O(n). First-seen order is
        // chronological, so grouped sums match the naive pass bit for bit
        // whenever all observations are distinct.
        std::vector<double> key(x.values().data(),
                                x.values().data() + x.size());
        const auto [it, inserted] =
            distinct_index_.try_emplace(std::move(key), distinct_.size());
        if (inserted)
            distinct_.emplace_back(x, 1);
        else
            ++distinct_[it->second].second;
        ++n_;
        const Vector delta = x.values() - mean_;
        mean_ += delta / static_cast<double>(n_);
        const Vector delta2 = x.values() - mean_;
        scatter_ += delta * delta2.transpose();
        // Welford's rank-1 update leaves scatter asymmetric at rounding level.
        scatter_ = 0.5 * (scatter_ + scatter_.transpose()).eval();
    }

    // Population moments (scatter / n, not n-1), matching the equal-weight
    // point-mass empirical distribution.
    Moments moments() const {
        if (n_ == 0)
            throw EmptyAccumulatorError("moments() on empty accumulator");
        return Moments{mean_, scatter_ / static_cast<double>(n_)};
    }

    std::size_t count() const { return n_; }
    Eigen::Index dimension() const { return mean_.size(); }
    const std::vector<ReturnVector>& history() const { return history_; }

    // Sample mean of log<b, x_i> over the retained history.
    double mean_log_return(const Portfolio& b) const {
        if (n_ == 0)
            throw EmptyAccumulatorError("mean_log_return() on empty accumulator");
        double sum = 0.0, comp = 0.0;
        for (const auto& [x, count] : distinct_) {
            const double term =
                static_cast<double>(count) * std::log(b.dot(x)) - comp;
            const double t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        return sum / static_cast<double>(n_);
    }

  private:
    double norm_bound_;
    std::size_t n_ = 0;
    Vector mean_;
    Matrix scatter_;
    std::vector<ReturnVector> history_;
    std::vector<std::pair<ReturnVector, std::size_t>> distinct_;
    std::map<std::vector<double>, std::size_t> distinct_index_;
};

// Smallest eigenvalue of a symmetric covariance matrix; used as the
// redundant-asset test.
inline double min_eigenvalue(const Moments& m) {
    const double scale = std::max(1.0, m.sigma.cwiseAbs().maxCoeff());
    if ((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidMomentsError("covariance matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma,
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace mvo
