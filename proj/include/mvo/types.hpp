#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace mvo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Default cap on the Euclidean norm of a gross-return vector.
inline constexpr double kDefaultNormBound = 10.0;

// Covariance matrices with a smaller minimum eigenvalue are treated as
// containing redundant assets.
inline constexpr double kRedundancyTolerance = 1e-8;

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyAccumulatorError : std::logic_error {
    using std::logic_error::logic_error;
};

struct InvalidMomentsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, Vector best, double residual)
        : std::runtime_error(msg),
          best_iterate(std::move(best)),
          kkt_residual(residual) {}
    Vector best_iterate;
    double kkt_residual;
};

struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One period's gross returns (price ratios), entrywise positive and
// norm-bounded.
class ReturnVector {
  public:
    explicit ReturnVector(Vector values, double norm_bound = kDefaultNormBound)
        : values_(std::move(values)) {
        if (values_.size() < 1)
            throw InvalidInputError("return vector must be non-empty");
        if ((values_.array() <= 0.0).any())
            throw InvalidInputError("gross returns must be strictly positive");
        if (values_.norm() > norm_bound)
            throw InvalidInputError("return vector exceeds norm bound " +
                                    std::to_string(norm_bound));
    }

    const Vector& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index j) const { return values_[j]; }

  private:
    Vector values_;
};

// A point on the simplex: non-negative weights summing to one.
class Portfolio {
  public:
    explicit Portfolio(Vector weights) : weights_(std::move(weights)) {
        if (weights_.size() < 1)
            throw InvalidInputError("portfolio must be non-empty");
        if ((weights_.array() < 0.0).any())
            throw InvalidInputError("portfolio weights must be non-negative");
        if (std::abs(weights_.sum() - 1.0) > 1e-12)
            throw InvalidInputError("portfolio weights must sum to 1");
    }

    static Portfolio uniform(Eigen::Index m) {
        return Portfolio(Vector::Constant(m, 1.0 / static_cast<double>(m)));
    }

    const Vector& weights() const { return weights_; }
    Eigen::Index size() const { return weights_.size(); }
    double operator[](Eigen::Index j) const { return weights_[j]; }

    double dot(const ReturnVector& x) const {
        return weights_.dot(x.values());
    }

  private:
    Vector weights_;
};

// Non-negative risk-aversion coefficient of the mean-variance utility.
class RiskAversion {
  public:
    explicit RiskAversion(double alpha) : alpha_(alpha) {
        if (!(alpha >= 0.0))
            throw InvalidInputError("risk aversion must be non-negative");
    }
    double value() const { return alpha_; }

  private:
    double alpha_;
};

// First two moments of a return distribution.
struct Moments {
    Vector mu;
    Matrix sigma;
};

// Mean-variance utility <b,mu> - alpha * <b, sigma b>.
inline double mv_utility(const RiskAversion& alpha, const Vector& b,
                         const Moments& m) {
    return b.dot(m.mu) - alpha.value() * b.dot(m.sigma * b);
}

}  // namespace mvo
