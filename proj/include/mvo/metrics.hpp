#pragma once

#include <cmath>
#include <limits>

#include "mvo/types.hpp"

namespace mvo {

struct MetricsReport {
    std::size_t n = 0;
    double mean = 0.0;        // M_n
    double variance = 0.0;    // V_n
    double sharpe = 0.0;      // Sh_n (reference rate 0)
    bool sharpe_valid = false;
    bool sharpe_infinite = false;  // V_n == 0 sentinel
    double growth = 0.0;      // W_n
    double wealth = 1.0;      // S_n = exp(n * W_n)
    double utility = 0.0;     // M_n - alpha * V_n
};

// Exact one-pass tracking of the per-period portfolio returns r_i = <b_i,x_i>:
// running sums for M_n, V_n, Sh_n, W_n and S_n. Compensated summation keeps
// the 1e-9 guarantees over 1e6-step traces.
class MetricsTracker {
  public:
    void record(const Portfolio& b, const ReturnVector& x) {
        const double r = b.dot(x);
        if (!(r > 0.0))
            throw DataError("non-positive portfolio return (bankruptcy)");
        add(sum_r_, comp_r_, r);
        add(sum_r2_, comp_r2_, r * r);
        add(sum_log_, comp_log_, std::log(r));
        ++n_;
    }

    MetricsReport report(const RiskAversion& alpha) const {
        if (n_ == 0) throw EmptyAccumulatorError("report() with no records");
        MetricsReport rep;
        rep.n = n_;
        const double n = static_cast<double>(n_);
        rep.mean = sum_r_ / n;
        rep.variance = std::max(0.0, sum_r2_ / n - rep.mean * rep.mean);
        if (n_ >= 2) {
            if (rep.variance > 0.0) {
                rep.sharpe = rep.mean / std::sqrt(rep.variance);
                rep.sharpe_valid = true;
            } else {
                rep.sharpe = std::numeric_limits<double>::infinity();
                rep.sharpe_valid = true;
                rep.sharpe_infinite = true;
            }
        }
        rep.growth = sum_log_ / n;
        rep.wealth = std::exp(sum_log_);
        rep.utility = rep.mean - alpha.value() * rep.variance;
        return rep;
    }

    std::size_t count() const { return n_; }

  private:
    static void add(double& sum, double& comp, double term) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    std::size_t n_ = 0;
    double sum_r_ = 0.0, comp_r_ = 0.0;
    double sum_r2_ = 0.0, comp_r2_ = 0.0;
    double sum_log_ = 0.0, comp_log_ = 0.0;
};

}  // namespace mvo
