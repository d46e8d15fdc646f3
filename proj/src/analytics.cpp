#include "mvo/analytics.hpp"

#include <cmath>

namespace mvo {

SeriesResult normal_log_series(double mu_b, double sigma_b, double tol) {
    if (!(mu_b > 0.0)) throw InvalidInputError("mu_b must be positive");
    if (!(sigma_b >= 0.0)) throw InvalidInputError("sigma_b must be >= 0");
    if (!(tol > 0.0)) throw InvalidInputError("tol must be positive");
    const double q = sigma_b / mu_b;
    if (q >= 0.5)
        throw InvalidInputError(
            "sigma_b/mu_b >= 0.5: outside the validated series regime");

    SeriesResult out;
    const double q2 = q * q;
    double sum = 0.0;
    double dfac = 1.0;  // (2i-1)!!
    double qpow = 1.0;  // q^(2i)
    double prev = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    for (;;) {
        ++i;
        dfac *= static_cast<double>(2 * i - 1);
        qpow *= q2;
        const double term = dfac / static_cast<double>(2 * i) * qpow;
        if (term < tol || term > prev) {
            out.truncation_bound = term;
            break;
        }
        sum += term;
        prev = term;
    }
    out.value = std::log(mu_b) - sum;
    out.terms = i - 1;
    return out;
}

GaussHermiteRule gauss_hermite_rule(int n) {
    if (n < 1) throw InvalidInputError("need at least one node");
    // Golub-Welsch: Jacobi matrix of the Hermite recurrence, off-diagonal
    // sqrt(i/2); weights from the first eigenvector components.
    Matrix J = Matrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(static_cast<double>(i) / 2.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    GaussHermiteRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = Vector(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

double gauss_hermite_log_expectation(double mu_b, double sigma_b, int nodes) {
    if (!(mu_b > 0.0)) throw InvalidInputError("mu_b must be positive");
    const GaussHermiteRule rule = gauss_hermite_rule(nodes);
    const double s2 = std::sqrt(2.0);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double arg = mu_b + sigma_b * s2 * rule.nodes[i];
        if (arg <= 0.0) continue;
        sum += rule.weights[i] * std::log(arg);
    }
    return sum / std::sqrt(M_PI);
}

std::vector<FrontierPoint> frontier_sweep(
    const Moments& m, const std::vector<RiskAversion>& alphas,
    const std::vector<ReturnVector>& history, const SolveOptions& opts) {
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i].value() <= alphas[i - 1].value())
            throw InvalidInputError("alphas must be strictly increasing");

    std::vector<FrontierPoint> points;
    points.reserve(alphas.size());
    for (const auto& alpha : alphas) {
        const SolveResult r = solve_mv(alpha, m, opts);
        const Vector& b = r.portfolio.weights();
        const double mean = b.dot(m.mu);
        const double var = std::max(0.0, b.dot(m.sigma * b));
        const double sd = std::sqrt(var);
        double elog;
        if (mean > 0.0 && sd / mean < 0.5) {
            elog = normal_log_series(mean, sd, 1e-12).value;
        } else {
            if (history.empty())
                throw InvalidInputError(
                    "ratio outside series regime and no history supplied");
            double s = 0.0;
            for (const auto& x : history) s += std::log(r.portfolio.dot(x));
            elog = s / static_cast<double>(history.size());
        }
        points.push_back(FrontierPoint{alpha, r.portfolio, mean, var,
                                       var > 0.0 ? mean / sd : 0.0, elog});
    }
    return points;
}

}  // namespace mvo
