#include "mvo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mvo {

Vector project_to_simplex(const Vector& v) {
    const Eigen::Index m = v.size();
    std::vector<double> u(v.data(), v.data() + m);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double tau = 0.0;
    Eigen::Index rho = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            rho = i;
            tau = t;
        }
    }
    (void)rho;
    Vector out = (v.array() - tau).cwiseMax(0.0);
    out /= out.sum();  // renormalize rounding noise
    return out;
}

namespace {

void check_moments(const Moments& m) {
    if (m.mu.size() != m.sigma.rows() || m.sigma.rows() != m.sigma.cols())
        throw InvalidMomentsError("moment dimensions mismatch");
    const double scale = std::max(1.0, m.sigma.cwiseAbs().maxCoeff());
    if ((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidMomentsError("sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw InvalidMomentsError("sigma is not positive semidefinite");
}

double residual_of(const Vector& b, double alpha, const Moments& m) {
    const Vector g = m.mu - 2.0 * alpha * (m.sigma * b);
    const double lambda = g.maxCoeff();
    double res = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j)
        res = std::max(res, b[j] * (lambda - g[j]) + std::max(0.0, g[j] - lambda));
    return res;
}

// Uniform weights over the assets whose mean is within relative tolerance of
// the maximum; this is the minimum-norm element of the optimal face of the
// linear objective.
Vector max_mean_face(const Vector& mu) {
    const double top = mu.maxCoeff();
    const double band = 1e-12 * std::max(1.0, std::abs(top));
    Vector b = Vector::Zero(mu.size());
    Eigen::Index ties = 0;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        if (mu[j] >= top - band) ++ties;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        if (mu[j] >= top - band) b[j] = 1.0 / static_cast<double>(ties);
    return b;
}

}  // namespace

double kkt_residual(const Portfolio& b, const RiskAversion& alpha,
                    const Moments& m) {
    return residual_of(b.weights(), alpha.value(), m);
}

SolveResult solve_mv(const RiskAversion& alpha, const Moments& m,
                     const SolveOptions& opts) {
    check_moments(m);
    if (opts.kkt_tolerance <= 0.0 || opts.max_iterations < 1)
        throw InvalidInputError("invalid solve options");
    const double a = alpha.value();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma, Eigen::EigenvaluesOnly);
    const double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
    const double lam_min = es.eigenvalues().minCoeff();

    if (a * lam_max <= 1e-15) {
        // Linear objective: closed-form vertex / tied-face solution.
        Vector b = max_mean_face(m.mu);
        Portfolio p(b);
        return SolveResult{p, mv_utility(alpha, b, m),
                           kkt_residual(p, alpha, m), 0};
    }

    Vector b = opts.initial ? project_to_simplex(*opts.initial)
                            : Vector::Constant(m.mu.size(),
                                               1.0 / static_cast<double>(m.mu.size()));

    // A flat optimal face is possible only when alpha*Sigma is singular; a
    // vanishing Tikhonov pull toward the origin selects its min-norm element.
    std::vector<double> stages;
    if (!opts.initial && a * lam_min < 1e-12 * std::max(1.0, a * lam_max))
        stages = {1e-4, 1e-6, 1e-8, opts.kkt_tolerance / 4.0};
    stages.push_back(0.0);

    // Exact refinement: solve the equality-constrained stationarity system on
    // the support suggested by the current iterate (minimum-norm solution via
    // complete orthogonal decomposition, which also handles flat faces). The
    // gradient iteration identifies the active set; the polish step then
    // finishes in one linear solve, which rescues ill-conditioned covariances
    // where the first-order rate alone would need millions of iterations.
    auto polish = [&](const Vector& cur,
                      double support_tol) -> std::optional<Vector> {
        std::vector<Eigen::Index> S;
        for (Eigen::Index j = 0; j < cur.size(); ++j)
            if (cur[j] > support_tol) S.push_back(j);
        if (S.empty()) return std::nullopt;
        const Eigen::Index n = static_cast<Eigen::Index>(S.size());
        Matrix K = Matrix::Zero(n + 1, n + 1);
        Vector rhs(n + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j)
                K(i, j) = 2.0 * a * m.sigma(S[i], S[j]);
            K(i, n) = 1.0;
            K(n, i) = 1.0;
            rhs[i] = m.mu[S[i]];
        }
        rhs[n] = 1.0;
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
        const Vector sol = cod.solve(rhs);
        Vector cand = Vector::Zero(cur.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            if (sol[i] < -1e-12) return std::nullopt;  // wrong support
            cand[S[i]] = std::max(0.0, sol[i]);
        }
        const double total = cand.sum();
        if (std::abs(total - 1.0) > 1e-9) return std::nullopt;
        cand /= total;
        if (residual_of(cand, a, m) <= opts.kkt_tolerance) return cand;
        return std::nullopt;
    };
    auto try_polish = [&](const Vector& cur) -> std::optional<Vector> {
        for (double support_tol : {1e-9, 0.0})
            if (auto cand = polish(cur, support_tol)) return cand;
        return std::nullopt;
    };

    std::size_t iters = 0;
    double res = residual_of(b, a, m);
    for (double eps : stages) {
        const double step = 1.0 / (2.0 * a * lam_max + 2.0 * eps + 1.0);
        if (eps == 0.0 && res > opts.kkt_tolerance) {
            if (auto cand = try_polish(b)) {
                b = *cand;
                res = residual_of(b, a, m);
            }
        }
        if (eps == 0.0 && res <= opts.kkt_tolerance) break;
        while (iters < opts.max_iterations) {
            const Vector grad = m.mu - 2.0 * a * (m.sigma * b) - 2.0 * eps * b;
            const Vector next = project_to_simplex(b + step * grad);
            const double move = (next - b).norm();
            b = next;
            ++iters;
            res = residual_of(b, a, m);
            if (eps == 0.0) {
                if (res <= opts.kkt_tolerance) break;
                if (iters % 25 == 0 || move <= 1e-17) {
                    if (auto cand = try_polish(b)) {
                        b = *cand;
                        res = residual_of(b, a, m);
                        break;
                    }
                }
                if (move <= 1e-17) break;  // stalled at machine precision
            } else if (move <= 0.05 * eps * step) {
                break;  // stage converged; tighten the pull
            }
        }
    }

    if (res > opts.kkt_tolerance)
        throw ConvergenceError("solve_mv did not reach KKT tolerance", b, res);
    Portfolio p(b);
    return SolveResult{p, mv_utility(alpha, b, m), res, iters};
}

namespace {

struct LatticeBest {
    double utility = -std::numeric_limits<double>::infinity();
    std::uint64_t key = UINT64_MAX;  // lexicographic rank; breaks ties
    Vector b;
};

void consider(LatticeBest& best, const Vector& cand, std::uint64_t key,
              double alpha, const Moments& m) {
    const double u =
        cand.dot(m.mu) - alpha * cand.dot(m.sigma * cand);
    if (u > best.utility || (u == best.utility && key < best.key)) {
        best.utility = u;
        best.key = key;
        best.b = cand;
    }
}

// Enumerates weights (c_1..c_m)/k with c_1 fixed.
void scan_tail(LatticeBest& best, Vector& c, Eigen::Index pos, int remaining,
               int k, std::uint64_t key, double alpha, const Moments& m) {
    const Eigen::Index last = c.size() - 1;
    if (pos == last) {
        c[pos] = static_cast<double>(remaining) / k;
        consider(best, c, key * static_cast<std::uint64_t>(k + 1) +
                              static_cast<std::uint64_t>(remaining),
                 alpha, m);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        c[pos] = static_cast<double>(v) / k;
        scan_tail(best, c, pos + 1, remaining - v, k,
                  key * static_cast<std::uint64_t>(k + 1) +
                      static_cast<std::uint64_t>(v),
                  alpha, m);
    }
}

int lattice_order(const Moments& m, double grid_step) {
    check_moments(m);
    if (grid_step <= 0.0 || grid_step > 1.0)
        throw InvalidInputError("grid_step must lie in (0, 1]");
    const int k = static_cast<int>(std::lround(1.0 / grid_step));
    if (std::abs(k * grid_step - 1.0) > 1e-9)
        throw InvalidInputError("grid_step must divide 1 evenly");
    if (m.mu.size() > 4)
        throw ResourceLimitError("brute-force oracle is limited to m <= 4");
    return k;
}

SolveResult from_best(const LatticeBest& best, double res_alpha,
                      const Moments& m) {
    Portfolio p(best.b);
    return SolveResult{p, best.utility,
                       kkt_residual(p, RiskAversion(res_alpha), m), 0};
}

}  // namespace

SolveResult brute_force_mv_serial(const RiskAversion& alpha, const Moments& m,
                                  double grid_step) {
    const int k = lattice_order(m, grid_step);
    LatticeBest best;
    Vector c = Vector::Zero(m.mu.size());
    scan_tail(best, c, 0, k, k, 1, alpha.value(), m);
    return from_best(best, alpha.value(), m);
}

SolveResult brute_force_mv(const RiskAversion& alpha, const Moments& m,
                           double grid_step) {
    const int k = lattice_order(m, grid_step);
    const Eigen::Index dim = m.mu.size();
    if (dim == 1) return brute_force_mv_serial(alpha, m, grid_step);

    LatticeBest best;
#pragma omp parallel
    {
        LatticeBest local;
        Vector c = Vector::Zero(dim);
#pragma omp for schedule(dynamic) nowait
        for (int v = 0; v <= k; ++v) {
            c[0] = static_cast<double>(v) / k;
            scan_tail(local, c, 1, k - v, k,
                      static_cast<std::uint64_t>(k + 1) +
                          static_cast<std::uint64_t>(v),
                      alpha.value(), m);
        }
#pragma omp critical
        {
            if (local.utility > best.utility ||
                (local.utility == best.utility && local.key < best.key))
                best = local;
        }
    }
    return from_best(best, alpha.value(), m);
}

}  // namespace mvo
