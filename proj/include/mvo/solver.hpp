#pragma once

#include <optional>

#include "mvo/types.hpp"

namespace mvo {

struct SolveOptions {
    std::size_t max_iterations = 100000;
    double kkt_tolerance = 1e-9;
    // Optional warm start; when absent the solver starts from the uniform
    // portfolio and applies min-norm tie-breaking on flat optimal faces.
    std::optional<Vector> initial;
};

struct SolveResult {
    Portfolio portfolio;
    double utility;
    double kkt_residual;
    std::size_t iterations;
};

// Euclidean projection onto the unit simplex.
Vector project_to_simplex(const Vector& v);

// Stationarity/complementary-slackness violation of b for the
// simplex-constrained concave QP max <b,mu> - alpha <b,Sigma b>.
// Zero exactly at optimizers.
double kkt_residual(const Portfolio& b, const RiskAversion& alpha,
                    const Moments& m);

// Maximizes the mean-variance utility over the simplex by projected-gradient
// ascent. When the optimizer set is not a singleton (alpha = 0 with tied
// means, or singular Sigma) the minimum-norm element of the optimal face is
// targeted via a vanishing Tikhonov pull.
SolveResult solve_mv(const RiskAversion& alpha, const Moments& m,
                     const SolveOptions& opts = {});

// Exhaustive lattice search oracle; m <= 4 only. grid_step must divide 1.
SolveResult brute_force_mv(const RiskAversion& alpha, const Moments& m,
                           double grid_step);

// Serial reference for the OpenMP lattice search above; kept for testing.
SolveResult brute_force_mv_serial(const RiskAversion& alpha, const Moments& m,
                                  double grid_step);

}  // namespace mvo
