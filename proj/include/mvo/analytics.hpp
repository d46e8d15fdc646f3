#pragma once

#include <vector>

#include "mvo/solver.hpp"

namespace mvo {

struct SeriesResult {
    double value = 0.0;
    std::size_t terms = 0;        // truncation index
    double truncation_bound = 0.0;  // first omitted term
};

// E log<b,X> for a Gaussian portfolio return N(mu_b, sigma_b^2), as
// log(mu_b) - sum_i ((2i-1)!!/(2i)) (sigma_b/mu_b)^(2i). The series is
// asymptotic: summation stops at the first term below tol or at the minimum
// term, whichever comes first, and the first omitted term is reported as the
// attained truncation bound.
SeriesResult normal_log_series(double mu_b, double sigma_b, double tol);

struct GaussHermiteRule {
    Vector nodes;
    Vector weights;  // for the weight function exp(-t^2)
};

// Golub-Welsch nodes/weights for the physicists' Hermite weight.
GaussHermiteRule gauss_hermite_rule(int n);

// Independent quadrature oracle for normal_log_series: 80-node Gauss-Hermite
// of E log(mu_b + sigma_b Z). Nodes with non-positive argument are skipped;
// their Gaussian mass is negligible in the validated ratio regime.
double gauss_hermite_log_expectation(double mu_b, double sigma_b,
                                     int nodes = 80);

struct FrontierPoint {
    RiskAversion alpha;
    Portfolio portfolio;
    double mean = 0.0;
    double variance = 0.0;
    double sharpe = 0.0;
    double expected_log = 0.0;
};

// Solves the M-V problem for each alpha and evaluates mean/variance/Sharpe
// under the supplied moments; expected_log uses the normal series when the
// ratio precondition holds, else a sample average over the supplied history.
std::vector<FrontierPoint> frontier_sweep(
    const Moments& m, const std::vector<RiskAversion>& alphas,
    const std::vector<ReturnVector>& history = {},
    const SolveOptions& opts = {});

}  // namespace mvo
