#include <doctest.h>

#include <random>

#include "mvo/strategies.hpp"

using namespace mvo;

namespace {

ReturnVector rv(std::initializer_list<double> vals) {
    Vector v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return ReturnVector(v);
}

std::vector<ReturnVector> symmetric_pairs(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> d(0.0, 0.05);
    std::vector<ReturnVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = d(rng), b = d(rng);
        out.push_back(rv({a, b}));
        out.push_back(rv({b, a}));  // mirrored partner
    }
    return out;
}

}  // namespace

TEST_CASE("uniform portfolio during warm-up, optimum afterwards") {
    ConstantAlphaStrategy s(3, RiskAversion(2.0), 4);
    std::mt19937_64 rng(1);
    std::lognormal_distribution<double> d(0.0, 0.05);
    for (int step = 0; step < 4; ++step) {
        const Portfolio b = s.next();
        CHECK((b.weights() - Portfolio::uniform(3).weights()).norm() == 0.0);
        s.observe(rv({d(rng), d(rng), d(rng)}));
    }
    // past warm-up: the played portfolio is the M-V optimum of the
    // accumulated empirical moments
    const Portfolio b = s.next();
    const SolveResult direct = solve_mv(RiskAversion(2.0),
                                        s.accumulator().moments());
    CHECK((b.weights() - direct.portfolio.weights()).norm() < 1e-9);
    CHECK(kkt_residual(b, RiskAversion(2.0), s.accumulator().moments()) <=
          1e-9);
}

TEST_CASE("exchangeable two-asset data gives the balanced portfolio") {
    ConstantAlphaStrategy s(2, RiskAversion(4.0), 2);
    for (const auto& x : symmetric_pairs(200, 9)) {
        s.next();
        s.observe(x);
    }
    const Portfolio b = s.next();
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("decisions are causal: only past observations are used") {
    // feeding the same prefix to two instances and then different current
    // returns must not change the current decision
    ConstantAlphaStrategy a(2, RiskAversion(1.0), 2);
    ConstantAlphaStrategy b(2, RiskAversion(1.0), 2);
    for (const auto& x : symmetric_pairs(20, 3)) {
        a.observe(x);
        b.observe(x);
    }
    const Portfolio pa = a.next();
    const Portfolio pb = b.next();
    CHECK((pa.weights() - pb.weights()).norm() == 0.0);
    a.observe(rv({1.4, 0.7}));
    b.observe(rv({0.7, 1.4}));  // divergence only after the decision
    CHECK((pa.weights() - pb.weights()).norm() == 0.0);
}

TEST_CASE("adaptive with a single candidate reduces to the constant rule") {
    ConstantAlphaStrategy c(2, RiskAversion(3.0), 3);
    AdaptiveAlphaStrategy a(2, {RiskAversion(3.0)}, ObjectiveKind::sharpe, 3);
    std::mt19937_64 rng(21);
    std::lognormal_distribution<double> d(0.01, 0.08);
    for (int step = 0; step < 60; ++step) {
        const Portfolio bc = c.next();
        const auto [ba, alpha] = a.next();
        CHECK(alpha.value() == 3.0);
        CHECK((bc.weights() - ba.weights()).norm() < 1e-10);
        const auto x = rv({d(rng), d(rng)});
        c.observe(x);
        a.observe(x);
    }
}

TEST_CASE("constant returns: max-mean vertex, smallest alpha on ties") {
    // a deterministic market has zero empirical covariance, so every
    // candidate plays the max-mean vertex and scores identically; the
    // smallest alpha must win the tie
    AdaptiveAlphaStrategy a(2, {RiskAversion(0.5), RiskAversion(2.0),
                                RiskAversion(6.0)},
                            ObjectiveKind::sharpe, 2);
    for (int step = 0; step < 12; ++step) {
        const auto [b, alpha] = a.next();
        if (step >= 2) {
            CHECK(alpha.value() == 0.5);
            CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-9));
        }
        a.observe(rv({1.08, 0.97}));
    }
}

TEST_CASE("adaptive selects the objective-maximizing candidate") {
    // asset 0: high mean, high variance; asset 1: near-constant. With the
    // log-growth objective the aggressive low-alpha subroutine scores best.
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.5);
    AdaptiveAlphaStrategy a(2, {RiskAversion(0.0), RiskAversion(50.0)},
                            ObjectiveKind::log_growth, 4);
    RiskAversion last(0.0);
    for (int step = 0; step < 400; ++step) {
        auto [b, alpha] = a.next();
        last = alpha;
        a.observe(rv({coin(rng) ? 1.35 : 0.95, 1.001}));
    }
    // E log: aggressive vertex ~ 0.5(log1.35+log0.95) ~ 0.124 > log 1.001
    CHECK(last.value() == 0.0);
}

TEST_CASE("bayesian oracle plays the conditional optimum") {
    Moments cond{(Vector(2) << 1.04, 0.96).finished(),
                 (Matrix(2, 2) << 0.02, 0.0, 0.0, 0.02).finished()};
    const Portfolio b = bayesian_next(cond, RiskAversion(1.0));
    const SolveResult direct = solve_mv(RiskAversion(1.0), cond);
    CHECK((b.weights() - direct.portfolio.weights()).norm() == 0.0);
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(ConstantAlphaStrategy(1, RiskAversion(1.0), 2),
                    ConfigError);
    CHECK_THROWS_AS(ConstantAlphaStrategy(2, RiskAversion(1.0), 0),
                    ConfigError);
    CHECK_THROWS_AS(
        AdaptiveAlphaStrategy(2, {}, ObjectiveKind::sharpe, 2), ConfigError);
    CHECK_THROWS_AS(
        AdaptiveAlphaStrategy(2, {RiskAversion(2.0), RiskAversion(1.0)},
                              ObjectiveKind::sharpe, 2),
        ConfigError);
}
