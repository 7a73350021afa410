#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lqot/cost.hpp"
#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/error.hpp"
#include "lqot/random_instances.hpp"
#include "lqot/rng.hpp"

using namespace lqot;

namespace {

Matrix random_cost(Rng& rng, std::size_t n, std::size_t m) {
    Matrix c(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) c(i, j) = 2.0 * rng.normal();
    return c;
}

Vec uniform_weights(std::size_t n) {
    return Vec(n, 1.0 / static_cast<double>(n));
}

double dual_violation(const KantorovichSolution& sol, const Matrix& cost) {
    // Feasibility of (-psi, psi_c) for the dual: psi_c[j] - psi[i] <= c(i,j).
    double worst = 0.0;
    for (std::size_t i = 0; i < cost.rows(); ++i)
        for (std::size_t j = 0; j < cost.cols(); ++j)
            worst = std::max(worst, sol.potentials.psi_c[j] -
                                        sol.potentials.psi[i] - cost(i, j));
    return worst;
}

double dual_value(const KantorovichSolution& sol, const Vec& mu_w,
                  const Vec& nu_w) {
    double v = 0.0;
    for (std::size_t i = 0; i < mu_w.size(); ++i)
        v -= sol.potentials.psi[i] * mu_w[i];
    for (std::size_t j = 0; j < nu_w.size(); ++j)
        v += sol.potentials.psi_c[j] * nu_w[j];
    return v;
}

}  // namespace

TEST_CASE("measure validation") {
    CHECK_NOTHROW((void)make_discrete({Vec{0.0}, Vec{1.0}}, Vec{0.5, 0.5}));
    CHECK_THROWS_AS((void)make_discrete({}, Vec{}), Error);
    CHECK_THROWS_AS((void)make_discrete({Vec{0.0}}, Vec{0.9}), Error);
    CHECK_THROWS_AS(
        (void)make_discrete({Vec{0.0}, Vec{1.0}}, Vec{1.0, 0.0}), Error);
    CHECK_THROWS_AS(
        (void)make_discrete({Vec{0.0}, Vec{1.0, 2.0}}, Vec{0.5, 0.5}), Error);
}

TEST_CASE("exact solver agrees with the permutation oracle") {
    Rng rng(101);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 2 + rng.index(6);  // 2..7
        const Matrix cost = random_cost(rng, n, n);
        const Vec w = uniform_weights(n);

        const KantorovichSolution sol = solve_kantorovich(cost, w, w);
        const BruteForceResult oracle = brute_force_oracle(cost);
        const double scale = 1.0 + std::abs(oracle.total_cost);
        CHECK(std::abs(sol.total_cost - oracle.total_cost) <= 1e-9 * scale);

        // Dual feasibility and strong duality.
        CHECK(dual_violation(sol, cost) <= 1e-9);
        CHECK(std::abs(dual_value(sol, w, w) - sol.total_cost) <=
              1e-9 * scale);

        // Gauge and c-transform consistency at optimality.
        CHECK(sol.potentials.psi[0] == 0.0);
        const Vec ct = c_transform(sol.potentials.psi, cost);
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(ct[j] - sol.potentials.psi_c[j]) <= 1e-9);
    }
}

TEST_CASE("non-uniform weights and rectangular instances") {
    Rng rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.index(5);
        const std::size_t m = 2 + rng.index(5);
        const Matrix cost = random_cost(rng, n, m);
        const DiscreteMeasure mu = random_discrete(rng, n, 1, 1.0, false);
        const DiscreteMeasure nu = random_discrete(rng, m, 1, 1.0, false);
        const KantorovichSolution sol =
            solve_kantorovich(cost, mu.weights, nu.weights);

        // Marginals match exactly up to accumulation error.
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += sol.plan.matrix(i, j);
            CHECK(std::abs(row - mu.weights[i]) <= 1e-12);
        }
        for (std::size_t j = 0; j < m; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n; ++i) col += sol.plan.matrix(i, j);
            CHECK(std::abs(col - nu.weights[j]) <= 1e-12);
        }
        for (const PlanEntry& e : sol.plan.entries) CHECK(e.w > 0.0);

        CHECK(dual_violation(sol, cost) <= 1e-9);
        CHECK(std::abs(dual_value(sol, mu.weights, nu.weights) -
                       sol.total_cost) <=
              1e-9 * (1.0 + std::abs(sol.total_cost)));

        // Primal lower bound from any feasible dual: compare against the
        // independent coupling's cost.
        double indep = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                indep += mu.weights[i] * nu.weights[j] * cost(i, j);
        CHECK(sol.total_cost <= indep + 1e-9 * (1.0 + std::abs(indep)));
    }
}

TEST_CASE("monotone matching for the concave pairing cost") {
    // c(x, y) = -x y on the line couples sorted atoms in order.
    Rng rng(103);
    const std::size_t n = 8;
    Vec xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.uniform(-2.0, 2.0);
        ys[i] = rng.uniform(-2.0, 2.0);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    Matrix cost(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost(i, j) = -xs[i] * ys[j];
    const KantorovichSolution sol =
        solve_kantorovich(cost, uniform_weights(n), uniform_weights(n));
    for (std::size_t i = 0; i < n; ++i)
        CHECK(sol.plan.matrix(i, i) == doctest::Approx(1.0 / n).epsilon(1e-12));
}

TEST_CASE("c-transform pair is order-reversing and idempotent-like") {
    Rng rng(104);
    const Matrix cost = random_cost(rng, 6, 5);
    Vec psi(6);
    for (double& v : psi) v = rng.normal();
    const Vec phi = c_transform(psi, cost);
    const Vec psi2 = inverse_c_transform(phi, cost);
    // One full sweep dominates: psi2 <= psi, and transforming again is stable.
    for (std::size_t i = 0; i < 6; ++i) CHECK(psi2[i] <= psi[i] + 1e-12);
    const Vec phi2 = c_transform(psi2, cost);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(phi2[j] == doctest::Approx(phi[j]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("cyclical monotonicity of optimal plans") {
    Rng rng(105);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 3 + rng.index(4);
        const Matrix cost = random_cost(rng, n, n);
        const DiscreteMeasure mu = random_discrete(rng, n, 1, 1.0, false);
        const DiscreteMeasure nu = random_discrete(rng, n, 1, 1.0, false);
        const KantorovichSolution sol =
            solve_kantorovich(cost, mu.weights, nu.weights);
        CHECK_FALSE(verify_cyclical_monotonicity(sol.plan, cost, 5)
                        .has_value());
    }

    // A hand-built non-monotone plan is caught with a length-2 cycle.
    Matrix cost(2, 2);
    cost(0, 0) = 0.0;
    cost(0, 1) = 10.0;
    cost(1, 0) = 10.0;
    cost(1, 1) = 0.0;
    TransportPlan bad;
    bad.n_source = 2;
    bad.n_target = 2;
    bad.matrix = Matrix(2, 2);
    bad.matrix(0, 1) = 0.5;
    bad.matrix(1, 0) = 0.5;
    bad.entries = {PlanEntry{0, 1, 0.5}, PlanEntry{1, 0, 0.5}};
    const auto violation = verify_cyclical_monotonicity(bad, cost, 3);
    REQUIRE(violation.has_value());
    CHECK(violation->gap < 0.0);  // negative gap = the cycle swap lowers cost
    CHECK(violation->entry_indices.size() >= 2);
}

TEST_CASE("plans from control costs between sampled clouds") {
    Rng rng(106);
    const LQProblem p = random_problem(rng);
    const std::size_t n = p.n();
    const DiscreteMeasure mu = random_discrete(rng, 12, n, 1.0, false);
    const DiscreteMeasure nu = random_discrete(rng, 9, n, 1.0, false);
    const CostMatrices cm = cost_matrices(p, 0.0, p.T());
    const Matrix cost = cost_matrix_between(cm, mu.points, nu.points);
    REQUIRE(cost.rows() == 12);
    REQUIRE(cost.cols() == 9);
    // Batch evaluation agrees with pointwise evaluation.
    for (std::size_t i = 0; i < 12; i += 3)
        for (std::size_t j = 0; j < 9; j += 2)
            CHECK(cost(i, j) ==
                  doctest::Approx(cost_eval(cm, mu.points[i], nu.points[j]))
                      .epsilon(1e-12)
                      .scale(1.0));

    const KantorovichSolution sol =
        solve_kantorovich(cost, mu.weights, nu.weights);
    CHECK(dual_violation(sol, cost) <= 1e-9);
    CHECK_FALSE(verify_cyclical_monotonicity(sol.plan, cost, 4).has_value());
}

TEST_CASE("solver scales to mid-size dense instances") {
    Rng rng(107);
    const std::size_t n = 128;
    const Matrix cost = random_cost(rng, n, n);
    const Vec w = uniform_weights(n);
    const auto start = std::chrono::steady_clock::now();
    const KantorovichSolution sol = solve_kantorovich(cost, w, w);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    CHECK(elapsed < 30.0);
    CHECK(dual_violation(sol, cost) <= 1e-9);
    CHECK(std::abs(dual_value(sol, w, w) - sol.total_cost) <=
          1e-9 * (1.0 + std::abs(sol.total_cost)));
    CHECK(sol.plan.entries.size() >= n);        // at least a matching
    CHECK(sol.plan.entries.size() <= 2 * n - 1);  // a tree's support bound
}

TEST_CASE("oracle guard") {
    Rng rng(108);
    const Matrix big = random_cost(rng, 10, 10);
    CHECK_THROWS_AS((void)brute_force_oracle(big), Error);
}
