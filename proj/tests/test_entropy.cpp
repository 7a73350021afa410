#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lqot/entropy.hpp"
#include "lqot/error.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/linalg.hpp"
#include "lqot/random_instances.hpp"
#include "lqot/rng.hpp"

using namespace lqot;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.28318530717958647692;

double log_det_cov(const GaussianMeasure& g) {
    const Matrix l = cholesky(g.cov.mat());
    double acc = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i) acc += std::log(l(i, i));
    return 2.0 * acc;
}

// Independent closed forms, frozen here: for U(r) = r log r the integral of
// U(rho) is the negative differential entropy,
//   -n/2 (1 + log 2 pi) - (1/2) log det Sigma;
// for U(r) = r^p it is (2 pi)^{n(1-p)/2} (det Sigma)^{(1-p)/2} p^{-n/2}.
double xlogx_integral(const GaussianMeasure& g) {
    const double n = static_cast<double>(g.dim());
    return -0.5 * n * (1.0 + std::log(kTwoPi)) - 0.5 * log_det_cov(g);
}

double power_integral(const GaussianMeasure& g, double p) {
    const double n = static_cast<double>(g.dim());
    return std::exp(0.5 * n * (1.0 - p) * std::log(kTwoPi) +
                    0.5 * (1.0 - p) * log_det_cov(g) -
                    0.5 * n * std::log(p));
}

}  // namespace

TEST_CASE("dc function values") {
    const DCFunction p2 = dc_power(2.0);
    CHECK(p2(0.0) == 0.0);
    CHECK(p2(3.0) == doctest::Approx(9.0));

    const DCFunction np3 = dc_neg_power(3.0);
    CHECK(np3(0.0) == 0.0);
    CHECK(np3(8.0) == doctest::Approx(-std::pow(8.0, 2.0 / 3.0)));

    const DCFunction xl = dc_xlogx();
    CHECK(xl(0.0) == 0.0);
    CHECK(xl(1.0) == 0.0);
    CHECK(xl(2.0) == doctest::Approx(2.0 * std::log(2.0)));

    CHECK_THROWS_AS((void)xl(-0.5), Error);
    CHECK_THROWS_AS((void)dc_power(0.5), Error);
    CHECK_THROWS_AS((void)dc_neg_power(0.9), Error);
}

TEST_CASE("dc class membership") {
    // r^alpha lies in every class.
    for (double n : {1.0, 2.0, 5.0, kInf}) {
        CHECK(dc_membership(dc_power(1.0), n));
        CHECK(dc_membership(dc_power(2.0), n));
        CHECK(dc_membership(dc_power(3.5), n));
        CHECK(dc_membership(dc_xlogx(), n));
    }
    // -r^{1-1/N} belongs to the class of order M exactly when M <= N.
    CHECK(dc_membership(dc_neg_power(3.0), 3.0));
    CHECK(dc_membership(dc_neg_power(3.0), 2.0));
    CHECK_FALSE(dc_membership(dc_neg_power(3.0), 4.0));
    CHECK_FALSE(dc_membership(dc_neg_power(2.0), kInf));
    CHECK(dc_membership(dc_neg_power(5.0), 4.5));

    CHECK_THROWS_AS((void)dc_membership(dc_power(2.0), 0.5), Error);
}

TEST_CASE("entropy functional against closed forms") {
    Rng rng(141);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t n = 1 + rng.index(3);
        const GaussianMeasure g = random_gaussian(rng, n, 0.8, 1.0);

        // xlogx: the estimator must agree with the frozen differential
        // entropy identity within 4 standard errors.
        const EntropyEstimate xl =
            entropy_functional(dc_xlogx(), g, 40000, 7 + rep);
        CHECK_FALSE(xl.analytic.has_value());
        CHECK(xl.std_error > 0.0);
        CHECK(std::abs(xl.value - xlogx_integral(g)) <=
              4.0 * xl.std_error + 1e-9);

        // power(2): library analytic value and frozen formula must agree,
        // and the sampler must agree with both.
        const EntropyEstimate pw =
            entropy_functional(dc_power(2.0), g, 40000, 17 + rep);
        REQUIRE(pw.analytic.has_value());
        CHECK(*pw.analytic ==
              doctest::Approx(power_integral(g, 2.0)).epsilon(1e-11));
        CHECK(std::abs(pw.value - *pw.analytic) <= 4.0 * pw.std_error + 1e-9);

        // neg_power(N): integral of -rho^{1-1/N} equals the frozen power
        // formula with p = 1 - 1/N, negated.
        const double order = 2.0 + rng.index(3);
        const EntropyEstimate np = entropy_functional(
            dc_neg_power(order), g, 40000, 29 + rep);
        REQUIRE(np.analytic.has_value());
        CHECK(*np.analytic ==
              doctest::Approx(-power_integral(g, 1.0 - 1.0 / order))
                  .epsilon(1e-11));
        CHECK(std::abs(np.value - *np.analytic) <= 4.0 * np.std_error + 1e-9);
    }
}

TEST_CASE("entropy scaling law") {
    // Scaling a Gaussian by a: integral of rho_a^p picks up a^{n(1-p)}.
    const GaussianMeasure g =
        make_gaussian(Vec{0.3, -0.2}, Matrix::identity(2));
    const GaussianMeasure g4 =
        make_gaussian(Vec{0.3, -0.2}, 4.0 * Matrix::identity(2));
    const EntropyEstimate a = entropy_functional(dc_power(2.0), g, 1000, 3);
    const EntropyEstimate b = entropy_functional(dc_power(2.0), g4, 1000, 3);
    REQUIRE(a.analytic.has_value());
    REQUIRE(b.analytic.has_value());
    // a = 2 per axis, n = 2, p = 2: factor a^{-2} = 1/4.
    CHECK(*b.analytic == doctest::Approx(*a.analytic / 4.0).epsilon(1e-12));
}

TEST_CASE("density inequality along gaussian interpolations") {
    Rng rng(142);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 3;
    for (int rep = 0; rep < 4; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.7, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.7, 1.0);

        for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double slack = density_inequality_check(
                p, mu, nu, frac * p.T(), 400, 11 + rep);
            CHECK(slack >= -1e-8);
        }

        // tau = 0: beta_T-tau = 1, beta_tau = 0, T_0 = id, so the slack
        // collapses to exactly zero.
        CHECK(density_inequality_check(p, mu, nu, 0.0, 100, 5) == 0.0);
        // tau = T: same collapse from the other end, up to map roundoff.
        CHECK(std::abs(density_inequality_check(p, mu, nu, p.T(), 100, 5)) <=
              1e-10);
    }
}

TEST_CASE("one-sided density inequality survives mollification") {
    Rng rng(143);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 2;
    const LQProblem p = random_problem(rng, opts);
    const GaussianMeasure mu = random_gaussian(rng, 2, 0.5, 1.0);

    // Shrinking the target toward a point mass keeps the one-sided form
    // nonnegative (it drops the target-density term entirely).
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        const GaussianMeasure point_like =
            make_gaussian(Vec{0.7, -0.4}, eps * Matrix::identity(2));
        for (double frac : {0.25, 0.5, 0.75}) {
            const double slack = density_inequality_check(
                p, mu, point_like, frac * p.T(), 300, 19, true);
            CHECK(slack >= -1e-8);
        }
    }
}

TEST_CASE("entropic inequality for admissible integrands") {
    Rng rng(144);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 3;
    for (int rep = 0; rep < 3; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.6, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.6, 1.0);
        const DCFunction u = dc_neg_power(static_cast<double>(n));

        for (double frac : {0.25, 0.5, 0.75}) {
            const EntropicCheck chk = entropic_inequality_check(
                p, u, mu, nu, frac * p.T(), 20000, 23 + rep);
            CHECK(chk.std_error > 0.0);
            CHECK(chk.slack >= -3.0 * chk.std_error);
            CHECK(chk.slack == doctest::Approx(chk.rhs - chk.lhs)
                                   .epsilon(1e-12)
                                   .scale(1.0 + std::abs(chk.rhs)));
        }

        // xlogx is in every class, so it is admissible too.
        const EntropicCheck xl = entropic_inequality_check(
            p, dc_xlogx(), mu, nu, 0.5 * p.T(), 20000, 31 + rep);
        CHECK(xl.slack >= -3.0 * xl.std_error);
    }

    // An integrand outside the dimension class is rejected.
    RandomProblemOptions o2;
    o2.n_min = 3;
    o2.n_max = 3;
    Rng rng2(145);
    const LQProblem p3 = random_problem(rng2, o2);
    const GaussianMeasure a = random_gaussian(rng2, 3, 0.5, 1.0);
    const GaussianMeasure b = random_gaussian(rng2, 3, 0.5, 1.0);
    CHECK_THROWS_AS((void)entropic_inequality_check(p3, dc_neg_power(2.0), a,
                                                    b, 0.5 * p3.T(), 2000, 1),
                    Error);
    // tau on the boundary is rejected.
    CHECK_THROWS_AS((void)entropic_inequality_check(p3, dc_neg_power(3.0), a,
                                                    b, 0.0, 2000, 1),
                    Error);
}

TEST_CASE("free particle entropic inequality is displacement convexity") {
    // For A = 0, B = I, Q = 0 the prefactors collapse to linear weights; with
    // U = xlogx and two unit Gaussians the inequality holds with margin.
    const LQProblem p = LQProblem::create(Matrix(2, 2), Matrix::identity(2),
                                          Matrix(2, 2), 1.0);
    const GaussianMeasure mu =
        make_gaussian(Vec{-1.0, 0.0}, Matrix::identity(2));
    const GaussianMeasure nu =
        make_gaussian(Vec{1.0, 0.5}, 2.0 * Matrix::identity(2));
    const EntropicCheck chk =
        entropic_inequality_check(p, dc_xlogx(), mu, nu, 0.5, 30000, 77);
    CHECK(chk.slack >= -3.0 * chk.std_error);

    // Frozen flat-space check of the right-hand side structure: beta_sigma =
    // sigma^n on [0, 1], so the prefactors are (1-tau) and tau exactly and
    // both density arguments are the endpoint densities themselves.
    const double tau = 0.5;
    const double n = 2.0;
    const double beta_left = std::pow(1.0 - tau, n);
    const double pre_left = std::pow(1.0 / (1.0 - tau), n - 1.0) * beta_left;
    CHECK(pre_left == doctest::Approx(1.0 - tau).epsilon(1e-12));
}
