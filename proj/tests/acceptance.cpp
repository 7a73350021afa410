// Acceptance gate: 12 end-to-end criteria, one pass/fail line each, with
// tolerances and runtime limits pinned below. Exits nonzero on any failure.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "lqot/comparison.hpp"
#include "lqot/cost.hpp"
#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/entropy.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/interpolation.hpp"
#include "lqot/random_instances.hpp"
#include "lqot/rng.hpp"

using namespace lqot;

namespace {

constexpr double kPi = 3.14159265358979323846;

using Outcome = std::pair<bool, std::string>;

std::string fmt(const char* f, ...) {
    char buf[200];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

Matrix scalar_matrix(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

LQProblem scalar_problem(double a, double b, double q, double t) {
    return LQProblem::create(scalar_matrix(a), scalar_matrix(b),
                             scalar_matrix(q), t);
}

// 1. Closed-form costs: c = -xy for (0,1,1,pi/2), c = x^2 - xy for (1,1,1,1),
//    within 1e-10 on a 100-point (x,y) grid.
Outcome crit_closed_form_costs() {
    const LQProblem osc = scalar_problem(0.0, 1.0, 1.0, kPi / 2.0);
    const CostMatrices ca = cost_matrices(osc, 0.0, osc.T());
    const LQProblem shear = scalar_problem(1.0, 1.0, 1.0, 1.0);
    const CostMatrices cb = cost_matrices(shear, 0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double x = -2.0 + 4.0 * i / 9.0;
            const double y = -2.0 + 4.0 * j / 9.0;
            worst = std::max(worst,
                             std::abs(cost_eval(ca, Vec{x}, Vec{y}) + x * y));
            worst = std::max(worst, std::abs(cost_eval(cb, Vec{x}, Vec{y}) -
                                             (x * x - x * y)));
        }
    return {worst <= 1e-10, fmt("max_err=%.3g tol=1e-10", worst)};
}

// 2. Conjugate times: pi for (0,1,1) within 1e-8; pi/sqrt(K) for the positive
//    curvature model problems within 1e-7.
Outcome crit_conjugate_times() {
    const auto t_osc = first_conjugate_time(scalar_problem(0.0, 1.0, 1.0, 1.0),
                                            4.0);
    if (!t_osc) return {false, "oscillator conjugate time not found"};
    const double err_osc = std::abs(*t_osc - kPi);

    double err_model = 0.0;
    const double cases[][3] = {{3.0, 3.0, 1.0}, {2.0, 5.0, 1.0},
                               {5.0, 2.0, 1.0}};
    for (const auto& c : cases) {
        const double k = c[0], d = c[2];
        const std::size_t n = static_cast<std::size_t>(c[1]);
        const double bigk = d * d * k / static_cast<double>(n - 1);
        const LQProblem p = model_space_problem(k, n, d);
        const double want = kPi / std::sqrt(bigk);
        const auto t_star = first_conjugate_time(p, want + 1.0);
        if (!t_star) return {false, "model conjugate time not found"};
        err_model = std::max(err_model, std::abs(*t_star - want));
    }
    return {err_osc <= 1e-8 && err_model <= 1e-7,
            fmt("osc_err=%.3g tol=1e-8 model_err=%.3g tol=1e-7", err_osc,
                err_model)};
}

// 3. Flow identities at 1e-9 over 100 seeded problems, n <= 6, 20 times each.
Outcome crit_flow_identities() {
    Rng rng(3003);
    RandomProblemOptions opts;
    opts.n_min = 1;
    opts.n_max = 6;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const Matrix omega = symplectic_form(p.n());
        for (int j = 1; j <= 20; ++j) {
            const double tau = p.T() * static_cast<double>(j) / 20.0;
            const FlowBlocks fb = flow_blocks(p, tau);
            const FlowBlocks bk = flow_blocks(p, -tau);
            const Matrix g = fb.assemble();
            worst = std::max(worst,
                             (g.transpose() * omega * g - omega).max_abs());
            worst = std::max(worst, (fb.R1.transpose() - bk.R4).max_abs());
            worst = std::max(worst, (fb.R2.transpose() + bk.R2).max_abs());
            worst = std::max(worst, (fb.R3.transpose() + bk.R3).max_abs());
            const Matrix split = flow_blocks(p, 0.4 * tau).assemble() *
                                 flow_blocks(p, 0.6 * tau).assemble();
            worst = std::max(worst, (g - split).max_abs());
            const FlowBlocks rb = flow_blocks(backwards_problem(p), tau);
            worst = std::max(worst, (rb.R1 - bk.R1).max_abs());
            worst = std::max(worst, (rb.R2 + bk.R2).max_abs());
            worst = std::max(worst, (rb.R3 + bk.R3).max_abs());
            worst = std::max(worst, (rb.R4 - bk.R4).max_abs());
        }
    }
    return {worst <= 1e-9, fmt("max_residual=%.3g tol=1e-9", worst)};
}

// 4. Action of the optimal trajectory matches the closed-form cost within
//    1e-6 at 2049 nodes for 50 seeded (problem, x, y) triples.
Outcome crit_action_cost() {
    Rng rng(3004);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const LQProblem p = random_problem(rng);
        const std::size_t n = p.n();
        Vec x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
        }
        const double cost =
            cost_eval(cost_matrices(p, 0.0, p.T()), x, y);
        const Trajectory traj = optimal_trajectory(p, x, y, 0.0, p.T(), 2049);
        worst = std::max(worst, std::abs(action_eval(p, traj) - cost) /
                                    (1.0 + std::abs(cost)));
    }
    return {worst <= 1e-6, fmt("max_rel_err=%.3g tol=1e-6", worst)};
}

// 5. Exact solver equals the brute-force permutation oracle (pairing and
//    total cost to 1e-9) on 200 seeded uniform instances, N <= 7, including
//    negative-cost LQ instances.
Outcome crit_ot_oracle() {
    Rng rng(3005);
    double worst = 0.0;
    int structure_failures = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t nn = 2 + rng.index(6);
        Matrix cost(nn, nn);
        if (rep % 3 == 0) {
            RandomProblemOptions opts;
            opts.n_min = 1;
            opts.n_max = 3;
            const LQProblem p = random_problem(rng, opts);
            const DiscreteMeasure a =
                random_discrete(rng, nn, p.n(), 1.2, true);
            const DiscreteMeasure b =
                random_discrete(rng, nn, p.n(), 1.2, true);
            cost = cost_matrix_between(cost_matrices(p, 0.0, p.T()), a.points,
                                       b.points);
        } else {
            for (std::size_t i = 0; i < nn; ++i)
                for (std::size_t j = 0; j < nn; ++j)
                    cost(i, j) = 2.0 * rng.normal();
        }
        const Vec w(nn, 1.0 / static_cast<double>(nn));
        const KantorovichSolution sol = solve_kantorovich(cost, w, w);
        const BruteForceResult oracle = brute_force_oracle(cost);
        const double scale = 1.0 + std::abs(oracle.total_cost);
        worst = std::max(worst, std::abs(sol.total_cost - oracle.total_cost) /
                                    scale);

        // The support must be a permutation carrying 1/N per atom whose cost
        // matches the oracle's optimum.
        bool pairing = sol.plan.entries.size() == nn;
        std::vector<bool> seen_i(nn, false), seen_j(nn, false);
        double perm_cost = 0.0;
        for (const PlanEntry& e : sol.plan.entries) {
            pairing = pairing && !seen_i[e.i] && !seen_j[e.j] &&
                      std::abs(e.w - 1.0 / static_cast<double>(nn)) <= 1e-9;
            seen_i[e.i] = true;
            seen_j[e.j] = true;
            perm_cost += e.w * cost(e.i, e.j);
        }
        if (!pairing) {
            ++structure_failures;
            continue;
        }
        worst = std::max(worst,
                         std::abs(perm_cost - oracle.total_cost) / scale);
    }
    return {worst <= 1e-9 && structure_failures == 0,
            fmt("max_rel_err=%.3g tol=1e-9 non_permutation=%d", worst,
                structure_failures)};
}

// 6. Every solver-produced plan is c-cyclically monotone up to cycle length 5
//    on 50 seeded instances.
Outcome crit_cyclical_monotonicity() {
    Rng rng(3006);
    int violations = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t nn = 3 + rng.index(6);
        const std::size_t mm = 3 + rng.index(6);
        Matrix cost(nn, mm);
        if (rep % 2 == 0) {
            RandomProblemOptions opts;
            opts.n_min = 1;
            opts.n_max = 3;
            const LQProblem p = random_problem(rng, opts);
            const DiscreteMeasure a =
                random_discrete(rng, nn, p.n(), 1.0, false);
            const DiscreteMeasure b =
                random_discrete(rng, mm, p.n(), 1.0, false);
            cost = cost_matrix_between(cost_matrices(p, 0.0, p.T()), a.points,
                                       b.points);
        } else {
            for (std::size_t i = 0; i < nn; ++i)
                for (std::size_t j = 0; j < mm; ++j)
                    cost(i, j) = 2.0 * rng.normal();
        }
        const DiscreteMeasure mu = random_discrete(rng, nn, 1, 1.0, false);
        const DiscreteMeasure nu = random_discrete(rng, mm, 1, 1.0, false);
        const KantorovichSolution sol =
            solve_kantorovich(cost, mu.weights, nu.weights);
        if (verify_cyclical_monotonicity(sol.plan, cost, 5).has_value())
            ++violations;
    }
    return {violations == 0, fmt("violations=%d cycle_len<=5", violations)};
}

// 7. Model-space distortion coefficients match the closed forms to 1e-9 on
//    1025 tau points for k in {-3,0,3}, n in {2,3,5}.
Outcome crit_model_space() {
    double worst = 0.0;
    for (double k : {-3.0, 0.0, 3.0})
        for (std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
            const double d = 1.0;
            const LQProblem p = model_space_problem(k, n, d);
            const double bigk = d * d * k / static_cast<double>(n - 1);
            const double theta = std::sqrt(std::abs(bigk));
            const DistortionCurve curve = distortion_curve(p, 1025);
            for (std::size_t i = 0; i < curve.taus.size(); ++i)
                worst = std::max(worst,
                                 std::abs(curve.betas[i] -
                                          model_beta(k, n, theta,
                                                     curve.taus[i])));
        }
    return {worst <= 1e-9, fmt("max_err=%.3g tol=1e-9", worst)};
}

// 8. W = R3 R1^{-1}: symmetric, positive definite on its window, Riccati
//    residual <= 1e-6. S = R3^{-1} R4: symmetric, max eig(Sdot) <= 1e-7.
//    50 seeded problems.
Outcome crit_w_s_lemmas() {
    Rng rng(3008);
    double w_sym = 0.0, w_ric = 0.0, s_sym = 0.0, s_dot = -1e300;
    double w_min_eig = 1e300;
    for (int rep = 0; rep < 50; ++rep) {
        const LQProblem p = random_problem(rng);
        const double win = w_window(p);
        for (double frac : {0.1, 0.25, 0.4, 0.55, 0.7}) {
            const double tau = frac * win;
            if (tau <= 1e-3) continue;
            const WMatrixResult w = w_matrix(p, tau);
            w_sym = std::max(w_sym, w.sym_residual);
            w_ric = std::max(w_ric, w.riccati_residual);
            w_min_eig = std::min(w_min_eig, w.min_eig);
        }
        for (double frac : {0.3, 0.475, 0.65, 0.825, 1.0}) {
            const SMatrixResult s = s_matrix(p, frac * p.T());
            s_sym = std::max(s_sym, s.sym_residual);
            s_dot = std::max(s_dot, s.s_dot_max_eig);
        }
    }
    const bool ok = w_sym <= 1e-9 && w_min_eig > 0.0 && w_ric <= 1e-6 &&
                    s_sym <= 1e-9 && s_dot <= 1e-7;
    return {ok, fmt("w_sym=%.2g w_min_eig=%.2g ric=%.2g s_sym=%.2g "
                    "sdot_max=%.2g",
                    w_sym, w_min_eig, w_ric, s_sym, s_dot)};
}

// 9. Jacobian determinant estimate: slack >= -1e-8 on a 32x32 (tau, s) grid
//    for Gaussian transports under 20 seeded problems.
Outcome crit_jacobian_estimate() {
    Rng rng(3009);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 4;
    double min_slack = 1e300;
    for (int rep = 0; rep < 20; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.8, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.8, 1.0);
        for (int sj = 1; sj <= 32; ++sj) {
            const double s = p.T() * static_cast<double>(sj) / 32.0;
            const Matrix grad = lq_transport_map(p, mu, nu, 0.0, s).linear;
            for (int ti = 1; ti <= 32; ++ti) {
                const double tau = s * static_cast<double>(ti) / 32.0;
                const JacobianEstimate est =
                    jacobian_estimate_check(p, grad, tau, s);
                min_slack = std::min(min_slack, est.slack);
            }
        }
    }
    return {min_slack >= -1e-8, fmt("min_slack=%.3g tol=-1e-8", min_slack)};
}

// 10. Density interpolation inequality: min slack >= -1e-8 over 1000 samples,
//     20 seeded Gaussian configurations, tau in {0.1T, ..., 0.9T}.
Outcome crit_density_inequality() {
    Rng rng(3010);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 3;
    double min_slack = 1e300;
    for (int rep = 0; rep < 20; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.7, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.7, 1.0);
        for (int k = 1; k <= 9; ++k) {
            const double tau = p.T() * static_cast<double>(k) / 10.0;
            min_slack = std::min(
                min_slack, density_inequality_check(p, mu, nu, tau, 1000,
                                                    5000 + rep));
        }
    }
    return {min_slack >= -1e-8, fmt("min_slack=%.3g tol=-1e-8", min_slack)};
}

// 11. Entropic inequality: slack >= -3 Monte-Carlo standard errors at 10^4
//     samples with U = neg_power(n), 10 seeded Gaussian configurations.
Outcome crit_entropic_inequality() {
    Rng rng(3011);
    RandomProblemOptions opts;
    opts.n_min = 2;
    opts.n_max = 4;
    double min_z = 1e300;
    for (int rep = 0; rep < 10; ++rep) {
        const LQProblem p = random_problem(rng, opts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.6, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.6, 1.0);
        const double tau = p.T() * (0.25 + 0.05 * (rep % 10));
        const EntropicCheck chk = entropic_inequality_check(
            p, dc_neg_power(static_cast<double>(n)), mu, nu, tau, 10000,
            6000 + rep);
        min_z = std::min(min_z, chk.slack / chk.std_error);
    }
    return {min_z >= -3.0, fmt("min_slack_sigmas=%.3g tol=-3", min_z)};
}

// 12. Interval-cost additivity along displacement interpolations: 0 +- 1e-6
//     (discrete, exact LP) and +- 3 sigma (Gaussian MC); strictly positive
//     for a constructed non-optimal curve.
Outcome crit_additivity() {
    Rng rng(3012);
    double worst_discrete = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const LQProblem p = random_problem(rng);
        const std::size_t n = p.n();
        const DiscreteMeasure mu = random_discrete(rng, 6, n, 1.0, false);
        const DiscreteMeasure nu = random_discrete(rng, 6, n, 1.0, false);
        const Vec grid{0.0, 0.37 * p.T(), p.T()};
        const MeasureCurve curve =
            displacement_interpolation(p, Measure(mu), Measure(nu), grid);
        const AdditivityResult res =
            additivity_check(p, curve, 0.0, grid[1], p.T());
        worst_discrete = std::max(worst_discrete, std::abs(res.gap));
    }

    double worst_z = 0.0;
    RandomProblemOptions gopts;
    gopts.n_min = 2;
    gopts.n_max = 3;
    for (int rep = 0; rep < 5; ++rep) {
        const LQProblem p = random_problem(rng, gopts);
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.7, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.7, 1.0);
        const Vec grid{0.0, 0.5 * p.T(), p.T()};
        const MeasureCurve curve =
            displacement_interpolation(p, Measure(mu), Measure(nu), grid);
        const AdditivityResult res = additivity_check(
            p, curve, 0.0, grid[1], p.T(), 10000, 7000 + rep);
        worst_z = std::max(worst_z, std::abs(res.gap) / res.std_error);
    }

    // Constructed non-optimal curve: swap two targets of an optimal matching.
    Rng rng_bad(3112);
    const LQProblem p = random_problem(rng_bad);
    const std::size_t n = p.n();
    const DiscreteMeasure mu = random_discrete(rng_bad, 4, n, 1.0, true);
    const DiscreteMeasure nu = random_discrete(rng_bad, 4, n, 1.0, true);
    const Matrix cost = cost_matrix_between(cost_matrices(p, 0.0, p.T()),
                                            mu.points, nu.points);
    const KantorovichSolution sol =
        solve_kantorovich(cost, mu.weights, nu.weights);
    std::vector<PlanEntry> twisted = sol.plan.entries;
    if (twisted.size() < 2) return {false, "degenerate bad-curve instance"};
    std::swap(twisted[0].j, twisted[1].j);
    const Vec grid{0.0, 0.5 * p.T(), p.T()};
    const DiscreteInterpolation bad =
        discrete_interpolation_from_plan(p, mu, nu, twisted, grid);
    const AdditivityResult bad_res =
        additivity_check(p, MeasureCurve(bad), 0.0, grid[1], p.T());

    const bool ok = worst_discrete <= 1e-6 && worst_z <= 3.0 &&
                    bad_res.gap > 1e-9;
    return {ok, fmt("discrete_gap=%.3g tol=1e-6 gauss_sigmas=%.2f tol=3 "
                    "bad_gap=%.3g>0",
                    worst_discrete, worst_z, bad_res.gap)};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        double limit_s;  // 0 means no pinned runtime limit
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"closed-form costs", 1.0, crit_closed_form_costs},
        {"conjugate times", 5.0, crit_conjugate_times},
        {"flow identities", 30.0, crit_flow_identities},
        {"action-cost consistency", 30.0, crit_action_cost},
        {"ot oracle equivalence", 60.0, crit_ot_oracle},
        {"cyclical monotonicity", 0.0, crit_cyclical_monotonicity},
        {"model-space coefficients", 10.0, crit_model_space},
        {"w/s matrix lemmas", 60.0, crit_w_s_lemmas},
        {"jacobian estimate", 60.0, crit_jacobian_estimate},
        {"density inequality", 120.0, crit_density_inequality},
        {"entropic inequality", 120.0, crit_entropic_inequality},
        {"interpolation additivity", 60.0, crit_additivity},
    };

    int failures = 0;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        std::string detail;
        try {
            const Outcome out = e.fn();
            ok = out.first;
            detail = out.second;
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        const bool in_time = e.limit_s <= 0.0 || elapsed < e.limit_s;
        const bool pass = ok && in_time;
        failures += pass ? 0 : 1;
        std::printf("[%s] %02d %-26s %s elapsed=%.2fs%s\n",
                    pass ? "PASS" : "FAIL", idx, e.name, detail.c_str(),
                    elapsed,
                    e.limit_s > 0.0
                        ? fmt(" limit=%.0fs%s", e.limit_s,
                              in_time ? "" : " EXCEEDED")
                              .c_str()
                        : "");
    }
    std::printf("%d/12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
