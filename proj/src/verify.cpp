#include "lqot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqot/comparison.hpp"
#include "lqot/cost.hpp"
#include "lqot/discrete.hpp"
#include "lqot/entropy.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/interpolation.hpp"
#include "lqot/kernels.hpp"
#include "lqot/random_instances.hpp"

namespace lqot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Suite {
  public:
    Suite(std::string name, const VerifyOptions& opts) : opts_(opts) {
        report_.suite = std::move(name);
        report_.seed = opts.seed;
        if (opts.problem)
            report_.problem_hash = hash_hex(problem_hash(*opts.problem));
    }

    // pass when value <= tolerance
    void residual(const std::string& name, double value, double def_tol) {
        const double tol = tolerance(name, def_tol);
        report_.checks.push_back(Check{name, value, tol, value <= tol});
    }

    // pass when value >= -tolerance
    void lower_bound(const std::string& name, double value, double def_tol) {
        const double tol = tolerance(name, def_tol);
        report_.checks.push_back(Check{name, value, tol, value >= -tol});
    }

    // pass when value > tolerance
    void above(const std::string& name, double value, double def_tol) {
        const double tol = tolerance(name, def_tol);
        report_.checks.push_back(Check{name, value, tol, value > tol});
    }

    Report take() { return std::move(report_); }

  private:
    double tolerance(const std::string& name, double def_tol) const {
        auto it = opts_.tol.find(name);
        return it == opts_.tol.end() ? def_tol : it->second;
    }

    const VerifyOptions& opts_;
    Report report_;
};

std::vector<LQProblem> suite_problems(const VerifyOptions& opts, Rng& rng,
                                      const RandomProblemOptions& popts) {
    if (opts.problem) return {*opts.problem};
    std::vector<LQProblem> out;
    out.reserve(opts.problems);
    for (std::size_t i = 0; i < opts.problems; ++i)
        out.push_back(random_problem(rng, popts));
    return out;
}

Vec random_point(Rng& rng, std::size_t n, double scale) {
    Vec x(n);
    for (double& v : x) v = scale * rng.normal();
    return x;
}

LQProblem rotation_problem(double T) {
    return LQProblem::create(Matrix(1, 1), Matrix::identity(1),
                             Matrix::identity(1), T);
}

}  // namespace

Report verify_dynamics(const VerifyOptions& opts) {
    Suite suite("dynamics", opts);
    Rng rng(opts.seed * 1000003 + 1);
    const auto problems = suite_problems(opts, rng, RandomProblemOptions{});

    double symplectic = 0.0, reflection = 0.0, group = 0.0, backwards = 0.0;
    double roundtrip = 0.0, endpoint = 0.0;
    for (const LQProblem& p : problems) {
        const std::size_t n = p.n();
        const Matrix omega = symplectic_form(n);
        const LQProblem back = backwards_problem(p);
        for (std::size_t k = 1; k <= 8; ++k) {
            const double tau = p.T() * static_cast<double>(k) / 8.0;
            const FlowBlocks fb = flow_blocks(p, tau);
            const FlowBlocks fn = flow_blocks(p, -tau);
            const Matrix g = fb.assemble();

            symplectic = std::max(
                symplectic,
                (g.transpose() * omega * g - omega).max_abs());
            reflection = std::max(
                reflection, (fb.R1.transpose() - fn.R4).max_abs());
            reflection = std::max(
                reflection, (fb.R2.transpose() + fn.R2).max_abs());
            reflection = std::max(
                reflection, (fb.R3.transpose() + fn.R3).max_abs());

            const double half = 0.4 * tau;
            const Matrix g2 =
                flow_blocks(p, half).assemble() *
                flow_blocks(p, tau - half).assemble();
            group = std::max(group, (g - g2).max_abs());

            const FlowBlocks bb = flow_blocks(back, tau);
            backwards = std::max(backwards, (bb.R1 - fn.R1).max_abs());
            backwards = std::max(backwards, (bb.R2 + fn.R2).max_abs());
            backwards = std::max(backwards, (bb.R3 + fn.R3).max_abs());
            backwards = std::max(backwards, (bb.R4 - fn.R4).max_abs());
        }
        for (std::size_t k = 0; k < 4; ++k) {
            const Vec x = random_point(rng, n, 1.0);
            const Vec y = random_point(rng, n, 1.0);
            const Vec p0 = exp_map_inverse(p, x, y, p.T());
            const Vec yy = exp_map(p, x, p0, p.T());
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                r = std::max(r, std::abs(yy[i] - y[i]));
            roundtrip = std::max(roundtrip, r);

            const Trajectory traj = optimal_trajectory(p, x, y, 0.0, p.T(), 65);
            double e = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                e = std::max(e, std::abs(traj.states.front()[i] - x[i]));
                e = std::max(e, std::abs(traj.states.back()[i] - y[i]));
            }
            endpoint = std::max(endpoint, e);
        }
    }
    suite.residual("symplectic_residual", symplectic, 1e-9);
    suite.residual("time_reflection_residual", reflection, 1e-9);
    suite.residual("group_law_residual", group, 1e-9);
    suite.residual("backwards_flow_residual", backwards, 1e-9);
    suite.residual("exp_map_roundtrip", roundtrip, 1e-8);
    suite.residual("trajectory_endpoint", endpoint, 1e-9);

    const auto t_star = first_conjugate_time(rotation_problem(1.0), 4.0);
    suite.residual("conjugate_time_reference",
                   t_star ? std::abs(*t_star - 3.141592653589793) : kInf,
                   1e-8);
    return suite.take();
}

Report verify_cost(const VerifyOptions& opts) {
    Suite suite("cost", opts);
    Rng rng(opts.seed * 1000003 + 2);

    {
        const LQProblem rot = rotation_problem(1.5707963267948966);
        const CostMatrices cm = cost_matrices(rot, 0.0, rot.T());
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const double x = -2.0 + 4.0 * i / 9.0;
                const double y = -2.0 + 4.0 * j / 9.0;
                worst = std::max(worst,
                                 std::abs(cost_eval(cm, {x}, {y}) + x * y));
            }
        suite.residual("closed_form_cost_rotation", worst, 1e-10);
    }
    {
        const LQProblem shear = LQProblem::create(
            Matrix::identity(1), Matrix::identity(1), Matrix::identity(1),
            1.0);
        const CostMatrices cm = cost_matrices(shear, 0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const double x = -2.0 + 4.0 * i / 9.0;
                const double y = -2.0 + 4.0 * j / 9.0;
                worst = std::max(worst, std::abs(cost_eval(cm, {x}, {y}) -
                                                 (x * x - x * y)));
            }
        suite.residual("closed_form_cost_shear", worst, 1e-10);
    }

    const auto problems = suite_problems(opts, rng, RandomProblemOptions{});
    double action = 0.0, grad = 0.0, min_gap = kInf, eq_gap = 0.0;
    double lambda_slack = kInf;
    for (const LQProblem& p : problems) {
        const std::size_t n = p.n();
        const CostMatrices cm = cost_matrices(p, 0.0, p.T());
        const double lambda = quadratic_bound_lambda(cm);
        for (std::size_t k = 0; k < 4; ++k) {
            const Vec x = random_point(rng, n, 1.0);
            const Vec y = random_point(rng, n, 1.0);
            const Trajectory traj =
                optimal_trajectory(p, x, y, 0.0, p.T(), 2049);
            action = std::max(
                action, std::abs(action_eval(p, traj) - cost_eval(cm, x, y)));

            const Vec g = cost_grad_x(cm, x, y);
            const Vec p0 = exp_map_inverse(p, x, y, p.T());
            for (std::size_t i = 0; i < n; ++i)
                grad = std::max(grad, std::abs(p0[i] + g[i]));

            const double t2 = p.T() * (0.2 + 0.6 * rng.uniform());
            const Vec z = random_point(rng, n, 1.0);
            min_gap = std::min(
                min_gap, subadditivity_gap(p, x, z, y, 0.0, t2, p.T()));

            const std::size_t mid = traj.times.size() / 2;
            eq_gap = std::max(
                eq_gap,
                std::abs(subadditivity_gap(p, x, traj.states[mid], y, 0.0,
                                           traj.times[mid], p.T())));

            lambda_slack = std::min(
                lambda_slack, lambda * (dot(x, x) + dot(y, y)) -
                                  std::abs(cost_eval(cm, x, y)));
        }
    }
    suite.residual("action_cost_consistency", action, 1e-6);
    suite.residual("grad_consistency", grad, 1e-8);
    suite.lower_bound("subadditivity_min_gap", min_gap, 1e-9);
    suite.residual("subadditivity_equality", eq_gap, 1e-7);
    suite.lower_bound("quadratic_bound_min_slack", lambda_slack, 1e-9);
    return suite.take();
}

Report verify_ot(const VerifyOptions& opts) {
    Suite suite("ot", opts);
    Rng rng(opts.seed * 1000003 + 3);

    const std::size_t instances = std::max<std::size_t>(opts.problems * 5, 10);
    double oracle = 0.0, feas = 0.0, duality = 0.0, marginals = 0.0;
    double ctrans = 0.0, mono_gap = 0.0;
    for (std::size_t inst = 0; inst < instances; ++inst) {
        const std::size_t N = 2 + rng.index(6);  // 2..7
        Matrix cost(N, N);
        for (std::size_t i = 0; i < N * N; ++i)
            cost.data()[i] = 2.0 * rng.normal();
        const Vec w(N, 1.0 / static_cast<double>(N));

        const KantorovichSolution sol = solve_kantorovich(cost, w, w);
        const BruteForceResult oracle_sol = brute_force_oracle(cost);
        oracle = std::max(oracle,
                          std::abs(sol.total_cost - oracle_sol.total_cost));

        const Vec& psi = sol.potentials.psi;
        const Vec& psi_c = sol.potentials.psi_c;
        double dual_value = 0.0;
        for (std::size_t i = 0; i < N; ++i) dual_value += -psi[i] * w[i];
        for (std::size_t j = 0; j < N; ++j) dual_value += psi_c[j] * w[j];
        duality = std::max(duality, std::abs(dual_value - sol.total_cost));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                feas = std::max(feas, -psi[i] + psi_c[j] - cost(i, j));

        const Vec ct = c_transform(psi, cost);
        for (std::size_t j = 0; j < N; ++j)
            ctrans = std::max(ctrans, std::abs(ct[j] - psi_c[j]));

        for (std::size_t i = 0; i < N; ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                row += sol.plan.matrix(i, j);
                col += sol.plan.matrix(j, i);
            }
            marginals = std::max(marginals, std::abs(row - w[i]));
            marginals = std::max(marginals, std::abs(col - w[i]));
        }

        const auto violation =
            verify_cyclical_monotonicity(sol.plan, cost, 5);
        if (violation)
            mono_gap = std::min(mono_gap, violation->gap);
    }
    suite.residual("oracle_total_cost", oracle, 1e-9);
    suite.residual("dual_feasibility", feas, 1e-9);
    suite.residual("strong_duality", duality, 1e-9);
    suite.residual("c_transform_consistency", ctrans, 1e-9);
    suite.residual("marginal_residual", marginals, 1e-10);
    suite.lower_bound("cyclical_monotonicity_gap", mono_gap, 1e-9);
    return suite.take();
}

Report verify_comparison(const VerifyOptions& opts) {
    Suite suite("comparison", opts);
    Rng rng(opts.seed * 1000003 + 4);

    {
        double worst = 0.0;
        const double ks[] = {-3.0, 0.0, 3.0};
        for (double k : ks) {
            const LQProblem p = model_space_problem(k, 3, 1.0);
            const double K = k / 2.0;
            const double theta = std::sqrt(std::abs(K));
            const DistortionCurve curve = distortion_curve(p, 257);
            for (std::size_t i = 0; i < curve.taus.size(); ++i)
                worst = std::max(worst,
                                 std::abs(curve.betas[i] -
                                          model_beta(k, 3, theta,
                                                     curve.taus[i])));
        }
        suite.residual("model_beta_residual", worst, 1e-9);
    }

    const auto problems = suite_problems(opts, rng, RandomProblemOptions{});
    double backwards = 0.0, w_sym = 0.0, w_ric = 0.0, w_eig = kInf;
    double s_sym = 0.0, s_dot = -kInf, jac_slack = kInf, mc_res = 0.0;
    double endpoints = 0.0;
    for (const LQProblem& p : problems) {
        const LQProblem back = backwards_problem(p);
        for (std::size_t k = 1; k <= 8; ++k) {
            const double tau = p.T() * static_cast<double>(k) / 8.0;
            backwards = std::max(
                backwards, std::abs(distortion_coefficient(p, tau) -
                                    distortion_coefficient(back, tau)));
        }
        endpoints = std::max(
            endpoints, std::abs(distortion_coefficient(p, p.T()) - 1.0) +
                           std::abs(distortion_coefficient(p, 0.0)));

        const double window = w_window(p);
        for (std::size_t k = 1; k <= 6; ++k) {
            const double tau = 0.8 * window * static_cast<double>(k) / 6.0;
            const WMatrixResult w = w_matrix(p, tau);
            w_sym = std::max(w_sym, w.sym_residual);
            w_ric = std::max(w_ric, w.riccati_residual);
            if (tau > 0.05 * window) w_eig = std::min(w_eig, w.min_eig);
        }
        for (std::size_t k = 0; k <= 6; ++k) {
            const double tau =
                p.T() * (0.25 + 0.75 * static_cast<double>(k) / 6.0);
            const SMatrixResult s = s_matrix(p, tau);
            s_sym = std::max(s_sym, s.sym_residual);
            s_dot = std::max(s_dot, s.s_dot_max_eig);
        }

        const GaussianMeasure mu = random_gaussian(rng, p.n(), 0.5, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, p.n(), 0.5, 1.0);
        for (std::size_t a = 1; a <= 4; ++a) {
            const double s = p.T() * static_cast<double>(a) / 4.0;
            const Matrix grad = lq_transport_map(p, mu, nu, 0.0, s).linear;
            for (std::size_t b = 1; b <= a; ++b) {
                const double tau = s * static_cast<double>(b) /
                                   static_cast<double>(a);
                jac_slack = std::min(
                    jac_slack,
                    jacobian_estimate_check(p, grad, tau, s).slack);
            }
        }

        const double tau_mc = 0.5 * p.T();
        const Vec x = random_point(rng, p.n(), 1.0);
        const Vec y = random_point(rng, p.n(), 1.0);
        mc_res = std::max(
            mc_res, std::abs(distortion_mc_estimate(p, x, y, tau_mc, 0.5,
                                                    1000, opts.seed + 7) -
                             distortion_coefficient(p, tau_mc)));
    }
    suite.residual("distortion_endpoints", endpoints, 1e-12);
    suite.residual("backwards_distortion_residual", backwards, 1e-10);
    suite.residual("w_symmetry", w_sym, 1e-9);
    suite.above("w_min_eig", w_eig, 0.0);
    suite.residual("w_riccati_residual", w_ric, 1e-6);
    suite.residual("s_symmetry", s_sym, 1e-9);
    suite.residual("s_dot_max_eig", s_dot, 1e-7);
    suite.lower_bound("jacobian_min_slack", jac_slack, 1e-8);
    suite.residual("distortion_mc_residual", mc_res, 1e-10);
    return suite.take();
}

Report verify_entropy(const VerifyOptions& opts) {
    Suite suite("entropy", opts);
    Rng rng(opts.seed * 1000003 + 5);

    {
        std::size_t mismatches = 0;
        mismatches += !dc_membership(dc_power(1.0), 2.0);
        mismatches += !dc_membership(dc_power(2.0), 3.0);
        mismatches += !dc_membership(dc_neg_power(3.0), 3.0);
        mismatches += !dc_membership(dc_neg_power(3.0), 2.0);
        mismatches += dc_membership(dc_neg_power(3.0), 4.0);
        mismatches += !dc_membership(dc_xlogx(), kInf);
        mismatches += !dc_membership(dc_xlogx(), 3.0);
        suite.residual("dc_membership_mismatches",
                       static_cast<double>(mismatches), 0.0);
    }

    RandomProblemOptions popts;
    popts.n_min = 2;
    popts.n_max = 3;
    const auto problems = suite_problems(opts, rng, popts);

    double zscore = 0.0, density = kInf, one_sided = kInf;
    double entropic = kInf;
    for (const LQProblem& p : problems) {
        const std::size_t n = p.n();
        const GaussianMeasure mu = random_gaussian(rng, n, 0.4, 1.0);
        const GaussianMeasure nu = random_gaussian(rng, n, 0.4, 1.0);

        if (n >= 2) {
            const EntropyEstimate est = entropy_functional(
                dc_neg_power(static_cast<double>(n)), mu, opts.mc_samples,
                opts.seed + 11);
            if (est.analytic)
                zscore = std::max(zscore, std::abs(est.value - *est.analytic) /
                                              std::max(est.std_error, 1e-300));
        }

        for (std::size_t k = 1; k <= 5; ++k) {
            const double tau = p.T() * static_cast<double>(k) / 6.0;
            density = std::min(
                density, density_inequality_check(p, mu, nu, tau, 200,
                                                  opts.seed + 13));
        }

        const GaussianMeasure narrow =
            make_gaussian(nu.mean, 1e-4 * Matrix::identity(n));
        one_sided = std::min(
            one_sided,
            density_inequality_check(p, mu, narrow, 0.5 * p.T(), 200,
                                     opts.seed + 17, true));

        const DCFunction u =
            n >= 2 ? dc_neg_power(static_cast<double>(n)) : dc_xlogx();
        const EntropicCheck check = entropic_inequality_check(
            p, u, mu, nu, 0.5 * p.T(), opts.mc_samples, opts.seed + 19);
        entropic = std::min(entropic,
                            check.slack / std::max(check.std_error, 1e-300));
    }
    suite.residual("entropy_analytic_zscore", zscore, 3.0);
    suite.lower_bound("density_min_slack", density, 1e-8);
    suite.lower_bound("density_one_sided_min_slack", one_sided, 1e-8);
    suite.lower_bound("entropic_min_slack_sigma", entropic, 3.0);
    return suite.take();
}

std::vector<Report> verify_all(const VerifyOptions& opts) {
    std::vector<Report> reports;
    reports.push_back(verify_dynamics(opts));
    reports.push_back(verify_cost(opts));
    reports.push_back(verify_ot(opts));
    reports.push_back(verify_comparison(opts));
    reports.push_back(verify_entropy(opts));
    return reports;
}

}  // namespace lqot
