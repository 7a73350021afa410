// Command-line front end: subcommands for flows, conjugate times, costs,
// transport plans, interpolations, distortion curves, model spaces, and the
// verification suites. JSON to stdout; CSV/JSON files via --out.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lqot/comparison.hpp"
#include "lqot/cost.hpp"
#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/interpolation.hpp"
#include "lqot/io.hpp"
#include "lqot/verify.hpp"

namespace {

using nlohmann::json;

json matrix_json(const lqot::Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vec_json(const lqot::Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

std::map<std::string, double> parse_tols(
    const std::vector<std::string>& raw) {
    std::map<std::string, double> out;
    for (const std::string& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            lqot::fail(lqot::ErrorCode::invalid_argument,
                       "--tol expects name=value, got: " + item);
        double value = 0.0;
        std::size_t used = 0;
        try {
            value = std::stod(item.substr(eq + 1), &used);
        } catch (const std::exception&) {
            lqot::fail(lqot::ErrorCode::invalid_argument,
                       "--tol value is not a number: " + item);
        }
        if (used != item.size() - eq - 1)
            lqot::fail(lqot::ErrorCode::invalid_argument,
                       "--tol value is not a number: " + item);
        out[item.substr(0, eq)] = value;
    }
    return out;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) lqot::write_text_file(out_path, text);
}

lqot::Vec single_atom(const lqot::Measure& m, const char* which) {
    const auto* d = std::get_if<lqot::DiscreteMeasure>(&m);
    if (!d || d->size() != 1)
        lqot::fail(lqot::ErrorCode::invalid_argument,
                   std::string(which) +
                       " must be a single-atom discrete measure");
    return d->points[0];
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run_flow(const std::string& problem_path, double tau,
             const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const lqot::FlowBlocks fb = lqot::flow_blocks(p, tau);
    const lqot::Matrix g = fb.assemble();
    const lqot::Matrix omega = lqot::symplectic_form(p.n());
    const double symplectic = (g.transpose() * omega * g - omega).max_abs();

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["tau"] = tau;
    j["R1"] = matrix_json(fb.R1);
    j["R2"] = matrix_json(fb.R2);
    j["R3"] = matrix_json(fb.R3);
    j["R4"] = matrix_json(fb.R4);
    j["residuals"] = {{"symplectic", symplectic}};
    j["tolerances"] = {{"symplectic", 1e-9}};
    emit(j, out_path);
    return 0;
}

int run_conjugate_time(const std::string& problem_path, double horizon,
                       const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const double hor = horizon > 0.0 ? horizon : 8.0 * p.T();
    const auto t_star = lqot::first_conjugate_time(p, hor);

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["horizon"] = hor;
    j["conjugate_time"] = t_star ? json(*t_star) : json(nullptr);
    j["tolerances"] = {{"conjugate_time", 1e-8}};
    emit(j, out_path);
    return 0;
}

int run_cost(const std::string& problem_path, const std::string& mu_path,
             const std::string& nu_path, std::int64_t grid,
             const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const lqot::Vec x = single_atom(lqot::load_measure(mu_path), "--mu");
    const lqot::Vec y = single_atom(lqot::load_measure(nu_path), "--nu");
    const lqot::CostMatrices cm = lqot::cost_matrices(p, 0.0, p.T());
    const double value = lqot::cost_eval(cm, x, y);

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["C"] = matrix_json(cm.C);
    j["D"] = matrix_json(cm.D);
    j["E"] = matrix_json(cm.E);
    j["x"] = vec_json(x);
    j["y"] = vec_json(y);
    j["value"] = value;
    j["lambda_bound"] = lqot::quadratic_bound_lambda(cm);
    j["tolerances"] = json::object();
    if (!out_path.empty()) {
        const std::size_t nodes = grid >= 3 ? static_cast<std::size_t>(grid)
                                            : 129;
        const lqot::Trajectory traj =
            lqot::optimal_trajectory(p, x, y, 0.0, p.T(), nodes);
        lqot::write_text_file(out_path, lqot::trajectory_to_csv(p, traj));
        j["out"] = out_path;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_transport(const std::string& problem_path, const std::string& mu_path,
                  const std::string& nu_path, std::uint64_t seed,
                  const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const lqot::Measure mu = lqot::load_measure(mu_path);
    const lqot::Measure nu = lqot::load_measure(nu_path);

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["seed"] = seed;
    if (lqot::is_discrete(mu) && lqot::is_discrete(nu)) {
        const auto& dmu = std::get<lqot::DiscreteMeasure>(mu);
        const auto& dnu = std::get<lqot::DiscreteMeasure>(nu);
        const lqot::CostMatrices cm = lqot::cost_matrices(p, 0.0, p.T());
        const lqot::Matrix cost =
            lqot::cost_matrix_between(cm, dmu.points, dnu.points);
        const lqot::KantorovichSolution sol =
            lqot::solve_kantorovich(cost, dmu.weights, dnu.weights);

        double marginal = 0.0;
        for (std::size_t i = 0; i < dmu.size(); ++i) {
            double row = 0.0;
            for (std::size_t c = 0; c < dnu.size(); ++c)
                row += sol.plan.matrix(i, c);
            marginal = std::max(marginal, std::abs(row - dmu.weights[i]));
        }
        for (std::size_t c = 0; c < dnu.size(); ++c) {
            double col = 0.0;
            for (std::size_t i = 0; i < dmu.size(); ++i)
                col += sol.plan.matrix(i, c);
            marginal = std::max(marginal, std::abs(col - dnu.weights[c]));
        }

        j["kind"] = "discrete";
        j["total_cost"] = sol.total_cost;
        j["psi"] = vec_json(sol.potentials.psi);
        j["psi_c"] = vec_json(sol.potentials.psi_c);
        j["support_size"] = sol.plan.entries.size();
        j["residuals"] = {{"marginal", marginal}};
        j["tolerances"] = {{"marginal", 1e-10}};
        if (!out_path.empty()) {
            lqot::write_text_file(out_path,
                                  ends_with(out_path, ".csv")
                                      ? lqot::plan_to_csv(sol.plan)
                                      : lqot::plan_to_json_text(sol.plan));
            j["out"] = out_path;
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (lqot::is_gaussian(mu) && lqot::is_gaussian(nu)) {
        const auto& gmu = std::get<lqot::GaussianMeasure>(mu);
        const auto& gnu = std::get<lqot::GaussianMeasure>(nu);
        const lqot::AffineMap map = lqot::lq_transport_map(p, gmu, gnu);
        const lqot::GaussianMeasure push = lqot::pushforward_gaussian(map, gmu);
        double mean_res = 0.0;
        for (std::size_t i = 0; i < p.n(); ++i)
            mean_res = std::max(mean_res,
                                std::abs(push.mean[i] - gnu.mean[i]));
        const double cov_res =
            (push.cov.mat() - gnu.cov.mat()).max_abs();
        const lqot::CostEstimate cost =
            lqot::kantorovich_cost(p, mu, nu, 0.0, p.T(), 10000, seed);

        j["kind"] = "gaussian";
        j["linear"] = matrix_json(map.linear);
        j["offset"] = vec_json(map.offset);
        j["cost"] = {{"value", cost.value},
                     {"std_error", cost.std_error},
                     {"samples", 10000}};
        j["residuals"] = {{"pushforward_mean", mean_res},
                          {"pushforward_cov", cov_res}};
        j["tolerances"] = {{"pushforward", 1e-9}};
        emit(j, out_path);
        return 0;
    }
    lqot::fail(lqot::ErrorCode::invalid_argument,
               "transport needs two discrete or two gaussian measures");
}

int run_interpolate(const std::string& problem_path,
                    const std::string& mu_path, const std::string& nu_path,
                    std::int64_t grid, std::uint64_t seed,
                    const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const lqot::Measure mu = lqot::load_measure(mu_path);
    const lqot::Measure nu = lqot::load_measure(nu_path);
    const std::size_t nodes = grid >= 2 ? static_cast<std::size_t>(grid) : 9;
    lqot::Vec tg(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        tg[i] = p.T() * static_cast<double>(i) / static_cast<double>(nodes - 1);
    const lqot::MeasureCurve curve =
        lqot::displacement_interpolation(p, mu, nu, tg);

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["seed"] = seed;
    j["nodes"] = nodes;
    j["kind"] = lqot::is_discrete(mu) ? "discrete" : "gaussian";
    if (nodes >= 3) {
        const double mid = lqot::curve_times(curve)[nodes / 2];
        const lqot::AdditivityResult add =
            lqot::additivity_check(p, curve, 0.0, mid, p.T(), 10000, seed);
        const double tol = lqot::is_discrete(mu)
                               ? 1e-6
                               : std::max(3.0 * add.std_error, 1e-12);
        j["additivity"] = {{"gap", add.gap},
                           {"std_error", add.std_error},
                           {"tolerance", tol},
                           {"pass", std::abs(add.gap) <= tol}};
        j["tolerances"] = {{"additivity", tol}};
    } else {
        j["tolerances"] = json::object();
    }
    if (!out_path.empty()) {
        lqot::write_text_file(out_path, lqot::curve_to_csv(curve));
        j["out"] = out_path;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_distortion(const std::string& problem_path, std::int64_t grid,
                   const std::string& out_path) {
    const lqot::LQProblem p = lqot::load_problem(problem_path);
    const std::size_t nodes = grid >= 2 ? static_cast<std::size_t>(grid) : 101;
    const lqot::DistortionCurve curve = lqot::distortion_curve(p, nodes);

    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["nodes"] = nodes;
    j["beta_0"] = curve.betas.front();
    j["beta_T"] = curve.betas.back();
    j["residuals"] = {{"endpoints", std::abs(curve.betas.front()) +
                                        std::abs(curve.betas.back() - 1.0)}};
    j["tolerances"] = {{"endpoints", 1e-12}};
    if (!out_path.empty()) {
        lqot::write_text_file(out_path, lqot::distortion_to_csv(curve));
        j["out"] = out_path;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_model_space(double k, std::size_t dim, double distance,
                    const std::string& out_path) {
    const lqot::LQProblem p = lqot::model_space_problem(k, dim, distance);
    json j;
    j["problem_hash"] = lqot::hash_hex(lqot::problem_hash(p));
    j["problem"] = json::parse(lqot::problem_to_json_text(p));
    std::cout << j.dump(2) << "\n";
    if (!out_path.empty())
        lqot::write_text_file(out_path, lqot::problem_to_json_text(p));
    return 0;
}

int run_verify(const std::string& suite, const std::string& problem_path,
               std::uint64_t seed, const std::vector<std::string>& tol_raw,
               std::size_t problems, std::size_t samples,
               const std::string& out_path) {
    lqot::VerifyOptions opts;
    opts.seed = seed;
    opts.tol = parse_tols(tol_raw);
    opts.problems = problems;
    opts.mc_samples = samples;
    if (!problem_path.empty()) opts.problem = lqot::load_problem(problem_path);

    std::vector<lqot::Report> reports;
    if (suite == "all")
        reports = lqot::verify_all(opts);
    else if (suite == "dynamics")
        reports = {lqot::verify_dynamics(opts)};
    else if (suite == "cost")
        reports = {lqot::verify_cost(opts)};
    else if (suite == "ot")
        reports = {lqot::verify_ot(opts)};
    else if (suite == "comparison")
        reports = {lqot::verify_comparison(opts)};
    else if (suite == "entropy")
        reports = {lqot::verify_entropy(opts)};
    else
        lqot::fail(lqot::ErrorCode::invalid_argument,
                   "unknown verify suite: " + suite);

    const std::string text = suite == "all"
                                 ? lqot::reports_to_json_text(reports)
                                 : lqot::report_to_json_text(reports[0]);
    std::cout << text;
    if (!out_path.empty()) lqot::write_text_file(out_path, text);
    for (const lqot::Report& r : reports)
        if (!r.all_pass()) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal transport with linear-quadratic control costs"};
    app.require_subcommand(1);

    std::string problem_path, mu_path, nu_path, out_path;
    double tau = 0.0;
    double horizon = 0.0;
    double k_curv = 0.0, distance = 1.0;
    std::int64_t grid = 0;
    std::uint64_t seed = 0;
    std::size_t dim = 2, problems = 4, samples = 5000;
    std::vector<std::string> tol_raw;
    std::string suite = "all";
    int rc = 0;

    auto* flow = app.add_subcommand("flow", "flow blocks at a time");
    flow->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    flow->add_option("--tau", tau, "evaluation time")->required();
    flow->add_option("--out", out_path, "also write the JSON to this file");
    flow->callback([&] { rc = run_flow(problem_path, tau, out_path); });

    auto* conj =
        app.add_subcommand("conjugate-time", "first conjugate time");
    conj->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    conj->add_option("--horizon", horizon,
                     "search horizon (default 8T)");
    conj->add_option("--out", out_path, "also write the JSON to this file");
    conj->callback(
        [&] { rc = run_conjugate_time(problem_path, horizon, out_path); });

    auto* cost = app.add_subcommand(
        "cost", "cost matrices and value between single atoms");
    cost->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    cost->add_option("--mu", mu_path, "single-atom source measure JSON")
        ->required();
    cost->add_option("--nu", nu_path, "single-atom target measure JSON")
        ->required();
    cost->add_option("--grid", grid,
                     "trajectory nodes for --out (default 129)");
    cost->add_option("--out", out_path, "write the optimal trajectory CSV");
    cost->callback(
        [&] { rc = run_cost(problem_path, mu_path, nu_path, grid, out_path); });

    auto* transport =
        app.add_subcommand("transport", "optimal plan or map");
    transport->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    transport->add_option("--mu", mu_path, "source measure JSON")->required();
    transport->add_option("--nu", nu_path, "target measure JSON")->required();
    transport->add_option("--seed", seed,
                          "Monte-Carlo seed for Gaussian cost estimates");
    transport->add_option("--out", out_path,
                          "write the plan (.csv for CSV, else JSON)");
    transport->callback([&] {
        rc = run_transport(problem_path, mu_path, nu_path, seed, out_path);
    });

    auto* interp =
        app.add_subcommand("interpolate", "displacement interpolation");
    interp->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    interp->add_option("--mu", mu_path, "source measure JSON")->required();
    interp->add_option("--nu", nu_path, "target measure JSON")->required();
    interp->add_option("--grid", grid, "curve nodes on [0, T] (default 9)");
    interp->add_option("--seed", seed,
                       "Monte-Carlo seed for Gaussian cost estimates");
    interp->add_option("--out", out_path, "write the curve CSV");
    interp->callback([&] {
        rc = run_interpolate(problem_path, mu_path, nu_path, grid, seed,
                             out_path);
    });

    auto* distortion =
        app.add_subcommand("distortion", "distortion coefficient curve");
    distortion->add_option("--problem", problem_path, "problem JSON file")
        ->required();
    distortion->add_option("--grid", grid,
                           "curve nodes on [0, T] (default 101)");
    distortion->add_option("--out", out_path, "write the tau,beta CSV");
    distortion->callback(
        [&] { rc = run_distortion(problem_path, grid, out_path); });

    auto* model =
        app.add_subcommand("model-space", "space-form model problem");
    model->add_option("--k", k_curv, "sectional curvature")->required();
    model->add_option("--dim", dim, "state dimension (>= 2)")->required();
    model->add_option("--distance", distance,
                      "geodesic distance between the endpoints")
        ->required();
    model->add_option("--out", out_path, "write the problem JSON");
    model->callback(
        [&] { rc = run_model_space(k_curv, dim, distance, out_path); });

    auto* verify = app.add_subcommand("verify", "verification suites");
    verify->add_option("suite", suite,
                       "all|dynamics|cost|ot|comparison|entropy");
    verify->add_option("--problem", problem_path,
                       "run against this problem instead of random ones");
    verify->add_option("--seed", seed, "seed for the instance stream");
    verify->add_option("--tol", tol_raw,
                       "tolerance overrides, name=value pairs");
    verify->add_option("--problems", problems,
                       "random problems per suite (default 4)");
    verify->add_option("--samples", samples,
                       "Monte-Carlo samples (default 5000)");
    verify->add_option("--out", out_path, "also write the report here");
    verify->callback([&] {
        rc = run_verify(suite, problem_path, seed, tol_raw, problems, samples,
                        out_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cout << lqot::error_envelope_json(
            lqot::ErrorCode::invalid_argument, e.what());
        return 1;
    } catch (const lqot::Error& e) {
        std::cout << lqot::error_envelope_json(e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        json j;
        j["error"] = {{"code", "internal_error"}, {"message", e.what()}};
        std::cout << j.dump(2) << "\n";
        return 1;
    }
    return rc;
}
