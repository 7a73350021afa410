#include "lqot/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lqot/error.hpp"
#include "lqot/kernels.hpp"

namespace lqot {

namespace {

double grid_tol(double T) { return 1e-9 * std::max(1.0, T); }

void validate_grid(const Vec& grid, double T) {
    if (grid.size() < 2)
        fail(ErrorCode::invalid_argument, "time grid needs at least two nodes");
    for (double v : grid)
        if (!std::isfinite(v))
            fail(ErrorCode::invalid_argument, "time grid must be finite");
    if (std::abs(grid.front()) > grid_tol(T))
        fail(ErrorCode::invalid_argument, "time grid must start at 0");
    if (std::abs(grid.back() - T) > grid_tol(T))
        fail(ErrorCode::invalid_argument, "time grid must end at T");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            fail(ErrorCode::invalid_argument,
                 "time grid must be strictly increasing");
}

std::size_t find_node(const Vec& times, double tau, double T) {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - tau) <= grid_tol(T)) return k;
    fail(ErrorCode::invalid_argument,
         "requested time is not a node of the curve grid");
}

CostEstimate gaussian_interval_cost(const LQProblem& problem,
                                    const GaussianMeasure& mu,
                                    const GaussianMeasure& nu, double t,
                                    double s, std::size_t samples,
                                    std::uint64_t seed) {
    if (samples < 2)
        fail(ErrorCode::invalid_argument, "need at least two samples");
    const std::size_t n = problem.n();
    const AffineMap map = lq_transport_map(problem, mu, nu, t, s);
    const CostMatrices cm = cost_matrices(problem, t, s);

    Vec xs = sample_gaussian(mu, samples, Rng(seed));
    Vec ys(samples * n);
    const Matrix lin_t = map.linear.transpose();
    kernels::batch_affine(samples, n, n, xs.data(), lin_t.data(),
                          map.offset.data(), ys.data());

    Vec qx(samples), qy(samples);
    kernels::batch_quadform(samples, n, xs.data(), cm.C.data(), qx.data());
    kernels::batch_quadform(samples, n, ys.data(), cm.E.data(), qy.data());
    Vec dy(samples * n);
    const Matrix d_t = cm.D.transpose();
    const Vec zero_shift(n, 0.0);
    kernels::batch_affine(samples, n, n, ys.data(), d_t.data(),
                          zero_shift.data(), dy.data());

    Vec vals(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        double cross = kernels::dot(n, xs.data() + k * n, dy.data() + k * n);
        vals[k] = 0.5 * qx[k] + cross + 0.5 * qy[k];
    }
    const double mean =
        kernels::sum(samples, vals.data()) / static_cast<double>(samples);
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double std_error =
        std::sqrt(ss / (static_cast<double>(samples) - 1.0) /
                  static_cast<double>(samples));
    return CostEstimate{mean, std_error};
}

}  // namespace

std::size_t measure_dim(const Measure& m) {
    return std::visit([](const auto& v) { return v.dim(); }, m);
}

DiscreteMeasure DiscreteInterpolation::measure_at(std::size_t node) const {
    if (node >= times.size())
        fail(ErrorCode::invalid_argument, "curve node index out of range");
    const std::size_t count = pairs.size();
    const std::size_t n = positions[node].size() / count;
    std::vector<Vec> pts(count);
    Vec weights(count);
    for (std::size_t k = 0; k < count; ++k) {
        pts[k].assign(positions[node].begin() + static_cast<long>(k * n),
                      positions[node].begin() + static_cast<long>((k + 1) * n));
        weights[k] = pairs[k].w;
    }
    return make_discrete(std::move(pts), std::move(weights));
}

const Vec& curve_times(const MeasureCurve& curve) {
    return std::visit([](const auto& c) -> const Vec& { return c.times; },
                      curve);
}

Measure curve_measure_at(const MeasureCurve& curve, std::size_t node) {
    if (const auto* d = std::get_if<DiscreteInterpolation>(&curve))
        return Measure{d->measure_at(node)};
    const auto& g = std::get<GaussianInterpolation>(curve);
    if (node >= g.measures.size())
        fail(ErrorCode::invalid_argument, "curve node index out of range");
    return Measure{g.measures[node]};
}

DiscreteInterpolation discrete_interpolation_from_plan(
    const LQProblem& problem, const DiscreteMeasure& mu,
    const DiscreteMeasure& nu, const std::vector<PlanEntry>& entries,
    const Vec& time_grid) {
    const std::size_t n = problem.n();
    if (mu.dim() != n || nu.dim() != n)
        fail(ErrorCode::dimension_mismatch,
             "measures must match the state dimension");
    if (entries.empty())
        fail(ErrorCode::invalid_argument, "coupling has no carried atoms");
    validate_grid(time_grid, problem.T());

    const std::size_t count = entries.size();
    double total_w = 0.0;
    for (const PlanEntry& e : entries) {
        if (e.i >= mu.size() || e.j >= nu.size())
            fail(ErrorCode::invalid_argument, "coupling index out of range");
        if (!(e.w > 0.0))
            fail(ErrorCode::invalid_argument, "coupling weights must be positive");
        total_w += e.w;
    }

    DiscreteInterpolation curve;
    curve.times = time_grid;
    curve.times.front() = 0.0;
    curve.times.back() = problem.T();
    curve.pairs = entries;
    for (PlanEntry& e : curve.pairs) e.w /= total_w;

    Matrix x0(count, n), p0(count, n);
    for (std::size_t k = 0; k < count; ++k) {
        const Vec& x = mu.points[entries[k].i];
        const Vec& y = nu.points[entries[k].j];
        Vec p = exp_map_inverse(problem, x, y, problem.T());
        for (std::size_t c = 0; c < n; ++c) {
            x0(k, c) = x[c];
            p0(k, c) = p[c];
        }
    }

    curve.positions.reserve(curve.times.size());
    for (double tau : curve.times) {
        const FlowBlocks fb = flow_blocks(problem, tau);
        Matrix pos = p0 * fb.R3.transpose() + x0 * fb.R4.transpose();
        curve.positions.push_back(Vec(pos.data(), pos.data() + count * n));
    }
    return curve;
}

MeasureCurve displacement_interpolation(const LQProblem& problem,
                                        const Measure& mu, const Measure& nu,
                                        const Vec& time_grid) {
    if (is_discrete(mu) && is_discrete(nu)) {
        const auto& dmu = std::get<DiscreteMeasure>(mu);
        const auto& dnu = std::get<DiscreteMeasure>(nu);
        const CostMatrices cm = cost_matrices(problem, 0.0, problem.T());
        const Matrix cost = cost_matrix_between(cm, dmu.points, dnu.points);
        const KantorovichSolution sol =
            solve_kantorovich(cost, dmu.weights, dnu.weights);
        return MeasureCurve{discrete_interpolation_from_plan(
            problem, dmu, dnu, sol.plan.entries, time_grid)};
    }
    if (is_gaussian(mu) && is_gaussian(nu)) {
        const auto& gmu = std::get<GaussianMeasure>(mu);
        const auto& gnu = std::get<GaussianMeasure>(nu);
        validate_grid(time_grid, problem.T());
        const AffineMap psi = psi_gradient_map(problem, gmu, gnu);
        GaussianInterpolation curve;
        curve.times = time_grid;
        curve.times.front() = 0.0;
        curve.times.back() = problem.T();
        for (double tau : curve.times) {
            const FlowBlocks fb = flow_blocks(problem, tau);
            AffineMap map{fb.R3 * psi.linear + fb.R4, fb.R3.apply(psi.offset)};
            curve.measures.push_back(pushforward_gaussian(map, gmu));
            curve.maps.push_back(std::move(map));
        }
        return MeasureCurve{std::move(curve)};
    }
    fail(ErrorCode::invalid_argument,
         "measures must both be discrete or both be Gaussian");
}

CostEstimate kantorovich_cost(const LQProblem& problem, const Measure& mu,
                              const Measure& nu, double t, double s,
                              std::size_t samples, std::uint64_t seed) {
    if (measure_dim(mu) != problem.n() || measure_dim(nu) != problem.n())
        fail(ErrorCode::dimension_mismatch,
             "measures must match the state dimension");
    if (is_discrete(mu) && is_discrete(nu)) {
        const auto& dmu = std::get<DiscreteMeasure>(mu);
        const auto& dnu = std::get<DiscreteMeasure>(nu);
        const CostMatrices cm = cost_matrices(problem, t, s);
        const Matrix cost = cost_matrix_between(cm, dmu.points, dnu.points);
        const KantorovichSolution sol =
            solve_kantorovich(cost, dmu.weights, dnu.weights);
        return CostEstimate{sol.total_cost, 0.0};
    }
    if (is_gaussian(mu) && is_gaussian(nu))
        return gaussian_interval_cost(problem, std::get<GaussianMeasure>(mu),
                                      std::get<GaussianMeasure>(nu), t, s,
                                      samples, seed);
    fail(ErrorCode::invalid_argument,
         "measures must both be discrete or both be Gaussian");
}

ActionByDepth curve_action(const LQProblem& problem, const MeasureCurve& curve,
                           std::size_t dyadic_depth, std::size_t samples,
                           std::uint64_t seed) {
    if (dyadic_depth > 12)
        fail(ErrorCode::invalid_argument, "dyadic depth is capped at 12");
    const double T = problem.T();
    const Vec& times = curve_times(curve);

    ActionByDepth out;
    for (std::size_t d = 0; d <= dyadic_depth; ++d) {
        const std::size_t intervals = std::size_t{1} << d;
        double sum = 0.0;
        for (std::size_t i = 0; i < intervals; ++i) {
            const double t0 = T * static_cast<double>(i) /
                              static_cast<double>(intervals);
            const double t1 = T * static_cast<double>(i + 1) /
                              static_cast<double>(intervals);
            const std::size_t k0 = find_node(times, t0, T);
            const std::size_t k1 = find_node(times, t1, T);
            const std::uint64_t interval_seed = seed + 8191 * d + i;
            sum += kantorovich_cost(problem, curve_measure_at(curve, k0),
                                    curve_measure_at(curve, k1), times[k0],
                                    times[k1], samples, interval_seed)
                       .value;
        }
        out.values.push_back(sum);
    }
    out.value = *std::max_element(out.values.begin(), out.values.end());
    return out;
}

AdditivityResult additivity_check(const LQProblem& problem,
                                  const MeasureCurve& curve, double tau1,
                                  double tau2, double tau3,
                                  std::size_t samples, std::uint64_t seed) {
    if (!(tau1 < tau2) || !(tau2 < tau3))
        fail(ErrorCode::invalid_argument,
             "additivity check needs tau1 < tau2 < tau3");
    const double T = problem.T();
    const Vec& times = curve_times(curve);
    const std::size_t k1 = find_node(times, tau1, T);
    const std::size_t k2 = find_node(times, tau2, T);
    const std::size_t k3 = find_node(times, tau3, T);
    const Measure m1 = curve_measure_at(curve, k1);
    const Measure m2 = curve_measure_at(curve, k2);
    const Measure m3 = curve_measure_at(curve, k3);
    const CostEstimate c12 = kantorovich_cost(problem, m1, m2, times[k1],
                                              times[k2], samples, seed);
    const CostEstimate c23 = kantorovich_cost(problem, m2, m3, times[k2],
                                              times[k3], samples, seed + 1);
    const CostEstimate c13 = kantorovich_cost(problem, m1, m3, times[k1],
                                              times[k3], samples, seed + 2);
    const double gap = c12.value + c23.value - c13.value;
    const double std_error =
        std::sqrt(c12.std_error * c12.std_error +
                  c23.std_error * c23.std_error +
                  c13.std_error * c13.std_error);
    return AdditivityResult{gap, std_error};
}

}  // namespace lqot
