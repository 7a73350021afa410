// Displacement interpolations, interval Kantorovich costs, the partition
// action of a measure curve, and additivity diagnostics.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "lqot/cost.hpp"
#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/measure.hpp"

namespace lqot {

// Discrete curve: one moving atom per coupled pair of the optimal plan.
// positions[k] stores the atoms at times[k], row-major (pairs.size() x n).
struct DiscreteInterpolation {
    Vec times;
    std::vector<PlanEntry> pairs;
    std::vector<Vec> positions;

    DiscreteMeasure measure_at(std::size_t node) const;
};

struct GaussianInterpolation {
    Vec times;
    std::vector<GaussianMeasure> measures;
    std::vector<AffineMap> maps;  // intermediate map at each node
};

using MeasureCurve = std::variant<DiscreteInterpolation, GaussianInterpolation>;

const Vec& curve_times(const MeasureCurve& curve);
Measure curve_measure_at(const MeasureCurve& curve, std::size_t node);

// Moves each coupled atom pair along its optimal trajectory; the grid must
// start at 0 and end at T. Both measures must be of the same kind.
MeasureCurve displacement_interpolation(const LQProblem& problem,
                                        const Measure& mu, const Measure& nu,
                                        const Vec& time_grid);

// Same atom transport for an explicitly supplied coupling (used to build
// deliberately non-optimal curves as well as the optimal one).
DiscreteInterpolation discrete_interpolation_from_plan(
    const LQProblem& problem, const DiscreteMeasure& mu,
    const DiscreteMeasure& nu, const std::vector<PlanEntry>& entries,
    const Vec& time_grid);

struct CostEstimate {
    double value = 0.0;
    double std_error = 0.0;  // zero for exact (discrete) evaluations
};

// Interval transport cost under c^{t,s}: exact LP for discrete inputs,
// Monte-Carlo over the closed-form coupling for Gaussian inputs.
CostEstimate kantorovich_cost(const LQProblem& problem, const Measure& mu,
                              const Measure& nu, double t, double s,
                              std::size_t samples = 10000,
                              std::uint64_t seed = 20240601);

// Sum of interval costs over the dyadic partition of [0, T] at each depth
// 0..dyadic_depth; values[d] is the depth-d sum.
struct ActionByDepth {
    Vec values;
    double value = 0.0;  // maximum over depths
};

ActionByDepth curve_action(const LQProblem& problem, const MeasureCurve& curve,
                           std::size_t dyadic_depth,
                           std::size_t samples = 10000,
                           std::uint64_t seed = 20240601);

struct AdditivityResult {
    double gap = 0.0;
    double std_error = 0.0;
};

// C^{t1,t2} + C^{t2,t3} - C^{t1,t3} between the curve's own nodes.
AdditivityResult additivity_check(const LQProblem& problem,
                                  const MeasureCurve& curve, double tau1,
                                  double tau2, double tau3,
                                  std::size_t samples = 10000,
                                  std::uint64_t seed = 20240601);

}  // namespace lqot
