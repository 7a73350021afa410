#pragma once
// Exact Kantorovich solving between finitely supported measures: a dense
// transportation network simplex with dual potentials, c-transforms, a
// brute-force permutation oracle, and cyclical-monotonicity verification.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "lqot/matrix.hpp"

namespace lqot {

struct DiscreteMeasure {
  std::vector<Vec> points;
  Vec weights;
  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

// Validates: non-empty, consistent dimensions, strictly positive weights
// summing to 1 within 1e-12. Duplicate points are allowed.
DiscreteMeasure make_discrete(std::vector<Vec> points, Vec weights);

struct PlanEntry {
  std::size_t i = 0, j = 0;
  double w = 0.0;
};

struct TransportPlan {
  std::size_t n_source = 0, n_target = 0;
  Matrix matrix;                   // full N x M flow matrix
  std::vector<PlanEntry> entries;  // flows above the 1e-12 support threshold
};

struct PotentialPair {
  Vec psi;    // on source atoms, gauge psi[0] = 0
  Vec psi_c;  // on target atoms
};

struct KantorovichSolution {
  TransportPlan plan;
  PotentialPair potentials;
  double total_cost = 0.0;
};

// Exact LP solution. Costs may be negative. Weights must each sum to 1
// (within 1e-12), which is also the mutual feasibility condition.
KantorovichSolution solve_kantorovich(const Matrix& cost, const Vec& mu_w,
                                      const Vec& nu_w);

struct BruteForceResult {
  std::vector<std::size_t> permutation;
  double total_cost = 0.0;
};

// Exhaustive minimum over permutation couplings for uniform weights 1/N.
// Guarded at N <= 9.
BruteForceResult brute_force_oracle(const Matrix& cost);

Vec c_transform(const Vec& psi, const Matrix& cost);          // min_i psi_i + c(i,j)
Vec inverse_c_transform(const Vec& phi, const Matrix& cost);  // max_j phi_j - c(i,j)

struct CycleViolation {
  std::vector<std::size_t> entry_indices;  // indices into plan.entries
  double gap = 0.0;  // rearranged minus current cost around the cycle (< 0)
};

// Exhaustively checks every cycle of length <= cycle_len_max (<= 6) among the
// plan's carried atoms; nullopt means pass.
std::optional<CycleViolation> verify_cyclical_monotonicity(
    const TransportPlan& plan, const Matrix& cost, std::size_t cycle_len_max);

}  // namespace lqot
