#include "lqot/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "lqot/kernels.hpp"

namespace lqot {

DiscreteMeasure make_discrete(std::vector<Vec> points, Vec weights) {
  if (points.empty() || points.size() != weights.size())
    fail(ErrorCode::invalid_argument,
         "discrete measure needs matching non-empty points and weights");
  const std::size_t d = points[0].size();
  if (d == 0) fail(ErrorCode::invalid_argument, "points must be non-empty vectors");
  double total = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != d)
      fail(ErrorCode::dimension_mismatch, "point dimension mismatch");
    for (double v : points[k])
      if (!std::isfinite(v))
        fail(ErrorCode::invalid_argument, "points must be finite");
    if (!(weights[k] > 0.0))
      fail(ErrorCode::invalid_argument, "weights must be strictly positive");
    total += weights[k];
  }
  if (std::fabs(total - 1.0) > 1e-12)
    fail(ErrorCode::invalid_argument, "weights must sum to 1");
  return DiscreteMeasure{std::move(points), std::move(weights)};
}

namespace {

constexpr double kSupportEps = 1e-12;

// Transportation simplex over the dense bipartite graph. Nodes 0..N-1 are
// sources, N..N+M-1 sinks. The basis is a spanning tree of N+M-1 arcs.
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, const Vec& a, const Vec& b)
      : cost_(cost), n_(a.size()), m_(b.size()), a_(a), b_(b) {
    // Tiny distinct perturbations break degeneracy generically; the final
    // flows are recomputed from the optimal tree with the exact weights, and
    // optimality of a tree does not depend on the supplies at all.
    const double delta = 1e-11 / static_cast<double>(n_ + m_);
    double added = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d = delta * static_cast<double>(i + 1);
      a_[i] += d;
      added += d;
    }
    b_[m_ - 1] += added;
  }

  void solve() {
    build_initial_basis();
    compute_duals();
    const double scale = std::max(1.0, cost_.max_abs());
    const double opt_tol = 1e-11 * scale;
    const std::size_t max_pivots = 400000;
    std::size_t stall = 0;
    bool bland = false;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      std::size_t ei = 0, ej = 0;
      if (!find_entering(opt_tol, bland, ei, ej)) return;
      const double moved = pivot(ei, ej);
      if (moved <= kSupportEps) {
        if (++stall > 64 * (n_ + m_)) bland = true;
      } else {
        stall = 0;
      }
      compute_duals();
    }
    fail(ErrorCode::no_convergence, "transportation simplex did not converge");
  }

  // Flows determined by the optimal tree under the exact (unperturbed)
  // weights, via leaf stripping.
  Matrix exact_flows(const Vec& a, const Vec& b) const {
    Matrix flow(n_, m_);
    std::vector<double> residual(n_ + m_);
    for (std::size_t i = 0; i < n_; ++i) residual[i] = a[i];
    for (std::size_t j = 0; j < m_; ++j) residual[n_ + j] = b[j];
    std::vector<std::size_t> degree(n_ + m_, 0);
    std::vector<char> arc_done(arcs_.size(), 0);
    for (const auto& arc : arcs_) {
      ++degree[arc.first];
      ++degree[arc.second];
    }
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < n_ + m_; ++v)
      if (degree[v] == 1) queue.push_back(v);
    while (!queue.empty()) {
      const std::size_t v = queue.back();
      queue.pop_back();
      if (degree[v] == 0) continue;
      std::size_t arc_idx = arcs_.size();
      for (std::size_t idx : adj_[v])
        if (!arc_done[idx]) {
          arc_idx = idx;
          break;
        }
      if (arc_idx == arcs_.size()) continue;
      const auto [s, t] = arcs_[arc_idx];
      const std::size_t other = (s == v) ? t : s;
      const double f = std::max(residual[v], 0.0);
      flow(s, t - n_) = f;
      residual[v] = 0.0;
      residual[other] -= f;
      arc_done[arc_idx] = 1;
      --degree[v];
      if (--degree[other] == 1) queue.push_back(other);
    }
    return flow;
  }

  const Vec& duals_u() const { return u_; }
  const Vec& duals_v() const { return v_; }

 private:
  void add_arc(std::size_t i, std::size_t j) {
    adj_[i].push_back(arcs_.size());
    adj_[n_ + j].push_back(arcs_.size());
    arcs_.emplace_back(i, n_ + j);
    flows_.push_back(0.0);
  }

  void remove_arc(std::size_t idx) {
    auto detach = [&](std::size_t node) {
      auto& list = adj_[node];
      list.erase(std::find(list.begin(), list.end(), idx));
    };
    detach(arcs_[idx].first);
    detach(arcs_[idx].second);
    // swap-with-last keeps indices dense
    const std::size_t last = arcs_.size() - 1;
    if (idx != last) {
      for (std::size_t node : {arcs_[last].first, arcs_[last].second})
        for (std::size_t& ref : adj_[node])
          if (ref == last) ref = idx;
      arcs_[idx] = arcs_[last];
      flows_[idx] = flows_[last];
    }
    arcs_.pop_back();
    flows_.pop_back();
  }

  void build_initial_basis() {
    adj_.assign(n_ + m_, {});
    arcs_.clear();
    flows_.clear();
    Vec ar = a_, br = b_;
    std::size_t i = 0, j = 0;
    while (true) {
      const double f = std::min(ar[i], br[j]);
      add_arc(i, j);
      flows_.back() = f;
      ar[i] -= f;
      br[j] -= f;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (ar[i] <= br[j] && i < n_ - 1)
        ++i;
      else
        ++j;
    }
  }

  void compute_duals() {
    u_.assign(n_, 0.0);
    v_.assign(m_, 0.0);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t idx : adj_[node]) {
        const auto [s, t] = arcs_[idx];
        const std::size_t other = (s == node) ? t : s;
        if (seen[other]) continue;
        seen[other] = 1;
        if (other >= n_)
          v_[other - n_] = cost_(s, t - n_) - u_[s];
        else
          u_[other] = cost_(other, t - n_) - v_[t - n_];
        stack.push_back(other);
      }
    }
  }

  bool find_entering(double tol, bool bland, std::size_t& ei,
                     std::size_t& ej) const {
    double best = -tol;
    bool found = false;
    for (std::size_t i = 0; i < n_; ++i) {
      const double ui = u_[i];
      for (std::size_t j = 0; j < m_; ++j) {
        const double red = cost_(i, j) - ui - v_[j];
        if (red < best) {
          best = red;
          ei = i;
          ej = j;
          found = true;
          if (bland) return true;
        }
      }
    }
    return found;
  }

  // Adds arc (ei, ej), shifts flow around the unique tree cycle, removes the
  // bottleneck arc. Returns the amount of flow moved.
  double pivot(std::size_t ei, std::size_t ej) {
    const std::size_t src = ei, dst = n_ + ej;
    // path dst -> src in the tree
    std::vector<std::size_t> parent_node(n_ + m_, SIZE_MAX);
    std::vector<std::size_t> parent_arc(n_ + m_, SIZE_MAX);
    std::vector<std::size_t> stack{dst};
    parent_node[dst] = dst;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node == src) break;
      for (std::size_t idx : adj_[node]) {
        const auto [s, t] = arcs_[idx];
        const std::size_t other = (s == node) ? t : s;
        if (parent_node[other] != SIZE_MAX) continue;
        parent_node[other] = node;
        parent_arc[other] = idx;
        stack.push_back(other);
      }
    }
    // Collect cycle arcs walking src -> dst; flow alternates starting with a
    // decrease on the arc incident to src (the entering arc adds flow into
    // src's row).
    std::vector<std::size_t> cycle;
    for (std::size_t node = src; node != dst; node = parent_node[node])
      cycle.push_back(parent_arc[node]);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = SIZE_MAX;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      if (flows_[cycle[k]] <= theta) {
        theta = flows_[cycle[k]];
        leave = cycle[k];
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      if (k % 2 == 0)
        flows_[cycle[k]] -= theta;
      else
        flows_[cycle[k]] += theta;
    }
    add_arc(ei, ej);
    flows_.back() = theta;
    remove_arc(leave);
    return theta;
  }

  const Matrix& cost_;
  std::size_t n_, m_;
  Vec a_, b_;
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;
  std::vector<double> flows_;
  std::vector<std::vector<std::size_t>> adj_;
  Vec u_, v_;
};

}  // namespace

KantorovichSolution solve_kantorovich(const Matrix& cost, const Vec& mu_w,
                                      const Vec& nu_w) {
  const std::size_t n = mu_w.size(), m = nu_w.size();
  if (cost.rows() != n || cost.cols() != m)
    fail(ErrorCode::dimension_mismatch, "cost matrix shape mismatch");
  if (n == 0 || m == 0)
    fail(ErrorCode::invalid_argument, "empty marginals");
  if (!cost.all_finite())
    fail(ErrorCode::invalid_argument, "cost matrix must be finite");
  double sa = 0.0, sb = 0.0;
  for (double w : mu_w) {
    if (!(w > 0.0)) fail(ErrorCode::invalid_argument, "weights must be positive");
    sa += w;
  }
  for (double w : nu_w) {
    if (!(w > 0.0)) fail(ErrorCode::invalid_argument, "weights must be positive");
    sb += w;
  }
  if (std::fabs(sa - 1.0) > 1e-12 || std::fabs(sb - 1.0) > 1e-12)
    fail(ErrorCode::invalid_argument, "marginal weights must each sum to 1");

  TransportSimplex simplex(cost, mu_w, nu_w);
  simplex.solve();

  KantorovichSolution sol;
  sol.plan.n_source = n;
  sol.plan.n_target = m;
  sol.plan.matrix = simplex.exact_flows(mu_w, nu_w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (sol.plan.matrix(i, j) > kSupportEps)
        sol.plan.entries.push_back({i, j, sol.plan.matrix(i, j)});
  sol.total_cost =
      kernels::dot(n * m, sol.plan.matrix.data(), cost.data());

  // Kantorovich potentials from the LP duals: psi = -u (so psi[0] = 0 with
  // the root gauge), psi_c = v; feasibility psi_c[j] - psi[i] <= c(i,j) is
  // the nonnegative-reduced-cost certificate.
  sol.potentials.psi.resize(n);
  sol.potentials.psi_c.resize(m);
  for (std::size_t i = 0; i < n; ++i)
    sol.potentials.psi[i] = -simplex.duals_u()[i];
  for (std::size_t j = 0; j < m; ++j)
    sol.potentials.psi_c[j] = simplex.duals_v()[j];
  return sol;
}

BruteForceResult brute_force_oracle(const Matrix& cost) {
  if (!cost.is_square())
    fail(ErrorCode::dimension_mismatch, "oracle needs a square cost matrix");
  const std::size_t n = cost.rows();
  if (n == 0 || n > 9)
    fail(ErrorCode::invalid_argument, "brute-force oracle is guarded at N <= 9");
  std::vector<std::size_t> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_cost / static_cast<double>(n)};
}

Vec c_transform(const Vec& psi, const Matrix& cost) {
  if (psi.size() != cost.rows())
    fail(ErrorCode::dimension_mismatch, "c_transform size mismatch");
  Vec out(cost.cols());
  for (std::size_t j = 0; j < cost.cols(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cost.rows(); ++i)
      best = std::min(best, psi[i] + cost(i, j));
    out[j] = best;
  }
  return out;
}

Vec inverse_c_transform(const Vec& phi, const Matrix& cost) {
  if (phi.size() != cost.cols())
    fail(ErrorCode::dimension_mismatch, "inverse_c_transform size mismatch");
  Vec out(cost.rows());
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cost.cols(); ++j)
      best = std::max(best, phi[j] - cost(i, j));
    out[i] = best;
  }
  return out;
}

namespace {

bool check_cycles_rec(const std::vector<PlanEntry>& entries,
                      const Matrix& pair_cost, std::vector<std::size_t>& cycle,
                      std::vector<char>& used, std::size_t depth,
                      std::size_t max_len, double tol,
                      std::optional<CycleViolation>& out) {
  if (depth >= 2) {
    // Evaluate the cycle (c_0, ..., c_{depth-1}).
    double gap = 0.0;
    for (std::size_t k = 0; k < depth; ++k) {
      const std::size_t cur = cycle[k];
      const std::size_t nxt = cycle[(k + 1) % depth];
      gap += pair_cost(nxt, cur) - pair_cost(cur, cur);
    }
    if (gap < -tol) {
      out = CycleViolation{{cycle.begin(), cycle.begin() + depth},
                           gap};
      return true;
    }
  }
  if (depth == max_len) return false;
  const std::size_t start = cycle[0];
  for (std::size_t e = start + 1; e < entries.size(); ++e) {
    if (used[e]) continue;
    used[e] = 1;
    cycle[depth] = e;
    if (check_cycles_rec(entries, pair_cost, cycle, used, depth + 1, max_len,
                         tol, out))
      return true;
    used[e] = 0;
  }
  return false;
}

}  // namespace

std::optional<CycleViolation> verify_cyclical_monotonicity(
    const TransportPlan& plan, const Matrix& cost,
    std::size_t cycle_len_max) {
  if (cycle_len_max > 6)
    fail(ErrorCode::invalid_argument, "cycle length is guarded at 6");
  const auto& entries = plan.entries;
  const std::size_t p = entries.size();
  if (p < 2 || cycle_len_max < 2) return std::nullopt;

  // pair_cost(a, b) = c(x of entry a, y of entry b)
  Matrix pair_cost(p, p);
  double scale = 1.0;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      pair_cost(a, b) = cost(entries[a].i, entries[b].j);
      scale = std::max(scale, std::fabs(pair_cost(a, b)));
    }
  const double tol = 1e-9 * scale;

  std::optional<CycleViolation> out;
  std::vector<std::size_t> cycle(cycle_len_max);
  std::vector<char> used(p, 0);
  for (std::size_t first = 0; first < p; ++first) {
    cycle[0] = first;
    used[first] = 1;
    if (check_cycles_rec(entries, pair_cost, cycle, used, 1, cycle_len_max,
                         tol, out))
      return out;
    used[first] = 0;
  }
  return std::nullopt;
}

}  // namespace lqot
