#include "lqot/dynamics.hpp"

#include <cmath>
#include <utility>

namespace lqot {

namespace {

// Generator -Omega H assembled directly: [[-A^T, -Q], [B B^T, A]].
Matrix generator_from(const Matrix& a, const Matrix& b, const Matrix& q) {
  const std::size_t n = a.rows();
  Matrix g(2 * n, 2 * n);
  g.set_block(0, 0, -a.transpose());
  g.set_block(0, n, -q);
  g.set_block(n, 0, b * b.transpose());
  g.set_block(n, n, a);
  return g;
}

double smallest_singular(const Matrix& m) {
  return singular_values(m).back();
}

struct ScanCandidate {
  double t;
  double value;  // sigma_min of R3 at t
};

Matrix r3_at(const Matrix& gen, std::size_t n, double t) {
  return mat_exp(t * gen).block(n, 0, n, n);
}

// Golden-section minimization of sigma_min(R3) on [lo, hi].
ScanCandidate refine_minimum(const Matrix& gen, std::size_t n, double lo,
                             double hi) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = smallest_singular(r3_at(gen, n, c));
  double fd = smallest_singular(r3_at(gen, n, d));
  while (b - a > 1e-9) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = smallest_singular(r3_at(gen, n, c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = smallest_singular(r3_at(gen, n, d));
    }
  }
  const double t = 0.5 * (a + b);
  return {t, smallest_singular(r3_at(gen, n, t))};
}

// Scan of sigma_min(R3(t)) over (0, horizon]. A grid local minimum is
// refined; it counts as a conjugate time when the refined value is zero to
// within either the relative singularity threshold or the value a transversal
// zero would leave at the refinement width (slope * 2e-8).
std::optional<double> conjugate_scan(const Matrix& a, const Matrix& b,
                                     const Matrix& q, double horizon,
                                     double grid_step) {
  if (!(horizon > 0.0))
    fail(ErrorCode::invalid_argument, "conjugate-time horizon must be > 0");
  if (!(grid_step > 0.0) || grid_step >= horizon)
    fail(ErrorCode::invalid_argument,
         "grid_step must be positive and smaller than the horizon");
  // Q <= 0 admits no conjugate time.
  const SymEigen eq = sym_eigen(q);
  if (eq.values.back() <= 0.0) return std::nullopt;

  const Matrix gen = generator_from(a, b, q);
  const std::size_t n = a.rows();
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(horizon / grid_step));
  std::vector<double> ts(steps + 1), f(steps + 1);
  ts[0] = 0.0;
  f[0] = 0.0;  // R3(0) = 0; excluded from detection (conjugate times are > 0)
  {
    Matrix step_flow = mat_exp(grid_step * gen);
    Matrix cur = Matrix::identity(2 * n);
    for (std::size_t k = 1; k <= steps; ++k) {
      double t = k * grid_step;
      if (t > horizon) t = horizon;
      if (k % 128 == 0 || t == horizon)
        cur = mat_exp(t * gen);
      else
        cur = step_flow * cur;
      ts[k] = t;
      f[k] = smallest_singular(cur.block(n, 0, n, n));
    }
  }

  for (std::size_t k = 1; k <= steps; ++k) {
    const bool left_ok = k >= 2 ? f[k] <= f[k - 1] : false;
    const bool right_ok = k == steps ? f[k] <= f[k - 1] : f[k] <= f[k + 1];
    if (!(left_ok && right_ok)) continue;
    const double lo = ts[k - 1];
    const double hi = k == steps ? ts[k] : ts[k + 1];
    const ScanCandidate cand = refine_minimum(gen, n, lo, hi);
    const Matrix r3 = r3_at(gen, n, cand.t);
    const double sigma_max = singular_values(r3).front();
    const double slope_left = (f[k - 1] - cand.value) / std::max(cand.t - lo, grid_step * 1e-3);
    const double slope_right =
        k == steps ? slope_left
                   : (f[k + 1] - cand.value) / std::max(hi - cand.t, grid_step * 1e-3);
    const double slope = std::max({slope_left, slope_right, 0.0});
    const double threshold =
        std::max(1e-12 * std::max(sigma_max, 1.0), slope * 2e-8);
    if (cand.value <= threshold) return cand.t;
  }
  return std::nullopt;
}

}  // namespace

LQProblem::LQProblem(Matrix a, Matrix b, Matrix q, double t)
    : a_(std::move(a)), b_(std::move(b)), q_(std::move(q)), t_(t) {}

LQProblem LQProblem::create(Matrix a, Matrix b, Matrix q, double t) {
  if (!a.is_square() || a.rows() == 0)
    fail(ErrorCode::dimension_mismatch, "A must be square and non-empty");
  const std::size_t n = a.rows();
  if (b.rows() != n || b.cols() == 0 || b.cols() > n)
    fail(ErrorCode::dimension_mismatch, "B must be n x m with 1 <= m <= n");
  if (!q.is_square() || q.rows() != n)
    fail(ErrorCode::dimension_mismatch, "Q must be n x n");
  if (sym_residual(q) > 1e-10)
    fail(ErrorCode::not_symmetric, "Q must be symmetric");
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorCode::invalid_argument, "horizon T must be positive and finite");
  if (rank_with_tolerance(b, 1e-10) != b.cols())
    fail(ErrorCode::invalid_argument, "B must have full column rank");
  if (!kalman_condition(a, b))
    fail(ErrorCode::invalid_argument, "Kalman condition fails: (A,B) is not controllable");
  if (auto tc = conjugate_scan(a, b, q, t, t / 2048.0))
    if (*tc <= t + 1e-9)
      fail(ErrorCode::conjugate_time,
           "conjugate time inside (0, T]; no unique optimal trajectories");
  return LQProblem(std::move(a), std::move(b), std::move(q), t);
}

Matrix FlowBlocks::assemble() const {
  const std::size_t n = R1.rows();
  Matrix g(2 * n, 2 * n);
  g.set_block(0, 0, R1);
  g.set_block(0, n, R2);
  g.set_block(n, 0, R3);
  g.set_block(n, n, R4);
  return g;
}

Matrix hamiltonian_matrix(const LQProblem& p) {
  const std::size_t n = p.n();
  Matrix h(2 * n, 2 * n);
  h.set_block(0, 0, p.B() * p.B().transpose());
  h.set_block(0, n, p.A());
  h.set_block(n, 0, p.A().transpose());
  h.set_block(n, n, p.Q());
  return h;
}

Matrix symplectic_form(std::size_t n) {
  Matrix omega(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    omega(i, n + i) = 1.0;
    omega(n + i, i) = -1.0;
  }
  return omega;
}

Matrix flow_generator(const LQProblem& p) {
  return generator_from(p.A(), p.B(), p.Q());
}

FlowBlocks split_flow_matrix(const Matrix& g, double tau) {
  const std::size_t n = g.rows() / 2;
  FlowBlocks fb;
  fb.tau = tau;
  fb.R1 = g.block(0, 0, n, n);
  fb.R2 = g.block(0, n, n, n);
  fb.R3 = g.block(n, 0, n, n);
  fb.R4 = g.block(n, n, n, n);
  return fb;
}

FlowBlocks flow_blocks(const LQProblem& p, double tau) {
  if (!std::isfinite(tau))
    fail(ErrorCode::invalid_argument, "flow time must be finite");
  return split_flow_matrix(mat_exp(tau * flow_generator(p)), tau);
}

bool kalman_condition(const Matrix& a, const Matrix& b, double rel_tol) {
  if (b.rows() != a.rows() || !a.is_square())
    fail(ErrorCode::dimension_mismatch, "kalman_condition shape mismatch");
  const std::size_t n = a.rows(), m = b.cols();
  Matrix block(n, n * m);
  Matrix power = b;
  for (std::size_t k = 0; k < n; ++k) {
    block.set_block(0, k * m, power);
    power = a * power;
  }
  return rank_with_tolerance(block, rel_tol) == n;
}

LQProblem backwards_problem(const LQProblem& p) {
  return LQProblem::create(-p.A(), p.B(), p.Q(), p.T());
}

std::optional<double> first_conjugate_time(const LQProblem& p, double horizon,
                                           double grid_step) {
  return conjugate_scan(p.A(), p.B(), p.Q(), horizon, grid_step);
}

std::optional<double> first_conjugate_time(const LQProblem& p,
                                           double horizon) {
  return first_conjugate_time(p, horizon, horizon / 2048.0);
}

Vec exp_map(const LQProblem& p, const Vec& x, const Vec& pvec, double tau) {
  const FlowBlocks fb = flow_blocks(p, tau);
  return fb.R3.apply(pvec) + fb.R4.apply(x);
}

Vec exp_map_inverse(const LQProblem& p, const Vec& x, const Vec& y,
                    double tau) {
  const FlowBlocks fb = flow_blocks(p, tau);
  if (smallest_singular_ratio(fb.R3) <= 1e-12)
    fail(ErrorCode::conjugate_time,
         "R3 is singular at this time; exponential map is not invertible");
  return solve(fb.R3, y - fb.R4.apply(x));
}

Trajectory optimal_trajectory(const LQProblem& p, const Vec& x, const Vec& y,
                              double t, double s, std::size_t grid_points) {
  if (!(0.0 <= t && t < s && s <= p.T()))
    fail(ErrorCode::invalid_argument,
         "need 0 <= t < s <= T for optimal trajectories");
  if (grid_points < 2)
    fail(ErrorCode::invalid_argument, "need at least 2 grid points");
  if (x.size() != p.n() || y.size() != p.n())
    fail(ErrorCode::dimension_mismatch, "endpoint dimension mismatch");

  const Vec p0 = exp_map_inverse(p, x, y, s - t);

  Trajectory traj;
  traj.t = t;
  traj.s = s;
  traj.times.resize(grid_points);
  traj.states.resize(grid_points);
  traj.costates.resize(grid_points);
  traj.controls.resize(grid_points);
  const double step = (s - t) / static_cast<double>(grid_points - 1);
  FlowSampler sampler(p, 0.0, step);
  const Matrix bt = p.B().transpose();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const FlowBlocks fb = sampler.next();
    traj.times[i] = t + fb.tau;
    traj.costates[i] = fb.R1.apply(p0) + fb.R2.apply(x);
    traj.states[i] = fb.R3.apply(p0) + fb.R4.apply(x);
    traj.controls[i] = bt.apply(traj.costates[i]);
  }
  traj.times.back() = s;
  return traj;
}

FlowSampler::FlowSampler(const LQProblem& p, double t0, double step)
    : gen_(flow_generator(p)),
      step_flow_(mat_exp(step * gen_)),
      cur_(Matrix::identity(gen_.rows())),
      t0_(t0),
      step_(step),
      n_(p.n()) {
  if (!(std::isfinite(t0) && std::isfinite(step)) || step == 0.0)
    fail(ErrorCode::invalid_argument, "bad flow sampler grid");
}

FlowBlocks FlowSampler::next() {
  const double t = t0_ + static_cast<double>(k_) * step_;
  if (k_ % 128 == 0)
    cur_ = mat_exp(t * gen_);
  else
    cur_ = step_flow_ * cur_;
  ++k_;
  return split_flow_matrix(cur_, t);
}

double smallest_singular_ratio(const Matrix& m) {
  const std::vector<double> sv = singular_values(m);
  if (sv.empty()) return 0.0;
  // The floor of 1 on the denominator makes uniformly tiny matrices (for
  // example a 1x1 block right at a conjugate time) register as singular too.
  return sv.back() / std::max(1.0, sv.front());
}

}  // namespace lqot
