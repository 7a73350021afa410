#include "lqot/cost.hpp"

#include <cmath>

#include "lqot/kernels.hpp"

namespace lqot {

namespace {

Matrix symmetrized(Matrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

Matrix pack_points(const std::vector<Vec>& pts, std::size_t dim) {
  Matrix m(pts.size(), dim);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != dim)
      fail(ErrorCode::dimension_mismatch, "point dimension mismatch");
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = pts[i][j];
  }
  return m;
}

}  // namespace

CostMatrices cost_matrices(const LQProblem& p, double t, double s) {
  if (!(0.0 <= t && t < s && s <= p.T()))
    fail(ErrorCode::invalid_argument, "need 0 <= t < s <= T for cost matrices");
  const double d = s - t;
  const FlowBlocks fwd = flow_blocks(p, d);
  if (smallest_singular_ratio(fwd.R3) <= 1e-12)
    fail(ErrorCode::conjugate_time, "R3(s-t) is singular; cost is undefined");
  const FlowBlocks bwd = flow_blocks(p, -d);
  CostMatrices cm;
  cm.t = t;
  cm.s = s;
  const LuFactors f = lu_factor(fwd.R3);
  cm.C = symmetrized(lu_solve(f, fwd.R4));
  cm.D = -lu_solve(f, Matrix::identity(p.n()));
  cm.E = symmetrized(-solve(bwd.R3, bwd.R4));
  return cm;
}

double cost_eval(const CostMatrices& cm, const Vec& x, const Vec& y) {
  if (x.size() != cm.C.rows() || y.size() != cm.E.rows())
    fail(ErrorCode::dimension_mismatch, "cost_eval dimension mismatch");
  return 0.5 * dot(x, cm.C.apply(x)) + dot(x, cm.D.apply(y)) +
         0.5 * dot(y, cm.E.apply(y));
}

Vec cost_grad_x(const CostMatrices& cm, const Vec& x, const Vec& y) {
  return cm.C.apply(x) + cm.D.apply(y);
}

Matrix cost_matrix_between(const CostMatrices& cm, const std::vector<Vec>& xs,
                           const std::vector<Vec>& ys) {
  const std::size_t n = cm.C.rows();
  const std::size_t nx = xs.size(), ny = ys.size();
  const Matrix px = pack_points(xs, n);
  const Matrix py = pack_points(ys, n);
  Vec qx(nx), qy(ny);
  kernels::batch_quadform(nx, n, px.data(), cm.C.data(), qx.data());
  kernels::batch_quadform(ny, n, py.data(), cm.E.data(), qy.data());
  const Matrix cross = px * cm.D * py.transpose();
  Matrix out(nx, ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      out(i, j) = 0.5 * qx[i] + cross(i, j) + 0.5 * qy[j];
  return out;
}

namespace {

std::vector<double> lagrangian_values(const LQProblem& p,
                                      const Trajectory& traj) {
  const std::size_t count = traj.times.size();
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double uu = dot(traj.controls[i], traj.controls[i]);
    const double xqx = dot(traj.states[i], p.Q().apply(traj.states[i]));
    f[i] = 0.5 * (uu - xqx);
  }
  return f;
}

// Simpson weights over [0..k] intervals of width h; k even uses plain
// composite Simpson, odd k appends a 3/8 block on the last three intervals.
double simpson_prefix(const std::vector<double>& f, std::size_t last,
                      double h) {
  if (last == 0) return 0.0;
  if (last == 1) return 0.5 * h * (f[0] + f[1]);  // single-interval fallback
  double acc = 0.0;
  std::size_t even_end = last;
  if (last % 2 != 0) even_end = last - 3;
  for (std::size_t i = 0; i + 2 <= even_end; i += 2)
    acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (last % 2 != 0) {
    const std::size_t i = even_end;
    acc += 3.0 * h / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
  }
  return acc;
}

}  // namespace

double action_eval(const LQProblem& p, const Trajectory& traj) {
  const std::size_t count = traj.times.size();
  if (count < 3)
    fail(ErrorCode::invalid_argument, "action quadrature needs >= 3 nodes");
  if (traj.controls.size() != count || traj.states.size() != count)
    fail(ErrorCode::invalid_argument, "trajectory is missing samples");
  const double h = (traj.times.back() - traj.times.front()) /
                   static_cast<double>(count - 1);
  return simpson_prefix(lagrangian_values(p, traj), count - 1, h);
}

std::vector<double> action_running(const LQProblem& p, const Trajectory& traj) {
  const std::size_t count = traj.times.size();
  if (count < 3)
    fail(ErrorCode::invalid_argument, "action quadrature needs >= 3 nodes");
  const double h = (traj.times.back() - traj.times.front()) /
                   static_cast<double>(count - 1);
  const std::vector<double> f = lagrangian_values(p, traj);
  std::vector<double> run(count, 0.0);
  for (std::size_t k = 1; k < count; ++k) run[k] = simpson_prefix(f, k, h);
  return run;
}

double subadditivity_gap(const LQProblem& p, const Vec& x, const Vec& z,
                         const Vec& y, double t1, double t2, double t3) {
  if (!(0.0 <= t1 && t1 < t2 && t2 < t3 && t3 <= p.T()))
    fail(ErrorCode::invalid_argument, "need 0 <= t1 < t2 < t3 <= T");
  const CostMatrices c12 = cost_matrices(p, t1, t2);
  const CostMatrices c23 = cost_matrices(p, t2, t3);
  const CostMatrices c13 = cost_matrices(p, t1, t3);
  return cost_eval(c12, x, z) + cost_eval(c23, z, y) - cost_eval(c13, x, y);
}

double quadratic_bound_lambda(const CostMatrices& cm) {
  const std::size_t n = cm.C.rows();
  Matrix big(2 * n, 2 * n);
  big.set_block(0, 0, cm.C);
  big.set_block(0, n, cm.D);
  big.set_block(n, 0, cm.D.transpose());
  big.set_block(n, n, cm.E);
  const SymEigen e = sym_eigen(big);
  const double lo = std::fabs(e.values.front());
  const double hi = std::fabs(e.values.back());
  return 0.5 * (lo > hi ? lo : hi);
}

}  // namespace lqot
