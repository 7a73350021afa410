#pragma once
// Closed-form optimal control costs c^{t,s}(x,y) = x^T C x / 2 + x^T D y +
// y^T E y / 2, the action functional on sampled trajectories, and
// subadditivity diagnostics.

#include <vector>

#include "lqot/dynamics.hpp"
#include "lqot/matrix.hpp"

namespace lqot {

struct CostMatrices {
  double t = 0.0, s = 0.0;
  Matrix C, D, E;
};

CostMatrices cost_matrices(const LQProblem& p, double t, double s);
double cost_eval(const CostMatrices& cm, const Vec& x, const Vec& y);
Vec cost_grad_x(const CostMatrices& cm, const Vec& x, const Vec& y);

// Pairwise costs between two atom sets, computed with the batch kernels:
// out(i,j) = c(xs[i], ys[j]).
Matrix cost_matrix_between(const CostMatrices& cm, const std::vector<Vec>& xs,
                           const std::vector<Vec>& ys);

// Composite Simpson quadrature of (|u|^2 - x^T Q x)/2 over the trajectory's
// uniform grid (3/8 rule absorbs an odd interval count). At least 3 nodes.
double action_eval(const LQProblem& p, const Trajectory& traj);

// Running action at every node (same quadrature, cumulative); the last entry
// equals action_eval.
std::vector<double> action_running(const LQProblem& p, const Trajectory& traj);

// c^{t1,t2}(x,z) + c^{t2,t3}(z,y) - c^{t1,t3}(x,y); nonnegative, zero exactly
// when z is the t2-point of the optimal trajectory from x to y.
double subadditivity_gap(const LQProblem& p, const Vec& x, const Vec& z,
                         const Vec& y, double t1, double t2, double t3);

// Smallest Lambda with |c(x,y)| <= Lambda (|x|^2 + |y|^2): half the spectral
// radius of [[C, D], [D^T, E]].
double quadratic_bound_lambda(const CostMatrices& cm);

}  // namespace lqot
