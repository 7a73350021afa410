#pragma once
// Linear-quadratic control problems: Hamiltonian flow blocks, conjugate-time
// search, exponential map, and closed-form optimal trajectories.
//
// Conventions. The Hamiltonian matrix is H = [[B B^T, A], [A^T, Q]] acting on
// stacked (p, x) with the costate on top. Flows are exponentials of the
// generator -Omega H, Omega = [[0, I], [-I, 0]], partitioned as
//   e^{-tau Omega H} = [[R1, R2], [R3, R4]].

#include <cstddef>
#include <optional>
#include <vector>

#include "lqot/linalg.hpp"
#include "lqot/matrix.hpp"

namespace lqot {

class LQProblem {
 public:
  // Validates: square A, compatible B (n x m, full column rank), symmetric Q,
  // the Kalman condition, T > 0, and that no conjugate time occurs in (0, T].
  static LQProblem create(Matrix A, Matrix B, Matrix Q, double T);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& Q() const { return q_; }
  double T() const { return t_; }
  std::size_t n() const { return a_.rows(); }
  std::size_t m() const { return b_.cols(); }

 private:
  LQProblem(Matrix a, Matrix b, Matrix q, double t);
  Matrix a_, b_, q_;
  double t_ = 0.0;
};

struct FlowBlocks {
  double tau = 0.0;
  Matrix R1, R2, R3, R4;
  Matrix assemble() const;  // [[R1, R2], [R3, R4]]
};

Matrix hamiltonian_matrix(const LQProblem& p);
Matrix flow_generator(const LQProblem& p);  // -Omega H
Matrix symplectic_form(std::size_t n);      // Omega

FlowBlocks flow_blocks(const LQProblem& p, double tau);
FlowBlocks split_flow_matrix(const Matrix& g, double tau);

// rank [B, AB, ..., A^{n-1}B] == n at the given relative tolerance.
bool kalman_condition(const Matrix& a, const Matrix& b, double rel_tol = 1e-10);
inline bool kalman_check(const LQProblem& p) {
  return kalman_condition(p.A(), p.B());
}

LQProblem backwards_problem(const LQProblem& p);  // (-A, B, Q, T)

// Smallest t in (0, horizon] where R3(t) is singular, located by a grid scan
// of the smallest singular value of R3 followed by golden-section refinement
// to absolute accuracy better than 1e-8. Returns nullopt when no conjugate
// time exists up to the horizon (always the case for Q <= 0).
std::optional<double> first_conjugate_time(const LQProblem& p, double horizon,
                                           double grid_step);
std::optional<double> first_conjugate_time(const LQProblem& p, double horizon);

Vec exp_map(const LQProblem& p, const Vec& x, const Vec& pvec, double tau);
// p with exp_map(x, p, tau) = y; conjugate-time error if R3(tau) is singular.
Vec exp_map_inverse(const LQProblem& p, const Vec& x, const Vec& y, double tau);

struct Trajectory {
  double t = 0.0, s = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;    // x(tau), n-vectors
  std::vector<Vec> costates;  // p(tau), n-vectors
  std::vector<Vec> controls;  // u(tau) = B^T p(tau), m-vectors
};

Trajectory optimal_trajectory(const LQProblem& p, const Vec& x, const Vec& y,
                              double t, double s, std::size_t grid_points);

// Flow blocks on a uniform grid t0 + k*step, evaluated incrementally with
// periodic exact re-anchoring to keep drift well below verification
// tolerances.
class FlowSampler {
 public:
  FlowSampler(const LQProblem& p, double t0, double step);
  FlowBlocks next();

 private:
  Matrix gen_;
  Matrix step_flow_;
  Matrix cur_;
  double t0_, step_;
  std::size_t k_ = 0;
  std::size_t n_ = 0;
};

double smallest_singular_ratio(const Matrix& m);  // sigma_min / max(1, sigma_max)

}  // namespace lqot
