// Distortion coefficients and their Monte-Carlo validation, space-form model
// problems, the W and S matrix lemmas, and the determinant Jacobian estimate.
#pragma once

#include <cstdint>

#include "lqot/dynamics.hpp"
#include "lqot/matrix.hpp"

namespace lqot {

// det R3(tau) / det R3(T), evaluated through log-determinants; 0 at tau = 0.
double distortion_coefficient(const LQProblem& problem, double tau);

struct DistortionCurve {
    Vec taus;
    Vec betas;
};

// Uniform grid of node_count points on [0, T].
DistortionCurve distortion_curve(const LQProblem& problem,
                                 std::size_t node_count);

// Volume ratio of the tau-intermediate set of (x, ball of given radius at y),
// estimated by averaging per-sample Jacobian determinants of the point-to-ball
// interpolation map z -> exp_{x,tau}(exp_{x,T}^{-1}(z)).
double distortion_mc_estimate(const LQProblem& problem, const Vec& x,
                              const Vec& y, double tau, double radius,
                              std::size_t samples, std::uint64_t seed);

// (A=0, B=I, Q=K diag(1,...,1,0), T=1) with K = distance^2 k/(n-1); the
// problem whose distortion curve matches the space form of curvature k.
LQProblem model_space_problem(double k, std::size_t n, double distance);

// Closed-form space-form coefficient: tau (sin(tau theta)/sin theta)^{n-1}
// for k > 0, tau^n for k = 0, sinh branch for k < 0; theta in [0, pi) when
// k > 0.
double model_beta(double k, std::size_t n, double theta, double tau);

struct WMatrixResult {
    Matrix W;  // R3(tau) R1(tau)^{-1}
    double sym_residual = 0.0;
    double min_eig = 0.0;
    double riccati_residual = 0.0;  // |Wdot - (BB^T + AW + WA^T + WQW)|_max
};

// Valid on [0, epsilon] where R1 stays invertible; see w_window.
WMatrixResult w_matrix(const LQProblem& problem, double tau);

// Largest prefix of a 1024-point grid on [0, T] where det R1 keeps its
// initial sign.
double w_window(const LQProblem& problem);

struct SMatrixResult {
    Matrix S;  // R3(tau)^{-1} R4(tau)
    double sym_residual = 0.0;
    double s_dot_max_eig = 0.0;  // largest eigenvalue of d S / d tau
};

SMatrixResult s_matrix(const LQProblem& problem, double tau);

struct JacobianEstimate {
    double lhs = 0.0;    // det(grad T_tau)^{1/n}
    double rhs = 0.0;    // sum of the two determinant-ratio terms
    double slack = 0.0;  // lhs - rhs, nonnegative up to tolerance
};

// Propagates grad T_s to grad T_tau through the flow blocks and evaluates the
// concavity estimate. Requires R3(s)^{-1} grad_T_s symmetric nonnegative.
JacobianEstimate jacobian_estimate_check(const LQProblem& problem,
                                         const Matrix& grad_T_s, double tau,
                                         double s);

}  // namespace lqot
