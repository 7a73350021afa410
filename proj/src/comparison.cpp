#include "lqot/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "lqot/error.hpp"
#include "lqot/linalg.hpp"
#include "lqot/rng.hpp"

namespace lqot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kFdStep = 1e-5;

Matrix symmetrized(const Matrix& m) {
    Matrix s = m;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double v = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    return s;
}

// Signed n-th root of a determinant ratio prod_i det_i^{e_i} given as
// (sign, log|det|) pairs with exponents +1/-1. Zero if any numerator factor
// is singular; error if the ratio is negative.
double root_of_ratio(const std::vector<DetLog>& numer,
                     const std::vector<DetLog>& denom, std::size_t n) {
    int sign = 1;
    double log_sum = 0.0;
    for (const DetLog& d : numer) {
        if (d.sign == 0) return 0.0;
        sign *= d.sign;
        log_sum += d.log_abs;
    }
    for (const DetLog& d : denom) {
        if (d.sign == 0)
            fail(ErrorCode::singular_matrix,
                 "singular denominator in determinant ratio");
        sign *= d.sign;
        log_sum -= d.log_abs;
    }
    if (sign < 0)
        fail(ErrorCode::invalid_argument,
             "negative determinant ratio has no real n-th root");
    return std::exp(log_sum / static_cast<double>(n));
}

}  // namespace

double distortion_coefficient(const LQProblem& problem, double tau) {
    if (!(tau >= 0.0) || !(tau <= problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in [0, T]");
    const DetLog at_T = log_abs_det_sign(flow_blocks(problem, problem.T()).R3);
    if (at_T.sign == 0)
        fail(ErrorCode::conjugate_time, "R3(T) is singular");
    const DetLog at_tau = log_abs_det_sign(flow_blocks(problem, tau).R3);
    if (at_tau.sign == 0) return 0.0;
    return static_cast<double>(at_tau.sign * at_T.sign) *
           std::exp(at_tau.log_abs - at_T.log_abs);
}

DistortionCurve distortion_curve(const LQProblem& problem,
                                 std::size_t node_count) {
    if (node_count < 2)
        fail(ErrorCode::invalid_argument, "distortion curve needs >= 2 nodes");
    const double T = problem.T();
    const double step = T / static_cast<double>(node_count - 1);

    std::vector<DetLog> logs;
    logs.reserve(node_count);
    DistortionCurve curve;
    curve.taus.reserve(node_count);
    FlowSampler sampler(problem, 0.0, step);
    for (std::size_t k = 0; k < node_count; ++k) {
        const FlowBlocks fb = sampler.next();
        curve.taus.push_back(fb.tau);
        logs.push_back(log_abs_det_sign(fb.R3));
    }
    const DetLog at_T = logs.back();
    if (at_T.sign == 0)
        fail(ErrorCode::conjugate_time, "R3(T) is singular");
    curve.betas.resize(node_count);
    for (std::size_t k = 0; k < node_count; ++k) {
        curve.betas[k] =
            logs[k].sign == 0
                ? 0.0
                : static_cast<double>(logs[k].sign * at_T.sign) *
                      std::exp(logs[k].log_abs - at_T.log_abs);
    }
    return curve;
}

double distortion_mc_estimate(const LQProblem& problem, const Vec& x,
                              const Vec& y, double tau, double radius,
                              std::size_t samples, std::uint64_t seed) {
    const std::size_t n = problem.n();
    if (x.size() != n || y.size() != n)
        fail(ErrorCode::dimension_mismatch,
             "points must match the state dimension");
    if (!(radius > 0.0) || !std::isfinite(radius))
        fail(ErrorCode::invalid_argument, "radius must be positive");
    if (samples < 1000)
        fail(ErrorCode::invalid_argument, "need at least 1000 samples");
    if (!(tau >= 0.0) || !(tau <= problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in [0, T]");

    const auto interpolate = [&](const Vec& z) {
        Vec p0 = exp_map_inverse(problem, x, z, problem.T());
        return exp_map(problem, x, p0, tau);
    };

    double scale = 1.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    const double h = 1e-3 * std::max(scale, radius);

    Rng rng(seed);
    double acc = 0.0;
    Matrix jac(n, n);
    for (std::size_t k = 0; k < samples; ++k) {
        Vec z = y + rng.uniform_ball(n, radius);
        for (std::size_t j = 0; j < n; ++j) {
            Vec zp = z, zm = z;
            zp[j] += h;
            zm[j] -= h;
            Vec fp = interpolate(zp);
            Vec fm = interpolate(zm);
            for (std::size_t i = 0; i < n; ++i)
                jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
        }
        acc += std::abs(det(jac));
    }
    return acc / static_cast<double>(samples);
}

LQProblem model_space_problem(double k, std::size_t n, double distance) {
    if (n < 2)
        fail(ErrorCode::invalid_argument, "model space needs dimension >= 2");
    if (!(distance > 0.0) || !std::isfinite(distance))
        fail(ErrorCode::invalid_argument, "distance must be positive");
    if (k > 0.0 &&
        !(distance < kPi * std::sqrt(static_cast<double>(n - 1) / k)))
        fail(ErrorCode::invalid_argument,
             "distance must be below pi sqrt((n-1)/k) for positive curvature");
    const double K = distance * distance * k / static_cast<double>(n - 1);
    Matrix q(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) q(i, i) = K;
    return LQProblem::create(Matrix(n, n), Matrix::identity(n), q, 1.0);
}

double model_beta(double k, std::size_t n, double theta, double tau) {
    if (n < 1) fail(ErrorCode::invalid_argument, "dimension must be >= 1");
    if (!(tau >= 0.0) || !(tau <= 1.0))
        fail(ErrorCode::invalid_argument, "tau must lie in [0, 1]");
    if (!(theta >= 0.0) || !std::isfinite(theta))
        fail(ErrorCode::invalid_argument, "theta must be nonnegative");
    if (k > 0.0 && theta >= kPi)
        fail(ErrorCode::invalid_argument,
             "theta must be below pi for positive curvature");
    const double e = static_cast<double>(n - 1);
    if (k == 0.0 || theta < 1e-12) return std::pow(tau, static_cast<double>(n));
    if (k > 0.0) return tau * std::pow(std::sin(tau * theta) / std::sin(theta), e);
    return tau * std::pow(std::sinh(tau * theta) / std::sinh(theta), e);
}

WMatrixResult w_matrix(const LQProblem& problem, double tau) {
    if (!std::isfinite(tau))
        fail(ErrorCode::invalid_argument, "tau must be finite");
    const auto w_at = [&](double t) {
        const FlowBlocks fb = flow_blocks(problem, t);
        if (smallest_singular_ratio(fb.R1) <= 1e-12)
            fail(ErrorCode::singular_matrix,
                 "R1 is singular: tau is outside the W window");
        return fb.R3 * inverse(fb.R1);
    };

    WMatrixResult res;
    res.W = w_at(tau);
    res.sym_residual = sym_residual(res.W);
    res.min_eig = sym_eigen(symmetrized(res.W)).values.front();

    const Matrix wp = w_at(tau + kFdStep);
    const Matrix wm = w_at(tau - kFdStep);
    const Matrix w_dot = (wp - wm) * (1.0 / (2.0 * kFdStep));
    const Matrix bbt = problem.B() * problem.B().transpose();
    const Matrix rhs = bbt + problem.A() * res.W +
                       res.W * problem.A().transpose() +
                       res.W * problem.Q() * res.W;
    res.riccati_residual = (w_dot - rhs).max_abs();
    return res;
}

double w_window(const LQProblem& problem) {
    const std::size_t nodes = 1024;
    const double step = problem.T() / static_cast<double>(nodes - 1);
    FlowSampler sampler(problem, 0.0, step);
    double window = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const FlowBlocks fb = sampler.next();
        if (log_abs_det_sign(fb.R1).sign != 1) break;
        window = fb.tau;
    }
    return window;
}

SMatrixResult s_matrix(const LQProblem& problem, double tau) {
    if (!(tau > 0.0) || !(tau <= problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in (0, T]");
    const auto s_at = [&](double t) {
        const FlowBlocks fb = flow_blocks(problem, t);
        if (smallest_singular_ratio(fb.R3) <= 1e-12)
            fail(ErrorCode::conjugate_time, "R3 is singular");
        return solve(fb.R3, fb.R4);
    };

    SMatrixResult res;
    res.S = s_at(tau);
    res.sym_residual = sym_residual(res.S);
    const Matrix sp = s_at(tau + kFdStep);
    const Matrix sm = s_at(tau - kFdStep);
    const Matrix s_dot = symmetrized((sp - sm) * (1.0 / (2.0 * kFdStep)));
    res.s_dot_max_eig = sym_eigen(s_dot).values.back();
    return res;
}

JacobianEstimate jacobian_estimate_check(const LQProblem& problem,
                                         const Matrix& grad_T_s, double tau,
                                         double s) {
    const std::size_t n = problem.n();
    if (grad_T_s.rows() != n || grad_T_s.cols() != n)
        fail(ErrorCode::dimension_mismatch,
             "Jacobian must match the state dimension");
    if (!(tau > 0.0) || !(tau <= s) || !(s <= problem.T()))
        fail(ErrorCode::invalid_argument, "need 0 < tau <= s <= T");

    const Matrix r3_s = flow_blocks(problem, s).R3;
    if (smallest_singular_ratio(r3_s) <= 1e-12)
        fail(ErrorCode::conjugate_time, "R3(s) is singular");
    const Matrix hessian = solve(r3_s, grad_T_s);
    const double scale = std::max(1.0, hessian.max_abs());
    if (sym_residual(hessian) > 1e-8 * scale)
        fail(ErrorCode::invalid_argument,
             "R3(s)^{-1} grad_T_s must be symmetric");
    if (sym_eigen(symmetrized(hessian)).values.front() < -1e-10 * scale)
        fail(ErrorCode::invalid_argument,
             "R3(s)^{-1} grad_T_s must be nonnegative");

    const Matrix r3_back = flow_blocks(problem, tau - s).R3;
    const Matrix r3_neg_s = flow_blocks(problem, -s).R3;
    const Matrix r3_tau = flow_blocks(problem, tau).R3;
    if (smallest_singular_ratio(r3_neg_s) <= 1e-12)
        fail(ErrorCode::conjugate_time, "R3(-s) is singular");

    const Matrix grad_tau = r3_back * inverse(r3_neg_s) + r3_tau * hessian;

    const DetLog d_grad_tau = log_abs_det_sign(grad_tau);
    const DetLog d_back = log_abs_det_sign(r3_back);
    const DetLog d_neg_s = log_abs_det_sign(r3_neg_s);
    const DetLog d_tau = log_abs_det_sign(r3_tau);
    const DetLog d_s = log_abs_det_sign(r3_s);
    const DetLog d_grad_s = log_abs_det_sign(grad_T_s);

    JacobianEstimate est;
    if (d_grad_tau.sign == 0)
        est.lhs = 0.0;
    else
        est.lhs = static_cast<double>(d_grad_tau.sign) *
                  std::exp(d_grad_tau.log_abs / static_cast<double>(n));
    const double term1 = root_of_ratio({d_back}, {d_neg_s}, n);
    const double term2 = root_of_ratio({d_tau, d_grad_s}, {d_s}, n);
    est.rhs = term1 + term2;
    est.slack = est.lhs - est.rhs;
    return est;
}

}  // namespace lqot
