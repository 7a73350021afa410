#include "lqot/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqot/comparison.hpp"
#include "lqot/error.hpp"
#include "lqot/kernels.hpp"
#include "lqot/linalg.hpp"

namespace lqot {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_det_cov(const GaussianMeasure& g) {
    const Matrix chol = cholesky(g.cov.mat());
    double log_det = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i)
        log_det += 2.0 * std::log(chol(i, i));
    return log_det;
}

struct McMoments {
    double mean = 0.0;
    double std_error = 0.0;
};

// E_mu[U(scale * rho(X)) / rho(X)], i.e. the integral of U(scale * rho)
// against Lebesgue measure, by importance sampling from mu.
McMoments mc_scaled_integral(const DCFunction& U, const GaussianMeasure& mu,
                             double scale, std::size_t samples,
                             std::uint64_t seed) {
    if (samples < 2)
        fail(ErrorCode::invalid_argument, "need at least two samples");
    Vec xs = sample_gaussian(mu, samples, Rng(seed));
    Vec ld = gaussian_log_density_batch(mu, xs, samples);
    Vec vals(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double rho = std::exp(ld[k]);
        const double v = U(scale * rho) * std::exp(-ld[k]);
        if (!std::isfinite(v))
            fail(ErrorCode::no_convergence,
                 "entropy integration failed: non-finite Monte-Carlo term");
        vals[k] = v;
    }
    McMoments m;
    m.mean = kernels::sum(samples, vals.data()) / static_cast<double>(samples);
    double ss = 0.0;
    for (double v : vals) ss += (v - m.mean) * (v - m.mean);
    m.std_error = std::sqrt(ss / (static_cast<double>(samples) - 1.0) /
                            static_cast<double>(samples));
    if (!std::isfinite(m.mean) || !std::isfinite(m.std_error))
        fail(ErrorCode::no_convergence,
             "entropy integration failed: unbounded variance");
    return m;
}

// Integral of rho^p for a Gaussian density, p > 0.
double gaussian_power_integral(const GaussianMeasure& g, double p) {
    const double n = static_cast<double>(g.dim());
    const double log_val = 0.5 * n * (1.0 - p) * kLog2Pi +
                           0.5 * (1.0 - p) * log_det_cov(g) -
                           0.5 * n * std::log(p);
    return std::exp(log_val);
}

}  // namespace

double DCFunction::operator()(double r) const {
    if (!(r >= 0.0))
        fail(ErrorCode::invalid_argument, "DC functions take nonnegative input");
    if (r == 0.0) return 0.0;
    switch (kind) {
        case DCKind::power:
            return std::pow(r, param);
        case DCKind::neg_power:
            return -std::pow(r, 1.0 - 1.0 / param);
        case DCKind::xlogx:
            return r * std::log(r);
    }
    fail(ErrorCode::invalid_argument, "unknown DC function kind");
}

DCFunction dc_power(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha))
        fail(ErrorCode::invalid_argument, "power exponent must be >= 1");
    return DCFunction{DCKind::power, alpha};
}

DCFunction dc_neg_power(double order) {
    if (!(order >= 1.0) || !std::isfinite(order))
        fail(ErrorCode::invalid_argument, "neg_power order must be >= 1");
    return DCFunction{DCKind::neg_power, order};
}

DCFunction dc_xlogx() { return DCFunction{DCKind::xlogx, 0.0}; }

bool dc_membership(const DCFunction& U, double N) {
    if (!(N >= 1.0))
        fail(ErrorCode::invalid_argument, "class dimension must be >= 1");
    const std::size_t nodes = 512;
    Vec deltas(nodes), u(nodes);
    if (std::isinf(N)) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double d = -12.0 + 24.0 * static_cast<double>(i) /
                                         static_cast<double>(nodes - 1);
            deltas[i] = d;
            u[i] = std::exp(d) * U(std::exp(-d));
        }
    } else {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double e = -3.0 + 6.0 * static_cast<double>(i) /
                                        static_cast<double>(nodes - 1);
            const double d = std::pow(10.0, e);
            deltas[i] = d;
            u[i] = std::pow(d, N) * U(std::pow(d, -N));
        }
    }
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        const double h0 = deltas[i] - deltas[i - 1];
        const double h1 = deltas[i + 1] - deltas[i];
        const double left = (u[i] - u[i - 1]) / h0;
        const double right = (u[i + 1] - u[i]) / h1;
        const double second = (right - left) / (h0 + h1);
        const double scale = std::max(
            {1.0, std::abs(u[i - 1]), std::abs(u[i]), std::abs(u[i + 1])});
        // Second differences amplify rounding in u by 1/h^2; keep the
        // violation threshold above that floor so flat profiles (power with
        // alpha = 1, neg_power right at the class boundary) are not
        // misclassified by noise.
        const double noise = 1e-12 * scale / (std::min(h0, h1) * (h0 + h1));
        if (second < -(1e-9 * scale + noise)) return false;
    }
    return true;
}

EntropyEstimate entropy_functional(const DCFunction& U,
                                   const GaussianMeasure& mu,
                                   std::size_t mc_samples,
                                   std::uint64_t seed) {
    const McMoments m = mc_scaled_integral(U, mu, 1.0, mc_samples, seed);
    EntropyEstimate est;
    est.value = m.mean;
    est.std_error = m.std_error;
    if (U.kind == DCKind::power)
        est.analytic = gaussian_power_integral(mu, U.param);
    else if (U.kind == DCKind::neg_power && U.param > 1.0)
        est.analytic = -gaussian_power_integral(mu, 1.0 - 1.0 / U.param);
    return est;
}

double density_inequality_check(const LQProblem& problem,
                                const GaussianMeasure& mu,
                                const GaussianMeasure& nu, double tau,
                                std::size_t sample_points, std::uint64_t seed,
                                bool one_sided) {
    if (!(tau >= 0.0) || !(tau <= problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in [0, T]");
    if (sample_points == 0)
        fail(ErrorCode::invalid_argument, "need at least one sample point");
    const std::size_t n = problem.n();
    const double inv_n = 1.0 / static_cast<double>(n);

    const AffineMap full_map = lq_transport_map(problem, mu, nu);
    const AffineMap tau_map = intermediate_map(problem, mu, nu, tau);
    const GaussianMeasure mu_tau = pushforward_gaussian(tau_map, mu);
    const GaussianMeasure mu_T = pushforward_gaussian(full_map, mu);
    const double beta_tau = distortion_coefficient(problem, tau);
    const double beta_rev = distortion_coefficient(problem, problem.T() - tau);
    const double w_rev = std::pow(beta_rev, inv_n);
    const double w_tau = std::pow(beta_tau, inv_n);

    Vec xs = sample_gaussian(mu, sample_points, Rng(seed));
    Vec ys_tau(sample_points * n), ys_T(sample_points * n);
    const Matrix tau_lin_t = tau_map.linear.transpose();
    const Matrix full_lin_t = full_map.linear.transpose();
    kernels::batch_affine(sample_points, n, n, xs.data(), tau_lin_t.data(),
                          tau_map.offset.data(), ys_tau.data());
    kernels::batch_affine(sample_points, n, n, xs.data(), full_lin_t.data(),
                          full_map.offset.data(), ys_T.data());

    const Vec ld_tau = gaussian_log_density_batch(mu_tau, ys_tau, sample_points);
    const Vec ld_0 = gaussian_log_density_batch(mu, xs, sample_points);
    const Vec ld_T = gaussian_log_density_batch(mu_T, ys_T, sample_points);

    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sample_points; ++k) {
        double slack = std::exp(-ld_tau[k] * inv_n) -
                       w_rev * std::exp(-ld_0[k] * inv_n);
        if (!one_sided) slack -= w_tau * std::exp(-ld_T[k] * inv_n);
        if (!std::isfinite(slack))
            fail(ErrorCode::no_convergence,
                 "density check failed: non-finite term");
        min_slack = std::min(min_slack, slack);
    }
    return min_slack;
}

EntropicCheck entropic_inequality_check(const LQProblem& problem,
                                        const DCFunction& U,
                                        const GaussianMeasure& mu,
                                        const GaussianMeasure& nu, double tau,
                                        std::size_t mc_samples,
                                        std::uint64_t seed) {
    const std::size_t n = problem.n();
    if (!dc_membership(U, static_cast<double>(n)))
        fail(ErrorCode::invalid_argument,
             "U is not in the displacement convexity class of the dimension");
    if (!(tau > 0.0) || !(tau < problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in (0, T)");

    const double T = problem.T();
    const double nd = static_cast<double>(n);
    const AffineMap tau_map = intermediate_map(problem, mu, nu, tau);
    const GaussianMeasure mu_tau = pushforward_gaussian(tau_map, mu);
    const double beta_tau = distortion_coefficient(problem, tau);
    const double beta_rev = distortion_coefficient(problem, T - tau);

    const double pre_0 = std::pow(T / (T - tau), nd - 1.0) * beta_rev;
    const double arg_0 = std::pow((T - tau) / T, nd) / beta_rev;
    const double pre_T = std::pow(T / tau, nd - 1.0) * beta_tau;
    const double arg_T = std::pow(tau / T, nd) / beta_tau;

    const McMoments lhs = mc_scaled_integral(U, mu_tau, 1.0, mc_samples, seed);
    const McMoments from_mu =
        mc_scaled_integral(U, mu, arg_0, mc_samples, seed + 1);
    const McMoments from_nu =
        mc_scaled_integral(U, nu, arg_T, mc_samples, seed + 2);

    EntropicCheck check;
    check.lhs = lhs.mean;
    check.rhs = pre_0 * from_mu.mean + pre_T * from_nu.mean;
    check.slack = check.rhs - check.lhs;
    check.std_error = std::sqrt(lhs.std_error * lhs.std_error +
                                pre_0 * pre_0 * from_mu.std_error *
                                    from_mu.std_error +
                                pre_T * pre_T * from_nu.std_error *
                                    from_nu.std_error);
    return check;
}

}  // namespace lqot
