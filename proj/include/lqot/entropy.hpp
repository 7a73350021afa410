// Displacement-convexity classes, entropy functionals on Gaussians, and the
// density / entropic interpolation inequality checkers.
#pragma once

#include <cstdint>
#include <optional>

#include "lqot/dynamics.hpp"
#include "lqot/gaussian.hpp"

namespace lqot {

enum class DCKind { power, neg_power, xlogx };

// U: [0, inf) -> R with U(0) = 0.
struct DCFunction {
    DCKind kind = DCKind::xlogx;
    double param = 0.0;  // alpha for power, N for neg_power

    double operator()(double r) const;
};

DCFunction dc_power(double alpha);      // r^alpha, alpha >= 1
DCFunction dc_neg_power(double order);  // -r^{1 - 1/order}, order >= 1
DCFunction dc_xlogx();                  // r log r

// Sampled convexity of delta^N U(delta^{-N}) on 512 log-spaced points
// (exp(delta) U(exp(-delta)) on a linear grid when N is infinite).
bool dc_membership(const DCFunction& U, double N);

struct EntropyEstimate {
    double value = 0.0;
    double std_error = 0.0;
    // Closed-form Gaussian value for the power families; empty for xlogx.
    std::optional<double> analytic;
};

// Monte-Carlo estimate of the integral of U(rho) against Lebesgue measure,
// written as E_mu[U(rho(X)) / rho(X)].
EntropyEstimate entropy_functional(const DCFunction& U,
                                   const GaussianMeasure& mu,
                                   std::size_t mc_samples, std::uint64_t seed);

// Minimum over sampled x ~ mu of
//   rho_tau(T_tau x)^{-1/n} - beta_{T-tau}^{1/n} rho_0(x)^{-1/n}
//                           - beta_tau^{1/n} rho_T(T x)^{-1/n};
// one_sided drops the final term (the singular-target form).
double density_inequality_check(const LQProblem& problem,
                                const GaussianMeasure& mu,
                                const GaussianMeasure& nu, double tau,
                                std::size_t sample_points, std::uint64_t seed,
                                bool one_sided = false);

struct EntropicCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;      // rhs - lhs
    double std_error = 0.0;  // combined Monte-Carlo standard error
};

// Convexity-of-entropy inequality along the displacement interpolation at
// time tau in (0, T); U must belong to the class of the state dimension.
EntropicCheck entropic_inequality_check(const LQProblem& problem,
                                        const DCFunction& U,
                                        const GaussianMeasure& mu,
                                        const GaussianMeasure& nu, double tau,
                                        std::size_t mc_samples,
                                        std::uint64_t seed);

}  // namespace lqot
