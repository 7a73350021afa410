// Gaussian measures, affine maps, and closed-form optimal transport between
// Gaussians under both the Euclidean and the LQ cost.
#pragma once

#include <cstdint>

#include "lqot/dynamics.hpp"
#include "lqot/linalg.hpp"
#include "lqot/matrix.hpp"
#include "lqot/rng.hpp"

namespace lqot {

struct GaussianMeasure {
    Vec mean;
    SpdMatrix cov;

    std::size_t dim() const { return mean.size(); }
};

GaussianMeasure make_gaussian(Vec mean, Matrix cov);

struct AffineMap {
    Matrix linear;
    Vec offset;

    Vec operator()(const Vec& x) const;
    std::size_t dim_in() const { return linear.cols(); }
    std::size_t dim_out() const { return linear.rows(); }
};

AffineMap identity_map(std::size_t n);

// g after f: x |-> g(f(x)).
AffineMap compose(const AffineMap& g, const AffineMap& f);

// Gradient of the convex Brenier potential pushing mu to nu:
// linear part Sm^{-1/2} (Sm^{1/2} Sn Sm^{1/2})^{1/2} Sm^{-1/2}, symmetric
// positive definite; offset aligns the means.
AffineMap brenier_affine(const GaussianMeasure& mu, const GaussianMeasure& nu);

// Optimal map for the window cost c^{t,s}: x |-> R3(s-t) grad_phi(x) where
// grad_phi is the Euclidean Brenier map from mu to (R3(s-t)^{-1})_# nu.
// Defaults to the full horizon (0, T).
AffineMap lq_transport_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu);
AffineMap lq_transport_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu, double t, double s);

// x |-> grad_psi(x) = grad_phi(x) - C x, the initial covector field whose
// exponential at time T reproduces lq_transport_map.
AffineMap psi_gradient_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu);

// x |-> R3(tau)(grad_phi(x) - C x) + R4(tau) x; identity at tau = 0 and the
// full transport map at tau = T.
AffineMap intermediate_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu, double tau);

// Moments of map_# mu. The image covariance must stay positive definite;
// a rank-deficient linear part raises a not-SPD error.
GaussianMeasure pushforward_gaussian(const AffineMap& map,
                                     const GaussianMeasure& mu);

double gaussian_log_density(const GaussianMeasure& mu, const Vec& x);
double gaussian_density(const GaussianMeasure& mu, const Vec& x);

// Log-densities for `count` points stored row-major in `points`.
Vec gaussian_log_density_batch(const GaussianMeasure& mu, const Vec& points,
                               std::size_t count);

// `count` samples, row-major. The generator is taken by value so callers
// keep control of their stream.
Vec sample_gaussian(const GaussianMeasure& mu, std::size_t count, Rng rng);

}  // namespace lqot
