#include "lqot/gaussian.hpp"

#include <cmath>
#include <utility>

#include "lqot/error.hpp"
#include "lqot/kernels.hpp"

namespace lqot {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

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

}  // namespace

GaussianMeasure make_gaussian(Vec mean, Matrix cov) {
    SpdMatrix spd(std::move(cov));
    if (mean.size() != spd.dim())
        fail(ErrorCode::dimension_mismatch,
             "gaussian mean length does not match covariance dimension");
    for (double v : mean)
        if (!std::isfinite(v))
            fail(ErrorCode::invalid_argument, "gaussian mean must be finite");
    return GaussianMeasure{std::move(mean), std::move(spd)};
}

Vec AffineMap::operator()(const Vec& x) const {
    Vec y = linear.apply(x);
    if (y.size() != offset.size())
        fail(ErrorCode::dimension_mismatch, "affine map offset length mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += offset[i];
    return y;
}

AffineMap identity_map(std::size_t n) {
    return AffineMap{Matrix::identity(n), Vec(n, 0.0)};
}

AffineMap compose(const AffineMap& g, const AffineMap& f) {
    if (g.dim_in() != f.dim_out())
        fail(ErrorCode::dimension_mismatch, "affine composition dimension mismatch");
    return AffineMap{g.linear * f.linear, g(f.offset)};
}

AffineMap brenier_affine(const GaussianMeasure& mu, const GaussianMeasure& nu) {
    if (mu.dim() != nu.dim())
        fail(ErrorCode::dimension_mismatch, "brenier_affine dimension mismatch");
    const Matrix root = spd_sqrt(mu.cov.mat());
    const Matrix inv_root = inverse(root);
    const Matrix middle = symmetrized(root * nu.cov.mat() * root);
    const Matrix middle_root = spd_sqrt(middle);
    Matrix linear = symmetrized(inv_root * middle_root * inv_root);
    Vec offset = nu.mean - linear.apply(mu.mean);
    return AffineMap{std::move(linear), std::move(offset)};
}

AffineMap lq_transport_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu) {
    return lq_transport_map(problem, mu, nu, 0.0, problem.T());
}

AffineMap lq_transport_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu, double t, double s) {
    if (mu.dim() != problem.n() || nu.dim() != problem.n())
        fail(ErrorCode::dimension_mismatch,
             "transport map measures must match the state dimension");
    if (!(t >= 0.0) || !(s <= problem.T()) || !(t < s))
        fail(ErrorCode::invalid_argument,
             "transport window must satisfy 0 <= t < s <= T");
    const FlowBlocks fb = flow_blocks(problem, s - t);
    if (smallest_singular_ratio(fb.R3) <= 1e-12)
        fail(ErrorCode::conjugate_time,
             "flow block R3 is singular at the requested duration");
    const Matrix r3_inv = inverse(fb.R3);
    GaussianMeasure eta =
        make_gaussian(r3_inv.apply(nu.mean),
                      symmetrized(r3_inv * nu.cov.mat() * r3_inv.transpose()));
    const AffineMap phi = brenier_affine(mu, eta);
    return AffineMap{fb.R3 * phi.linear, fb.R3.apply(phi.offset)};
}

AffineMap psi_gradient_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu) {
    if (mu.dim() != problem.n() || nu.dim() != problem.n())
        fail(ErrorCode::dimension_mismatch,
             "transport map measures must match the state dimension");
    const FlowBlocks fb = flow_blocks(problem, problem.T());
    if (smallest_singular_ratio(fb.R3) <= 1e-12)
        fail(ErrorCode::conjugate_time, "flow block R3 is singular at time T");
    const Matrix r3_inv = inverse(fb.R3);
    GaussianMeasure eta =
        make_gaussian(r3_inv.apply(nu.mean),
                      symmetrized(r3_inv * nu.cov.mat() * r3_inv.transpose()));
    const AffineMap phi = brenier_affine(mu, eta);
    const Matrix c = r3_inv * fb.R4;
    return AffineMap{phi.linear - c, phi.offset};
}

AffineMap intermediate_map(const LQProblem& problem, const GaussianMeasure& mu,
                           const GaussianMeasure& nu, double tau) {
    if (!(tau >= 0.0) || !(tau <= problem.T()))
        fail(ErrorCode::invalid_argument, "tau must lie in [0, T]");
    const AffineMap psi = psi_gradient_map(problem, mu, nu);
    const FlowBlocks fb = flow_blocks(problem, tau);
    return AffineMap{fb.R3 * psi.linear + fb.R4, fb.R3.apply(psi.offset)};
}

GaussianMeasure pushforward_gaussian(const AffineMap& map,
                                     const GaussianMeasure& mu) {
    if (map.dim_in() != mu.dim())
        fail(ErrorCode::dimension_mismatch, "pushforward dimension mismatch");
    Vec mean = map(mu.mean);
    Matrix cov =
        symmetrized(map.linear * mu.cov.mat() * map.linear.transpose());
    return make_gaussian(std::move(mean), std::move(cov));
}

double gaussian_log_density(const GaussianMeasure& mu, const Vec& x) {
    if (x.size() != mu.dim())
        fail(ErrorCode::dimension_mismatch, "density point dimension mismatch");
    const std::size_t n = mu.dim();
    const Matrix chol = cholesky(mu.cov.mat());
    double log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_det += 2.0 * std::log(chol(i, i));
    Vec centered = x - mu.mean;
    Vec sol = solve(mu.cov.mat(), centered);
    double quad = dot(centered, sol);
    return -0.5 * (static_cast<double>(n) * std::log(kTwoPi) + log_det + quad);
}

double gaussian_density(const GaussianMeasure& mu, const Vec& x) {
    return std::exp(gaussian_log_density(mu, x));
}

Vec gaussian_log_density_batch(const GaussianMeasure& mu, const Vec& points,
                               std::size_t count) {
    const std::size_t n = mu.dim();
    if (points.size() != count * n)
        fail(ErrorCode::dimension_mismatch, "batch points size mismatch");
    const Matrix chol = cholesky(mu.cov.mat());
    double log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_det += 2.0 * std::log(chol(i, i));
    const double log_norm =
        -0.5 * (static_cast<double>(n) * std::log(kTwoPi) + log_det);
    const Matrix precision = inverse(mu.cov.mat());
    Vec centered(points);
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i < n; ++i) centered[k * n + i] -= mu.mean[i];
    Vec quad(count, 0.0);
    kernels::batch_quadform(count, n, centered.data(), precision.data(),
                            quad.data());
    Vec out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = log_norm - 0.5 * quad[k];
    return out;
}

Vec sample_gaussian(const GaussianMeasure& mu, std::size_t count, Rng rng) {
    const std::size_t n = mu.dim();
    const Matrix chol = cholesky(mu.cov.mat());
    const Matrix chol_t = chol.transpose();
    Vec normals = rng.normal_vec(count * n);
    Vec out(count * n);
    Vec shift = mu.mean;
    kernels::batch_affine(count, n, n, normals.data(), chol_t.data(),
                          shift.data(), out.data());
    return out;
}

}  // namespace lqot
