#include "lqot/random_instances.hpp"

#include <algorithm>
#include <cmath>

#include "lqot/error.hpp"
#include "lqot/linalg.hpp"

namespace lqot {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                     double scale) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
        m.data()[i] = scale * rng.normal();
    return m;
}

Matrix random_spd(Rng& rng, std::size_t n, double scale) {
    const Matrix g = random_matrix(rng, n, n, 1.0);
    Matrix s = g * g.transpose();
    s *= scale / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.25 * scale;
    return s;
}

GaussianMeasure random_gaussian(Rng& rng, std::size_t dim, double mean_scale,
                                double cov_scale) {
    Vec mean(dim);
    for (double& v : mean) v = mean_scale * rng.normal();
    return make_gaussian(std::move(mean), random_spd(rng, dim, cov_scale));
}

DiscreteMeasure random_discrete(Rng& rng, std::size_t count, std::size_t dim,
                                double spread, bool uniform_weights) {
    if (count == 0)
        fail(ErrorCode::invalid_argument, "need at least one atom");
    std::vector<Vec> points(count, Vec(dim));
    for (Vec& p : points)
        for (double& v : p) v = spread * rng.normal();
    Vec weights(count, 1.0 / static_cast<double>(count));
    if (!uniform_weights) {
        double total = 0.0;
        for (double& w : weights) {
            w = 0.2 + 0.8 * rng.uniform();
            total += w;
        }
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            weights[i] /= total;
            partial += weights[i];
        }
        weights[count - 1] = 1.0 - partial;
    }
    return make_discrete(std::move(points), std::move(weights));
}

LQProblem random_problem(Rng& rng, const RandomProblemOptions& opts) {
    if (opts.n_min == 0 || opts.n_min > opts.n_max)
        fail(ErrorCode::invalid_argument, "invalid dimension range");
    if (!(opts.t_max > 0.0))
        fail(ErrorCode::invalid_argument, "t_max must be positive");

    for (std::size_t attempt = 0; attempt < 200; ++attempt) {
        const std::size_t n =
            opts.n_min + rng.index(opts.n_max - opts.n_min + 1);
        const std::size_t m = opts.square_b ? n : 1 + rng.index(n);
        const double root_n = std::sqrt(static_cast<double>(n));

        const Matrix a = random_matrix(rng, n, n, opts.a_scale / root_n);
        const Matrix b = random_matrix(rng, n, m, 1.0);
        if (rank_with_tolerance(b, 1e-10) != m) continue;

        Matrix q;
        if (opts.negative_q) {
            const Matrix g = random_matrix(rng, n, n, 1.0);
            q = g * g.transpose();
            q *= -opts.q_scale / static_cast<double>(n);
        } else {
            const Matrix g = random_matrix(rng, n, n, opts.q_scale / root_n);
            q = (g + g.transpose()) * 0.5;
        }
        if (!kalman_condition(a, b)) continue;

        try {
            double T = opts.t_max;
            if (!opts.negative_q) {
                const LQProblem probe =
                    LQProblem::create(a, b, q, 1e-3 * opts.t_max);
                const auto t_star =
                    first_conjugate_time(probe, 3.0 * opts.t_max);
                if (t_star) T = std::min(opts.t_max, 0.6 * *t_star);
                if (T < 1e-3 * opts.t_max) continue;
            }
            return LQProblem::create(a, b, q, T);
        } catch (const Error&) {
            continue;
        }
    }
    fail(ErrorCode::no_convergence,
         "failed to generate a feasible random problem");
}

}  // namespace lqot
