// Seeded generators for problems and measures, shared by the verification
// suites and the tests.
#pragma once

#include <cstddef>

#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/gaussian.hpp"
#include "lqot/rng.hpp"

namespace lqot {

struct RandomProblemOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 4;
    bool square_b = false;    // force m = n
    bool negative_q = false;  // force Q <= 0 (then no conjugate time exists)
    double a_scale = 0.7;
    double q_scale = 0.8;
    double t_max = 1.0;  // horizon, shortened when a conjugate time is near
};

// Draws (A, B, Q) until the Kalman condition holds, then picks T safely
// below the first conjugate time (at most t_max).
LQProblem random_problem(Rng& rng, const RandomProblemOptions& opts = {});

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                     double scale);
Matrix random_spd(Rng& rng, std::size_t n, double scale);

GaussianMeasure random_gaussian(Rng& rng, std::size_t dim, double mean_scale,
                                double cov_scale);

DiscreteMeasure random_discrete(Rng& rng, std::size_t count, std::size_t dim,
                                double spread, bool uniform_weights);

}  // namespace lqot
