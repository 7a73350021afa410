#include "lqot/rng.hpp"

#include <cmath>

namespace lqot {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

std::vector<double> Rng::normal_vec(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = normal();
  return v;
}

std::vector<double> Rng::uniform_ball(std::size_t dim, double radius) {
  std::vector<double> z = normal_vec(dim);
  double nrm = 0.0;
  for (double x : z) nrm += x * x;
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) nrm = 1.0;
  const double r =
      radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
  for (double& x : z) x *= r / nrm;
  return z;
}

}  // namespace lqot
