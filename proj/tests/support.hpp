#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lfmd/geometry.hpp"

namespace lfmd::testing {

inline Vector uniform_box(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return Vector(std::move(v));
}

/// Dirichlet(1) sample pushed above `floor`.
inline Vector uniform_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) s += (x = e(rng) + 1e-300);
  for (auto& x : v) x = floor + (1.0 - floor * static_cast<double>(n)) * x / s;
  return Vector(std::move(v));
}

inline Vector sample(std::mt19937_64& rng, const FeasibleSet& q) {
  if (const auto* b = q.as_box()) {
    std::vector<double> v(q.dim());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::uniform_real_distribution<double>(b->lower[i], b->upper[i])(rng);
    return Vector(std::move(v));
  }
  if (const auto* s = q.as_simplex()) return uniform_simplex(rng, s->dim, s->floor);
  const auto* ball = q.as_ball2();
  Vector d = uniform_box(rng, q.dim(), -1.0, 1.0);
  const double r = std::sqrt(dot(d, d));
  const double t = ball->radius * std::pow(std::uniform_real_distribution<double>(0, 1)(rng),
                                           1.0 / static_cast<double>(q.dim()));
  return axpy(ball->center, t / r, d);
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace lfmd::testing
