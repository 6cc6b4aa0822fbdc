#include "lfmd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lfmd {

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::DomainError, "vector must have dim >= 1");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]))
      throw Error(ErrorCode::DomainError, "non-finite entry at index " + std::to_string(i));
  }
}

Vector::Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

Vector Vector::constant(std::size_t dim, double value) {
  return Vector(std::vector<double>(dim, value));
}

void require_same_dim(const Vector& x, const Vector& y) {
  if (x.dim() != y.dim())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
}

double dot(const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

Vector operator+(const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] + y[i];
  return Vector(std::move(out));
}

Vector operator-(const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] - y[i];
  return Vector(std::move(out));
}

Vector operator*(double s, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = s * x[i];
  return Vector(std::move(out));
}

Vector axpy(const Vector& x, double s, const Vector& y) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] + s * y[i];
  return Vector(std::move(out));
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s = std::max(s, std::abs(e));
  return s;
}

}  // namespace

double NormPair::primal(const Vector& v) const {
  return kind == NormKind::L2 ? norm2(v.entries()) : norm1(v.entries());
}

double NormPair::dual(const Vector& v) const {
  return kind == NormKind::L2 ? norm2(v.entries()) : norm_inf(v.entries());
}

// ---------------------------------------------------------------------------
// Feasible sets
// ---------------------------------------------------------------------------

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  require_same_dim(lower, upper);
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (lower[i] > upper[i])
      throw Error(ErrorCode::ConfigError, "box lower > upper at index " + std::to_string(i));
  }
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::box(std::size_t dim, double lower, double upper) {
  return box(Vector::constant(dim, lower), Vector::constant(dim, upper));
}

FeasibleSet FeasibleSet::ball2(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorCode::ConfigError, "ball radius must be positive");
  return FeasibleSet(Ball2{std::move(center), radius});
}

FeasibleSet FeasibleSet::simplex(std::size_t dim, double floor) {
  if (dim == 0) throw Error(ErrorCode::ConfigError, "simplex dim must be >= 1");
  if (!(floor >= 0.0) || !(floor * static_cast<double>(dim) < 1.0))
    throw Error(ErrorCode::ConfigError, "simplex floor must satisfy 0 <= floor * dim < 1");
  return FeasibleSet(Simplex{dim, floor});
}

SetKind FeasibleSet::kind() const noexcept { return static_cast<SetKind>(shape_.index()); }

std::size_t FeasibleSet::dim() const noexcept {
  if (const auto* b = as_box()) return b->lower.dim();
  if (const auto* b = as_ball2()) return b->center.dim();
  return as_simplex()->dim;
}

namespace {

void require_dim(const FeasibleSet& q, const Vector& x) {
  if (q.dim() != x.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dim " + std::to_string(x.dim()) +
                                                  " vs set dim " + std::to_string(q.dim()));
}

// Euclidean projection of y onto {z >= 0, sum z = total}. Sort-based, ties
// broken by index so the result is deterministic.
std::vector<double> project_scaled_simplex(const std::vector<double>& y, double total) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });

  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += y[order[j]];
    const double t = (cumsum - total) / static_cast<double>(j + 1);
    if (y[order[j]] - t > 0.0) theta = t;
  }
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::max(y[i] - theta, 0.0);
  return z;
}

}  // namespace

bool FeasibleSet::contains(const Vector& x, double tol) const {
  require_dim(*this, x);
  if (const auto* b = as_box()) {
    for (std::size_t i = 0; i < x.dim(); ++i) {
      if (x[i] < b->lower[i] - tol || x[i] > b->upper[i] + tol) return false;
    }
    return true;
  }
  if (const auto* b = as_ball2()) return norm2((x - b->center).entries()) <= b->radius + tol;
  const auto* s = as_simplex();
  double sum = 0.0;
  for (double e : x) {
    if (e < s->floor - tol) return false;
    sum += e;
  }
  return std::abs(sum - 1.0) <= tol;
}

Vector FeasibleSet::project(const Vector& x) const {
  require_dim(*this, x);
  if (const auto* b = as_box()) {
    std::vector<double> out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::clamp(x[i], b->lower[i], b->upper[i]);
    return Vector(std::move(out));
  }
  if (const auto* b = as_ball2()) {
    const Vector d = x - b->center;
    const double r = norm2(d.entries());
    if (r <= b->radius) return x;
    return axpy(b->center, b->radius / r, d);
  }
  const auto* s = as_simplex();
  const double n = static_cast<double>(s->dim);
  std::vector<double> shifted(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) shifted[i] = x[i] - s->floor;
  std::vector<double> z = project_scaled_simplex(shifted, 1.0 - n * s->floor);
  for (double& e : z) e += s->floor;
  return Vector(std::move(z));
}

// ---------------------------------------------------------------------------
// Mirror maps
// ---------------------------------------------------------------------------

double MirrorMap::value(const Vector& x) const {
  if (kind_ == MirrorKind::EuclideanHalfSq) return 0.5 * dot(x, x);
  double s = 0.0;
  for (double e : x) {
    if (e < 0.0) throw Error(ErrorCode::DomainError, "negative entry under entropy");
    if (e > 0.0) s += e * std::log(e);
  }
  return s;
}

Vector MirrorMap::gradient(const Vector& x) const {
  if (kind_ == MirrorKind::EuclideanHalfSq) return x;
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (!(x[i] > 0.0))
      throw Error(ErrorCode::DomainError, "entropy gradient needs strictly positive entries");
    out[i] = std::log(x[i]) + 1.0;
  }
  return Vector(std::move(out));
}

// ---------------------------------------------------------------------------
// Composite terms
// ---------------------------------------------------------------------------

CompositeTerm CompositeTerm::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::ConfigError, "l1 weight must be finite and >= 0");
  return CompositeTerm(L1Scaled{lambda});
}

CompositeTerm CompositeTerm::linear(Vector c) { return CompositeTerm(LinearTerm{std::move(c)}); }

CompositeKind CompositeTerm::kind() const noexcept {
  return static_cast<CompositeKind>(term_.index());
}

double CompositeTerm::value(const Vector& x) const {
  if (const auto* l = as_l1()) return l->lambda * norm1(x.entries());
  if (const auto* l = as_linear()) return dot(l->c, x);
  return 0.0;
}

bool CompositeTerm::nonnegative_on(const FeasibleSet& q) const {
  const auto* lin = as_linear();
  if (lin == nullptr) return true;
  const Vector& c = lin->c;
  if (c.dim() != q.dim())
    throw Error(ErrorCode::DimensionMismatch, "linear term dim does not match the set");
  double lowest = 0.0;
  if (const auto* b = q.as_box()) {
    for (std::size_t i = 0; i < c.dim(); ++i)
      lowest += std::min(c[i] * b->lower[i], c[i] * b->upper[i]);
  } else if (const auto* b = q.as_ball2()) {
    lowest = dot(c, b->center) - b->radius * norm2(c.entries());
  } else {
    const auto* s = q.as_simplex();
    const double csum = std::accumulate(c.begin(), c.end(), 0.0);
    const double cmin = *std::min_element(c.begin(), c.end());
    lowest = s->floor * csum + (1.0 - static_cast<double>(s->dim) * s->floor) * cmin;
  }
  return lowest >= -1e-12;
}

// ---------------------------------------------------------------------------
// Bregman divergence and identities
// ---------------------------------------------------------------------------

double bregman(const MirrorMap& map, const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  double s = 0.0;
  if (map.kind() == MirrorKind::EuclideanHalfSq) {
    for (std::size_t i = 0; i < x.dim(); ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  // Entropy: sum x log(x/y) - x + y, the same quantity as the defining
  // expression with the psi terms cancelled analytically.
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (!(y[i] > 0.0)) throw Error(ErrorCode::DomainError, "entropy Bregman needs y > 0");
    if (x[i] < 0.0) throw Error(ErrorCode::DomainError, "entropy Bregman needs x >= 0");
    const double xlog = x[i] > 0.0 ? x[i] * std::log(x[i] / y[i]) : 0.0;
    s += xlog - x[i] + y[i];
  }
  return s;
}

double bregman_difference(const MirrorMap& map, const Vector& u, const Vector& x, const Vector& y) {
  require_same_dim(u, x);
  require_same_dim(x, y);
  double s = 0.0;
  if (map.kind() == MirrorKind::EuclideanHalfSq) {
    // 0.5|u-x|^2 - 0.5|u-y|^2 = (y - x) . (u - (x + y)/2)
    for (std::size_t i = 0; i < u.dim(); ++i) s += (y[i] - x[i]) * (u[i] - 0.5 * (x[i] + y[i]));
    return s;
  }
  for (std::size_t i = 0; i < u.dim(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorCode::DomainError, "entropy Bregman needs strictly positive arguments");
    if (u[i] > 0.0) s += u[i] * std::log1p((y[i] - x[i]) / x[i]);
    s += x[i] - y[i];
  }
  return s;
}

double three_point_residual(const MirrorMap& map, const Vector& a, const Vector& b,
                            const Vector& c) {
  const double lhs = dot(map.gradient(b) - map.gradient(a), c - a);
  const double rhs = bregman(map, c, a) + bregman(map, a, b) - bregman(map, c, b);
  return lhs - rhs;
}

double second_prox_residual(const MirrorMap& map, const Vector& prev, const Vector& next,
                            const Vector& u, double phi_u, double phi_next) {
  return dot(map.gradient(prev) - map.gradient(next), u - next) - (phi_u - phi_next);
}

// ---------------------------------------------------------------------------
// Mirror steps
// ---------------------------------------------------------------------------

bool is_supported(const MirrorMap& map, const FeasibleSet& q) noexcept {
  return map.kind() == MirrorKind::EuclideanHalfSq || q.kind() == SetKind::Simplex;
}

namespace {

void check_step_inputs(const MirrorMap& map, const FeasibleSet& q, const Vector& x0,
                       const Vector& g, double gamma) {
  require_dim(q, x0);
  require_same_dim(x0, g);
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::DomainError, "step size must be positive and finite");
  if (!is_supported(map, q))
    throw Error(ErrorCode::UnsupportedGeometry, "entropy mirror map requires a simplex");
}

// Exponentiated-gradient step on the (floored) simplex. The unconstrained
// minimiser is proportional to y_i = x_i exp(-gamma g_i); with a floor the
// KKT conditions give x_i = max(floor, c * y_i) with c fixed by sum x = 1.
Vector entropy_simplex_step(const Simplex& s, const Vector& x0, const Vector& g, double gamma) {
  const std::size_t n = x0.dim();
  std::vector<double> expo(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x0[i] < 0.0) throw Error(ErrorCode::DomainError, "entropy step needs x >= 0");
    expo[i] = -gamma * g[i];
  }
  // Renormalisation cancels the shift exactly; after it every exponent is <= 0.
  const double shift = *std::max_element(expo.begin(), expo.end());
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] * std::exp(expo[i] - shift);

  if (s.floor == 0.0) {
    const double total = std::accumulate(y.begin(), y.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total))
      throw Error(ErrorCode::NumericalOverflow, "exponentiated-gradient normaliser degenerate");
    for (double& e : y) e /= total;
    return Vector(std::move(y));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });

  // Try "top t entries free, the rest clamped" for t = n, n-1, ..., 1.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + y[order[j]];
  for (std::size_t t = n; t >= 1; --t) {
    const double free_mass = 1.0 - static_cast<double>(n - t) * s.floor;
    if (!(prefix[t] > 0.0)) continue;
    const double c = free_mass / prefix[t];
    if (!std::isfinite(c)) continue;
    const bool free_ok = c * y[order[t - 1]] >= s.floor;
    const bool clamped_ok = t == n || c * y[order[t]] <= s.floor;
    if (free_ok && clamped_ok) {
      std::vector<double> out(n, s.floor);
      for (std::size_t j = 0; j < t; ++j) out[order[j]] = c * y[order[j]];
      return Vector(std::move(out));
    }
  }
  throw Error(ErrorCode::NumericalOverflow, "floored exponentiated-gradient step has no solution");
}

Vector euclidean_step(const FeasibleSet& q, const Vector& x0, const Vector& g, double gamma) {
  std::vector<double> z(x0.dim());
  for (std::size_t i = 0; i < x0.dim(); ++i) z[i] = x0[i] - gamma * g[i];
  return q.project(Vector(std::move(z)));
}

bool all_zero(const Vector& g) {
  return std::all_of(g.begin(), g.end(), [](double e) { return e == 0.0; });
}

}  // namespace

Vector mirror_step(const MirrorMap& map, const FeasibleSet& q, const Vector& x0, const Vector& g,
                   double gamma) {
  check_step_inputs(map, q, x0, g, gamma);
  // For x0 in Q the minimiser of V(., x0) is x0 itself.
  if (all_zero(g)) return x0;
  if (map.kind() == MirrorKind::EuclideanHalfSq) return euclidean_step(q, x0, g, gamma);
  return entropy_simplex_step(*q.as_simplex(), x0, g, gamma);
}

Vector composite_mirror_step(const MirrorMap& map, const FeasibleSet& q, const CompositeTerm& h,
                             const Vector& x0, const Vector& g, double gamma) {
  switch (h.kind()) {
    case CompositeKind::Zero:
      return mirror_step(map, q, x0, g, gamma);
    case CompositeKind::Linear:
      return mirror_step(map, q, x0, g + h.as_linear()->c, gamma);
    case CompositeKind::L1Scaled:
      break;
  }
  check_step_inputs(map, q, x0, g, gamma);
  const Box* box = q.as_box();
  if (map.kind() != MirrorKind::EuclideanHalfSq || box == nullptr)
    throw Error(ErrorCode::UnsupportedGeometry, "l1 composite term needs Euclidean map on a box");

  // Separable: per coordinate min 0.5 (t - z)^2 + gamma*lambda |t| over
  // [lo, hi] is the clamp of the soft-threshold.
  const double thresh = gamma * h.as_l1()->lambda;
  std::vector<double> out(x0.dim());
  for (std::size_t i = 0; i < x0.dim(); ++i) {
    const double z = x0[i] - gamma * g[i];
    const double shrunk = std::copysign(std::max(std::abs(z) - thresh, 0.0), z);
    out[i] = std::clamp(shrunk, box->lower[i], box->upper[i]);
  }
  return Vector(std::move(out));
}

}  // namespace lfmd
