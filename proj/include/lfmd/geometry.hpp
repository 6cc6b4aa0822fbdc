#pragma once

#include <cstddef>
#include <variant>

#include "lfmd/errors.hpp"
#include "lfmd/vector.hpp"

namespace lfmd {

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

enum class NormKind { L2, L1Linf };

/// Primal norm on points together with its dual norm on (sub)gradients.
/// L2 is self-dual; L1Linf measures points in l1 and gradients in l-infinity.
struct NormPair {
  NormKind kind = NormKind::L2;

  double primal(const Vector& v) const;
  double dual(const Vector& v) const;
};

// ---------------------------------------------------------------------------
// Feasible sets
// ---------------------------------------------------------------------------

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball2 {
  Vector center;
  double radius;
};

/// Probability simplex, optionally shrunk to {x >= floor, sum x = 1}.
struct Simplex {
  std::size_t dim;
  double floor = 0.0;
};

enum class SetKind { Box, Ball2, Simplex };

/// Compact convex set Q. Immutable once built; the factories validate.
class FeasibleSet {
 public:
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet box(std::size_t dim, double lower, double upper);
  static FeasibleSet ball2(Vector center, double radius);
  static FeasibleSet simplex(std::size_t dim, double floor = 0.0);

  SetKind kind() const noexcept;
  std::size_t dim() const noexcept;

  const Box* as_box() const noexcept { return std::get_if<Box>(&shape_); }
  const Ball2* as_ball2() const noexcept { return std::get_if<Ball2>(&shape_); }
  const Simplex* as_simplex() const noexcept { return std::get_if<Simplex>(&shape_); }

  bool contains(const Vector& x, double tol = 1e-12) const;

  /// Exact Euclidean projection.
  Vector project(const Vector& x) const;

 private:
  explicit FeasibleSet(std::variant<Box, Ball2, Simplex> shape) : shape_(std::move(shape)) {}

  std::variant<Box, Ball2, Simplex> shape_;
};

inline Vector project(const FeasibleSet& q, const Vector& x) { return q.project(x); }

// ---------------------------------------------------------------------------
// Distance-generating functions
// ---------------------------------------------------------------------------

enum class MirrorKind { EuclideanHalfSq, NegEntropy };

/// psi(x) = 0.5 * ||x||_2^2 (sigma = 1 w.r.t. l2), or
/// psi(x) = sum x_i log x_i (sigma = 1 w.r.t. l1 on the simplex).
class MirrorMap {
 public:
  constexpr explicit MirrorMap(MirrorKind kind = MirrorKind::EuclideanHalfSq) : kind_(kind) {}

  static constexpr MirrorMap euclidean() { return MirrorMap(MirrorKind::EuclideanHalfSq); }
  static constexpr MirrorMap entropy() { return MirrorMap(MirrorKind::NegEntropy); }

  constexpr MirrorKind kind() const noexcept { return kind_; }
  constexpr double sigma() const noexcept { return 1.0; }
  constexpr NormPair canonical_norm() const noexcept {
    return NormPair{kind_ == MirrorKind::EuclideanHalfSq ? NormKind::L2 : NormKind::L1Linf};
  }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  friend constexpr bool operator==(MirrorMap, MirrorMap) = default;

 private:
  MirrorKind kind_;
};

// ---------------------------------------------------------------------------
// Composite terms h >= 0
// ---------------------------------------------------------------------------

struct ZeroTerm {};
struct L1Scaled {
  double lambda;
};
struct LinearTerm {
  Vector c;
};

enum class CompositeKind { Zero, L1Scaled, Linear };

class CompositeTerm {
 public:
  static CompositeTerm zero() { return CompositeTerm(ZeroTerm{}); }
  static CompositeTerm l1(double lambda);
  static CompositeTerm linear(Vector c);

  CompositeKind kind() const noexcept;
  const L1Scaled* as_l1() const noexcept { return std::get_if<L1Scaled>(&term_); }
  const LinearTerm* as_linear() const noexcept { return std::get_if<LinearTerm>(&term_); }

  double value(const Vector& x) const;

  /// h >= 0 everywhere on q (up to 1e-12). Zero and L1 terms always are;
  /// a linear term is checked against the exact minimum of <c, x> over q.
  bool nonnegative_on(const FeasibleSet& q) const;

 private:
  explicit CompositeTerm(std::variant<ZeroTerm, L1Scaled, LinearTerm> t) : term_(std::move(t)) {}

  std::variant<ZeroTerm, L1Scaled, LinearTerm> term_;
};

// ---------------------------------------------------------------------------
// Bregman machinery and mirror steps
// ---------------------------------------------------------------------------

/// V(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>.
double bregman(const MirrorMap& map, const Vector& x, const Vector& y);

/// V(u, x) - V(u, y), evaluated without forming either divergence.
/// Used by the per-iterate certificates where the two terms nearly cancel.
double bregman_difference(const MirrorMap& map, const Vector& u, const Vector& x, const Vector& y);

/// <grad psi(b) - grad psi(a), c - a> - [V(c,a) + V(a,b) - V(c,b)]; zero up to rounding.
double three_point_residual(const MirrorMap& map, const Vector& a, const Vector& b, const Vector& c);

/// <grad psi(prev) - grad psi(next), u - next> - (phi_u - phi_next).
/// Non-positive whenever next = argmin_Q {phi + V(., prev)} and u is in Q.
double second_prox_residual(const MirrorMap& map, const Vector& prev, const Vector& next,
                            const Vector& u, double phi_u, double phi_next);

bool is_supported(const MirrorMap& map, const FeasibleSet& q) noexcept;

/// argmin_{x in Q} <g, x> + V(x, x0) / gamma.
Vector mirror_step(const MirrorMap& map, const FeasibleSet& q, const Vector& x0, const Vector& g,
                   double gamma);

/// argmin_{x in Q} <g, x> + h(x) + V(x, x0) / gamma.
Vector composite_mirror_step(const MirrorMap& map, const FeasibleSet& q, const CompositeTerm& h,
                             const Vector& x0, const Vector& g, double gamma);

}  // namespace lfmd
