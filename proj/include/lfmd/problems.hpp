#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfmd/geometry.hpp"
#include "lfmd/solver.hpp"

namespace lfmd {

struct KnownOptimum {
  Vector x_star;
  double f_star;
  /// F* = f* + h(x*) for composite problems.
  std::optional<double> F_star;
};

struct TestProblem {
  std::string name;
  Objective objective;
  std::optional<CompositeTerm> composite;
  FeasibleSet feasible;
  MirrorKind geometry_hint;
  std::optional<KnownOptimum> optimum;
  /// Diagnostic only: whether subgradients are bounded on Q. No solver path reads it.
  bool lipschitz_on_Q;
  /// Default starting point x^1.
  Vector start;
  /// A valid constant R with V(x*, x) <= R on Q for the hinted geometry, when one is known.
  std::optional<double> radius_bound;

  bool is_composite() const noexcept { return composite.has_value(); }
  double total_value(const Vector& x) const {
    return objective.value(x) + (composite ? composite->value(x) : 0.0);
  }
};

/// f(x) = x^2 / 2 on [-10, 10], started at 10.
TestProblem example1();

/// f(x) = -sum sqrt(x_i) on the simplex floored at eps. Subgradients blow up
/// like 1/(2 sqrt(eps)) near the boundary; starts at a floored vertex.
TestProblem non_lipschitz_sqrt_simplex(std::size_t n, double floor = 1e-12);

/// max_j <a_j, x> + b_j over [-1, 1]^n. With `planted`, the pieces are built
/// so that a random interior x* is the minimiser with f* = 0. Otherwise the
/// data are random and f* is found by exact vertex enumeration (n <= 3).
TestProblem piecewise_linear_max(std::size_t n, std::uint64_t seed, bool planted = true);

/// Explicit pieces over an arbitrary set; optimum unknown.
TestProblem piecewise_linear_max(std::vector<Vector> slopes, std::vector<double> offsets,
                                 FeasibleSet feasible, Vector start);

/// f = 0.5 |Ax - b|^2, h = lambda |x|_1 on [-1, 1]^n with seeded random data.
/// The optimum is computed by two independent reference solvers that must
/// agree to 1e-10.
TestProblem lasso_on_box(std::size_t n, double lambda, std::uint64_t seed);

/// Same objective with explicit data; A is row-major rows x cols.
TestProblem lasso_on_box(std::vector<double> A, std::size_t rows, std::size_t cols,
                         std::vector<double> b, double lambda, std::string name);

/// f(x) = |x - center| on [lo, hi], Euclidean.
TestProblem abs_distance_1d(double center, double lo, double hi, double start);

/// 0.5 * D^2 with D the l2 diameter of q. Euclidean map only.
double safe_R(const FeasibleSet& q, const MirrorMap& map);

/// Build a problem from its registry name: "example1", "sqrt-simplex-n{n}",
/// "pwl-max-n{n}-s{seed}", "lasso-box-n{n}-l{lambda}-s{seed}". The "-s{seed}"
/// suffix may be omitted, in which case `default_seed` is used.
TestProblem make_problem(std::string_view name, double eps_floor = 1e-12,
                         std::uint64_t default_seed = 0);

/// Whether `name` denotes a composite problem, without building it.
bool names_composite_problem(std::string_view name);

}  // namespace lfmd
