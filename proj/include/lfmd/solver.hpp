#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lfmd/geometry.hpp"
#include "lfmd/schedule.hpp"

namespace lfmd {

/// Convex f with a deterministic subgradient selection.
struct Objective {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
};

/// Iterates are stored by default only up to this dimension.
inline constexpr std::size_t kDefaultIterateStorageDim = 1000;

struct SolverConfig {
  std::size_t max_iters;
  StepRuleParams rule;
  WeightScheme weights{0.0};
  MirrorMap map = MirrorMap::euclidean();
  /// Defaults to the map's canonical norm.
  std::optional<NormPair> norm;
  FeasibleSet feasible;
  std::optional<CompositeTerm> composite;
  /// Defaults to dim <= kDefaultIterateStorageDim.
  std::optional<bool> record_iterates;
  /// Evaluate f (+h) at the running weighted average after every step.
  bool track_average_value = false;

  NormPair dual_norm() const { return norm.value_or(map.canonical_norm()); }
};

struct IterationRecord {
  std::size_t k;
  double gamma;
  double grad_dual_norm;
  double omega;
  double f;
  std::optional<double> h;
  /// f(x_hat_k) (+ h(x_hat_k)) for the average over iterations 1..k.
  std::optional<double> average_value;
};

enum class RunStatus { CompletedN, StoppedZeroGradient };

struct RunTrace {
  std::vector<IterationRecord> records;
  /// x^1 .. x^{K+1} for K completed steps (x^1 .. x^K on early stop), when recorded.
  std::vector<Vector> iterates;
  Vector x_first;
  Vector x_last;
  Vector x_hat;
  RunStatus status = RunStatus::CompletedN;
  /// Iteration at which a zero subgradient was seen (StoppedZeroGradient only).
  std::size_t stopped_at = 0;
  /// x1 was outside Q and has been replaced by its projection.
  bool start_projected = false;
  bool composite = false;

  std::size_t completed() const noexcept { return records.size(); }
  double max_grad_dual() const;
};

/// Mirror descent: x^{k+1} = argmin_Q <g_k, x> + V(x, x^k) / gamma_k.
RunTrace mirror_descent(const Objective& f, const Vector& x1, const SolverConfig& cfg);

/// Composite mirror descent: x^{k+1} = argmin_Q <g_k, x> + h(x) + V(x, x^k) / gamma_k.
/// Weights must use -1 <= m <= 0.
RunTrace composite_mirror_descent(const Objective& f, const CompositeTerm& h, const Vector& x1,
                                  const SolverConfig& cfg);

/// Throws ConfigError / UnsupportedGeometry for configurations the solvers reject.
void validate(const SolverConfig& cfg, bool composite);

}  // namespace lfmd
