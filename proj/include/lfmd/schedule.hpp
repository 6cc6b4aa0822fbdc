#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "lfmd/vector.hpp"

namespace lfmd {

/// Dual gradient norms at or below this are treated as an exact zero
/// subgradient: the current point is optimal and no step is taken.
inline constexpr double kZeroGradientThreshold = 1e-15;

struct FixedStep {
  double gamma0;
};

/// gamma_k = sqrt(2 sigma) / (|g_k|_* sqrt(k)). Not monotone in general.
struct NesterovStep {
  double sigma = 1.0;
};

/// gamma_k = sqrt(2 sigma R) / (G_k k^(a/2)),
/// G_k = max(G_{k-1}, |g_k|_* k^((1-a)/2)), G_0 = -inf.
struct LipschitzFreeStep {
  double a = 0.0;
  double R;
  double sigma = 1.0;
};

using StepRuleParams = std::variant<FixedStep, NesterovStep, LipschitzFreeStep>;

void validate(const StepRuleParams& params);

/// Stateful step-size generator. One instance per solver run; calls must
/// arrive with k = 1, 2, 3, ... in order.
class StepSizeRule {
 public:
  explicit StepSizeRule(StepRuleParams params);

  double next_gamma(std::uint64_t k, double grad_dual_norm);

  /// Running G_k of the Lipschitz-free rule. Throws Unset before the first
  /// step or for other rules.
  double g_statistic() const;

  const StepRuleParams& params() const noexcept { return params_; }
  bool is_lipschitz_free() const noexcept {
    return std::holds_alternative<LipschitzFreeStep>(params_);
  }
  std::uint64_t last_k() const noexcept { return last_k_; }
  std::optional<double> last_gamma() const noexcept { return last_gamma_; }

 private:
  StepRuleParams params_;
  std::optional<double> g_;
  std::uint64_t last_k_ = 0;
  std::optional<double> last_gamma_;
};

/// Weak-ergodic weights: gamma_k^(-m) for -1 <= m <= 0, k^(m/2) for m > 0.
class WeightScheme {
 public:
  explicit WeightScheme(double m = 0.0);

  double m() const noexcept { return m_; }
  double weight(std::uint64_t k, double gamma_k) const;

 private:
  double m_;
};

/// Running weighted mean sum(w_k x_k) / sum(w_k), updated in place as
/// mean += (w_k / W_k)(x_k - mean).
class ErgodicAverager {
 public:
  void update(const Vector& x, double omega);
  Vector average() const;

  bool empty() const noexcept { return mean_.empty(); }
  double weight_total() const noexcept { return weight_total_; }

 private:
  std::vector<double> mean_;
  double weight_total_ = 0.0;
};

}  // namespace lfmd
