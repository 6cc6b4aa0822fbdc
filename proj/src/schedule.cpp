#include "lfmd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfmd/errors.hpp"

namespace lfmd {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void validate(const StepRuleParams& params) {
  std::visit(overloaded{
                 [](const FixedStep& p) {
                   if (!positive_finite(p.gamma0))
                     throw Error(ErrorCode::ConfigError, "fixed step gamma0 must be > 0");
                 },
                 [](const NesterovStep& p) {
                   if (!positive_finite(p.sigma))
                     throw Error(ErrorCode::ConfigError, "sigma must be > 0");
                 },
                 [](const LipschitzFreeStep& p) {
                   if (!(p.a >= 0.0 && p.a <= 1.0))
                     throw Error(ErrorCode::ConfigError, "a must lie in [0, 1]");
                   if (!positive_finite(p.R))
                     throw Error(ErrorCode::ConfigError, "R must be > 0");
                   if (!positive_finite(p.sigma))
                     throw Error(ErrorCode::ConfigError, "sigma must be > 0");
                 },
             },
             params);
}

StepSizeRule::StepSizeRule(StepRuleParams params) : params_(params) { validate(params_); }

double StepSizeRule::next_gamma(std::uint64_t k, double grad_dual_norm) {
  if (k != last_k_ + 1)
    throw Error(ErrorCode::NonMonotonicCall,
                "expected k = " + std::to_string(last_k_ + 1) + ", got " + std::to_string(k));
  if (!(grad_dual_norm >= 0.0) || !std::isfinite(grad_dual_norm))
    throw Error(ErrorCode::DomainError, "gradient norm must be finite and >= 0");

  const double kd = static_cast<double>(k);
  double gamma = 0.0;
  if (const auto* p = std::get_if<FixedStep>(&params_)) {
    gamma = p->gamma0;
  } else if (const auto* p = std::get_if<NesterovStep>(&params_)) {
    if (grad_dual_norm <= kZeroGradientThreshold)
      throw Error(ErrorCode::ZeroGradient, "Nesterov step undefined at a zero subgradient");
    gamma = std::sqrt(2.0 * p->sigma) / (grad_dual_norm * std::sqrt(kd));
  } else {
    const auto& lf = std::get<LipschitzFreeStep>(params_);
    if (!g_ && grad_dual_norm <= kZeroGradientThreshold)
      throw Error(ErrorCode::ZeroGradient, "G_1 would be zero");
    const double candidate = grad_dual_norm * std::pow(kd, (1.0 - lf.a) / 2.0);
    const double g = g_ ? std::max(*g_, candidate) : candidate;
    gamma = std::sqrt(2.0 * lf.sigma * lf.R) / (g * std::pow(kd, lf.a / 2.0));
    g_ = g;
  }
  last_k_ = k;
  last_gamma_ = gamma;
  return gamma;
}

double StepSizeRule::g_statistic() const {
  if (!g_) throw Error(ErrorCode::Unset, "G is unset before the first Lipschitz-free step");
  return *g_;
}

WeightScheme::WeightScheme(double m) : m_(m) {
  if (!(m >= -1.0) || !std::isfinite(m))
    throw Error(ErrorCode::InvalidM, "weight exponent m must be >= -1");
}

double WeightScheme::weight(std::uint64_t k, double gamma_k) const {
  if (m_ > 0.0) return std::pow(static_cast<double>(k), m_ / 2.0);
  if (m_ == 0.0) return 1.0;
  return std::pow(gamma_k, -m_);
}

void ErgodicAverager::update(const Vector& x, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorCode::DomainError, "averaging weight must be positive");
  if (mean_.empty()) {
    mean_.assign(x.dim(), 0.0);
  } else if (mean_.size() != x.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "averager dimension changed");
  }
  weight_total_ += omega;
  const double t = omega / weight_total_;
  for (std::size_t i = 0; i < x.dim(); ++i) mean_[i] += t * (x[i] - mean_[i]);
}

Vector ErgodicAverager::average() const {
  if (mean_.empty()) throw Error(ErrorCode::EmptyAverage, "no iterate has been averaged");
  return Vector(mean_);
}

}  // namespace lfmd
