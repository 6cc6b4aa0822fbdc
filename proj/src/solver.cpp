#include "lfmd/solver.hpp"

#include <algorithm>

#include "lfmd/errors.hpp"

namespace lfmd {

double RunTrace::max_grad_dual() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.grad_dual_norm);
  return m;
}

void validate(const SolverConfig& cfg, bool composite) {
  if (cfg.max_iters == 0) throw Error(ErrorCode::ConfigError, "max_iters must be >= 1");
  validate(cfg.rule);
  if (!is_supported(cfg.map, cfg.feasible))
    throw Error(ErrorCode::UnsupportedGeometry, "entropy mirror map requires a simplex");
  if (composite && cfg.weights.m() > 0.0)
    throw Error(ErrorCode::ConfigError,
                "composite problems are only covered for -1 <= m <= 0");
}

namespace {

RunTrace run(const Objective& f, const CompositeTerm* h, const Vector& x1,
             const SolverConfig& cfg) {
  const FeasibleSet& q = cfg.feasible;
  const NormPair norm = cfg.dual_norm();
  const bool store = cfg.record_iterates.value_or(x1.dim() <= kDefaultIterateStorageDim);

  bool projected = false;
  Vector x = x1;
  if (!q.contains(x)) {
    x = q.project(x);
    projected = true;
  }

  StepSizeRule rule(cfg.rule);
  ErgodicAverager averager;
  std::vector<IterationRecord> records;
  std::vector<Vector> iterates;
  records.reserve(cfg.max_iters);
  if (store) {
    iterates.reserve(cfg.max_iters + 1);
    iterates.push_back(x);
  }

  RunStatus status = RunStatus::CompletedN;
  std::size_t stopped_at = 0;
  const Vector start = x;

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const Vector g = f.subgradient(x);
    const double gnorm = norm.dual(g);
    // A zero subgradient certifies optimality of f alone. With a composite
    // term the prox of h may still move, so keep going while the rule can
    // still produce a step.
    const bool zero = gnorm <= kZeroGradientThreshold;
    if (zero && !h) {
      status = RunStatus::StoppedZeroGradient;
      stopped_at = k;
      break;
    }
    double gamma;
    try {
      gamma = rule.next_gamma(k, gnorm);
    } catch (const Error& e) {
      if (!zero || e.code() != ErrorCode::ZeroGradient) throw;
      status = RunStatus::StoppedZeroGradient;
      stopped_at = k;
      break;
    }
    Vector next = h ? composite_mirror_step(cfg.map, q, *h, x, g, gamma)
                    : mirror_step(cfg.map, q, x, g, gamma);
    const double omega = cfg.weights.weight(k, gamma);
    averager.update(x, omega);

    IterationRecord rec{k, gamma, gnorm, omega, f.value(x), std::nullopt, std::nullopt};
    if (h) rec.h = h->value(x);
    if (cfg.track_average_value) {
      const Vector avg = averager.average();
      rec.average_value = f.value(avg) + (h ? h->value(avg) : 0.0);
    }
    records.push_back(rec);

    x = std::move(next);
    if (store) iterates.push_back(x);
  }

  // An immediate stop leaves nothing to average; x1 itself is optimal then.
  Vector x_hat = averager.empty() ? start : averager.average();
  RunTrace trace{std::move(records), std::move(iterates), start, x, std::move(x_hat),
                 status,             stopped_at,           projected, h != nullptr};
  return trace;
}

}  // namespace

RunTrace mirror_descent(const Objective& f, const Vector& x1, const SolverConfig& cfg) {
  if (cfg.composite)
    throw Error(ErrorCode::ConfigError,
                "mirror_descent does not take a composite term; use composite_mirror_descent");
  validate(cfg, false);
  return run(f, nullptr, x1, cfg);
}

RunTrace composite_mirror_descent(const Objective& f, const CompositeTerm& h, const Vector& x1,
                                  const SolverConfig& cfg) {
  validate(cfg, true);
  if (!h.nonnegative_on(cfg.feasible))
    throw Error(ErrorCode::ConfigError, "composite term must be non-negative on Q");
  return run(f, &h, x1, cfg);
}

}  // namespace lfmd
