#include "lfmd/analysis.hpp"

#include <cmath>
#include <limits>

#include "lfmd/errors.hpp"

namespace lfmd {

double power_sum(std::size_t N, double p) {
  double s = 0.0;
  for (std::size_t k = N; k >= 1; --k) s += std::pow(static_cast<double>(k), p);
  return s;
}

namespace {

void check_params(const BoundParams& p) {
  if (!(p.R > 0.0) || !(p.sigma > 0.0) || p.N == 0)
    throw Error(ErrorCode::ConfigError, "bound needs R > 0, sigma > 0, N >= 1");
  if (!(p.m >= -1.0)) throw Error(ErrorCode::InvalidM, "m must be >= -1");
}

}  // namespace

double theorem1_rhs(const BoundParams& p, double max_grad_dual) {
  check_params(p);
  const double num =
      std::pow(static_cast<double>(p.N), (p.m + 1.0) / 2.0) + power_sum(p.N, (p.m - 1.0) / 2.0);
  const double den = power_sum(p.N, p.m / 2.0);
  return std::sqrt(p.R / (2.0 * p.sigma)) * num / den * max_grad_dual;
}

double corollary1_rhs(const BoundParams& p, double max_grad_dual) {
  check_params(p);
  if (p.m != 0.0) throw Error(ErrorCode::InvalidM, "corollary bound is stated for m = 0");
  return 3.0 * std::sqrt(p.R / (2.0 * p.sigma)) / std::sqrt(static_cast<double>(p.N)) *
         max_grad_dual;
}

double theorem2_rhs(const BoundParams& p, double max_grad_dual, double grad1_dual, double h_x1) {
  check_params(p);
  if (p.m > 0.0) throw Error(ErrorCode::InvalidM, "composite bound needs -1 <= m <= 0");
  if (!(h_x1 >= 0.0)) throw Error(ErrorCode::DomainError, "h(x1) must be >= 0");
  const double base = theorem1_rhs(p, max_grad_dual);
  if (h_x1 == 0.0) return base;
  if (!(max_grad_dual > 0.0) || (grad1_dual == 0.0 && p.m < 0.0))
    throw Error(ErrorCode::BoundUndefined,
                "gradient ratio is undefined for a zero first gradient with m < 0");
  if (grad1_dual > max_grad_dual)
    throw Error(ErrorCode::DomainError, "first gradient norm exceeds the maximum");
  const double ratio = std::pow(grad1_dual / max_grad_dual, p.m);
  return base + ratio * h_x1 / power_sum(p.N, p.m / 2.0);
}

double corollary2_rhs(const BoundParams& p, double max_grad_dual, double h_x1) {
  return corollary1_rhs(p, max_grad_dual) + h_x1 / static_cast<double>(p.N);
}

double empirical_rate(std::span<const std::pair<double, double>> n_gap) {
  if (n_gap.size() < 4) throw Error(ErrorCode::DegenerateFit, "need at least 4 (N, gap) points");
  double prev_n = 0.0;
  for (const auto& [n, gap] : n_gap) {
    if (!(gap > 0.0) || !std::isfinite(gap))
      throw Error(ErrorCode::DegenerateFit, "gaps must be positive and finite");
    if (!(n > prev_n)) throw Error(ErrorCode::DegenerateFit, "N must be strictly increasing");
    prev_n = n;
  }
  const double cnt = static_cast<double>(n_gap.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, gap] : n_gap) {
    mx += std::log(n);
    my += std::log(gap);
  }
  mx /= cnt;
  my /= cnt;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [n, gap] : n_gap) {
    const double dx = std::log(n) - mx;
    sxy += dx * (std::log(gap) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string_view to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::TheoremOne: return "theorem1";
    case ReportKind::TheoremTwo: return "theorem2";
    case ReportKind::DiagnosticOnly: return "diagnostic-only";
  }
  return "unknown";
}

AuditResult audit_trace(const RunTrace& trace, const TestProblem& problem,
                        const SolverConfig& cfg) {
  if (!problem.optimum) throw Error(ErrorCode::MissingOptimum, problem.name + " has no optimum");
  const KnownOptimum& opt = *problem.optimum;
  const bool composite = trace.composite;
  if (composite && (!problem.composite || !opt.F_star))
    throw Error(ErrorCode::MissingOptimum, problem.name + " has no composite optimum F*");

  AuditResult out{};
  const double target = composite ? *opt.F_star : opt.f_star;
  const double observed = problem.objective.value(trace.x_hat) +
                          (composite ? problem.composite->value(trace.x_hat) : 0.0) - target;

  out.gamma_non_increasing = true;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    if (trace.records[i].gamma > trace.records[i - 1].gamma) {
      out.gamma_non_increasing = false;
      break;
    }
  }

  const auto* lf = std::get_if<LipschitzFreeStep>(&cfg.rule);
  BoundReport& rep = out.report;
  rep.observed_gap = observed;
  if (lf == nullptr) {
    rep.kind = ReportKind::DiagnosticOnly;
    rep.satisfied = true;
    rep.slack = 0.0;
    out.notes.push_back("step rule carries no convergence bound; gap reported only");
    if (!out.gamma_non_increasing) out.notes.push_back("step sizes are not monotone");
  } else {
    rep.kind = composite ? ReportKind::TheoremTwo : ReportKind::TheoremOne;
    const std::size_t n_eff = trace.completed();
    if (n_eff == 0) {
      // Zero subgradient at x^1: x_hat = x^1 is optimal, nothing to bound.
      rep.theorem_rhs = 0.0;
      out.notes.push_back("stopped at k = 1 on a zero subgradient");
    } else {
      const BoundParams p{lf->R, lf->sigma, cfg.weights.m(), n_eff};
      out.params = p;
      const double gmax = trace.max_grad_dual();
      if (composite) {
        const double h1 = problem.composite->value(trace.x_first);
        rep.theorem_rhs = theorem2_rhs(p, gmax, trace.records.front().grad_dual_norm, h1);
        if (p.m == 0.0) rep.corollary_rhs = corollary2_rhs(p, gmax, h1);
      } else {
        rep.theorem_rhs = theorem1_rhs(p, gmax);
        if (p.m == 0.0) rep.corollary_rhs = corollary1_rhs(p, gmax);
      }
    }
    rep.satisfied = observed <= *rep.theorem_rhs + kBoundSlack;
    rep.slack = *rep.theorem_rhs - observed;
  }

  // Per-iterate certificate: for every step,
  //   f(x^k) [+ h(x^{k+1})] - f* <= (V(x*, x^k) - V(x*, x^{k+1})) / gamma_k
  //                                 + gamma_k / (2 sigma) |g_k|_*^2.
  CertificateLog& log = out.certificates;
  if (trace.iterates.size() < trace.completed() + 1) {
    out.notes.push_back("iterates not recorded; per-iterate certificates skipped");
    return out;
  }
  const double sigma = cfg.map.sigma();
  log.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.completed(); ++i) {
    const IterationRecord& r = trace.records[i];
    const Vector& xk = trace.iterates[i];
    const Vector& xnext = trace.iterates[i + 1];
    double lhs = r.f - target;
    if (composite) lhs += problem.composite->value(xnext);
    const double rhs = bregman_difference(cfg.map, opt.x_star, xk, xnext) / r.gamma +
                       r.gamma / (2.0 * sigma) * r.grad_dual_norm * r.grad_dual_norm;
    const double margin = rhs - lhs;
    ++log.checked;
    log.worst_margin = std::min(log.worst_margin, margin);
    if (margin < -kCertificateSlack) {
      ++log.violations;
      if (!log.first_violation) log.first_violation = r.k;
    }
  }
  if (log.checked == 0) log.worst_margin = 0.0;
  return out;
}

}  // namespace lfmd
