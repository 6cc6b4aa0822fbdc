#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lfmd/problems.hpp"
#include "lfmd/solver.hpp"

namespace lfmd {

/// Slack used when comparing an observed gap against a bound.
inline constexpr double kBoundSlack = 1e-9;
/// Slack for the per-iterate certificate inequalities.
inline constexpr double kCertificateSlack = 1e-8;

struct BoundParams {
  double R;
  double sigma = 1.0;
  double m = 0.0;
  std::size_t N;
};

/// sum_{k=1}^N k^p, accumulated from k = N down to 1.
double power_sum(std::size_t N, double p);

/// sqrt(R / 2 sigma) (N^((m+1)/2) + sum k^((m-1)/2)) / (sum k^(m/2)) * max_grad_dual
double theorem1_rhs(const BoundParams& p, double max_grad_dual);

/// 3 sqrt(R / 2 sigma) / sqrt(N) * max_grad_dual; requires m = 0.
double corollary1_rhs(const BoundParams& p, double max_grad_dual);

/// theorem1_rhs + (grad1 / max)^m h(x^1) / sum k^(m/2); requires -1 <= m <= 0.
double theorem2_rhs(const BoundParams& p, double max_grad_dual, double grad1_dual, double h_x1);

/// corollary1_rhs + h(x^1) / N; requires m = 0.
double corollary2_rhs(const BoundParams& p, double max_grad_dual, double h_x1);

/// Least-squares slope of log(gap) against log(N).
double empirical_rate(std::span<const std::pair<double, double>> n_gap);

enum class ReportKind { TheoremOne, TheoremTwo, DiagnosticOnly };

std::string_view to_string(ReportKind kind);

struct BoundReport {
  ReportKind kind;
  double observed_gap;
  std::optional<double> theorem_rhs;
  std::optional<double> corollary_rhs;
  bool satisfied;
  /// theorem_rhs - observed_gap (0 when no bound applies).
  double slack;
};

struct CertificateLog {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Smallest rhs - lhs seen (negative means violated before slack).
  double worst_margin = 0.0;
  std::optional<std::size_t> first_violation;

  bool ok() const noexcept { return violations == 0; }
};

struct AuditResult {
  BoundReport report;
  CertificateLog certificates;
  /// Only meaningful when the bound needs it; true for a single step.
  bool gamma_non_increasing;
  std::optional<BoundParams> params;
  std::vector<std::string> notes;

  bool passed() const noexcept { return report.satisfied && certificates.ok(); }
};

/// Gap at x_hat, the matching bound from trace statistics, and per-iterate
/// certificates for every stored step. Throws MissingOptimum when the
/// problem has no registered optimum.
AuditResult audit_trace(const RunTrace& trace, const TestProblem& problem,
                        const SolverConfig& cfg);

}  // namespace lfmd
