#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfmd/analysis.hpp"
#include "lfmd/problems.hpp"
#include "lfmd/solver.hpp"

namespace lfmd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitVerification = 2;

enum class RuleKind { Fixed, Nesterov, LipschitzFree };
enum class OutputFormat { Csv, Json };

std::string_view to_string(RuleKind kind);
RuleKind parse_rule(std::string_view s);
std::string_view to_string(MirrorKind kind);
MirrorKind parse_geometry(std::string_view s);

/// One solver run as described on the command line.
struct ExperimentSpec {
  std::string problem;
  RuleKind rule = RuleKind::LipschitzFree;
  std::optional<double> gamma0;
  double a = 0.0;
  std::optional<double> R;
  double m = 0.0;
  std::size_t N = 1000;
  std::optional<MirrorKind> geometry;
  double eps_floor = 1e-12;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 0;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);

struct PreparedExperiment {
  TestProblem problem;
  SolverConfig config;
};

/// Builds the problem and solver configuration, rejecting invalid
/// combinations (ConfigError, NeedsExplicitR, UnsupportedGeometry, InvalidM).
PreparedExperiment prepare(const ExperimentSpec& spec);

struct ExperimentResult {
  RunTrace trace;
  std::optional<AuditResult> audit;

  bool passed() const noexcept { return !audit || audit->passed(); }
};

ExperimentResult execute(const PreparedExperiment& prepared);

/// Real numbers with 17 significant digits, '.' decimal point, no grouping.
std::string format_real(double v);

/// Header `k,gamma,grad_dual_norm,omega,f_gap,ergodic_gap`; gap columns are
/// empty when the problem has no known optimum.
std::string trace_csv(const RunTrace& trace, const TestProblem& problem);

nlohmann::json report_json(const ExperimentSpec& spec, const PreparedExperiment& prepared,
                           const ExperimentResult& result);

int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Nesterov counterexample table
// ---------------------------------------------------------------------------

struct Table1Row {
  std::size_t k;
  double x;
  double gamma;
};

/// The rows printed in the reference table, to 15 significant digits.
const std::vector<Table1Row>& table1_reference();

/// Nesterov steps on example1 from x^1 = 10 for k = 1..iterations.
std::vector<Table1Row> simulate_table1(std::size_t iterations = 81);

inline constexpr double kTable1RelTol = 1e-12;

int cmd_table1(std::ostream& out, std::ostream& err, const std::optional<std::string>& csv_path);

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
  std::string problem;
  std::vector<RuleKind> rules;
  std::vector<double> a;
  std::vector<double> m;
  std::vector<std::size_t> N;
  std::optional<double> R;
  std::optional<double> gamma0;
  std::optional<MirrorKind> geometry;
  double eps_floor = 1e-12;
  std::uint64_t seed = 0;
  std::string out = "sweep.csv";
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepCell {
  ExperimentSpec spec;
  /// Empty on success, otherwise the error class that rejected the cell.
  std::string error;
  std::optional<ExperimentResult> result;
  double wall_seconds = 0.0;
};

/// Runs every cell of rules x a x m x N. The a axis only applies to the
/// Lipschitz-free rule; other rules get one cell per (m, N).
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string sweep_rates_csv(const std::vector<SweepCell>& cells);

int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace lfmd
