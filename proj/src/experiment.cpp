#include "lfmd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "lfmd/errors.hpp"

namespace lfmd {

using nlohmann::json;

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Fixed: return "fixed";
    case RuleKind::Nesterov: return "nesterov";
    case RuleKind::LipschitzFree: return "lipschitz-free";
  }
  return "unknown";
}

RuleKind parse_rule(std::string_view s) {
  if (s == "fixed") return RuleKind::Fixed;
  if (s == "nesterov") return RuleKind::Nesterov;
  if (s == "lipschitz-free" || s == "lf") return RuleKind::LipschitzFree;
  throw Error(ErrorCode::ConfigError, "unknown rule '" + std::string(s) + "'");
}

std::string_view to_string(MirrorKind kind) {
  return kind == MirrorKind::EuclideanHalfSq ? "euclidean" : "entropy";
}

MirrorKind parse_geometry(std::string_view s) {
  if (s == "euclidean") return MirrorKind::EuclideanHalfSq;
  if (s == "entropy") return MirrorKind::NegEntropy;
  throw Error(ErrorCode::ConfigError, "unknown geometry '" + std::string(s) + "'");
}

namespace {

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw Error(ErrorCode::ConfigError, "unknown format '" + std::string(s) + "'");
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const ExperimentSpec& s) {
  j = json{{"problem", s.problem},
           {"rule", to_string(s.rule)},
           {"gamma0", opt_json(s.gamma0)},
           {"a", s.a},
           {"R", opt_json(s.R)},
           {"m", s.m},
           {"N", s.N},
           {"geometry", s.geometry ? json(to_string(*s.geometry)) : json(nullptr)},
           {"eps_floor", s.eps_floor},
           {"out", opt_json(s.out)},
           {"format", to_string(s.format)},
           {"seed", s.seed}};
}

void from_json(const json& j, ExperimentSpec& s) {
  try {
    ExperimentSpec r;
    r.problem = j.at("problem").get<std::string>();
    if (j.contains("rule")) r.rule = parse_rule(j.at("rule").get<std::string>());
    r.gamma0 = opt_from<double>(j, "gamma0");
    r.a = j.value("a", r.a);
    r.R = opt_from<double>(j, "R");
    r.m = j.value("m", r.m);
    r.N = j.value("N", r.N);
    if (auto g = opt_from<std::string>(j, "geometry")) r.geometry = parse_geometry(*g);
    r.eps_floor = j.value("eps_floor", r.eps_floor);
    r.out = opt_from<std::string>(j, "out");
    if (j.contains("format")) r.format = parse_format(j.at("format").get<std::string>());
    r.seed = j.value("seed", r.seed);
    s = std::move(r);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad experiment record: ") + e.what());
  }
}

PreparedExperiment prepare(const ExperimentSpec& spec) {
  TestProblem problem = make_problem(spec.problem, spec.eps_floor, spec.seed);
  const MirrorMap map(spec.geometry.value_or(problem.geometry_hint));

  if (problem.is_composite() && spec.m > 0.0)
    throw Error(ErrorCode::ConfigError, "composite problems need -1 <= m <= 0");

  StepRuleParams rule;
  switch (spec.rule) {
    case RuleKind::Fixed:
      if (!spec.gamma0) throw Error(ErrorCode::ConfigError, "fixed rule needs --gamma0");
      rule = FixedStep{*spec.gamma0};
      break;
    case RuleKind::Nesterov:
      rule = NesterovStep{map.sigma()};
      break;
    case RuleKind::LipschitzFree: {
      double R;
      if (spec.R) {
        R = *spec.R;
      } else if (map.kind() == MirrorKind::EuclideanHalfSq) {
        R = safe_R(problem.feasible, map);
      } else {
        throw Error(ErrorCode::NeedsExplicitR,
                    "lipschitz-free rule under entropy geometry needs --R");
      }
      rule = LipschitzFreeStep{spec.a, R, map.sigma()};
      break;
    }
  }

  SolverConfig cfg{.max_iters = spec.N,
                   .rule = rule,
                   .weights = WeightScheme(spec.m),
                   .map = map,
                   .norm = std::nullopt,
                   .feasible = problem.feasible,
                   .composite = problem.composite,
                   .record_iterates = std::nullopt,
                   .track_average_value = true};
  validate(cfg, problem.is_composite());
  return PreparedExperiment{std::move(problem), std::move(cfg)};
}

ExperimentResult execute(const PreparedExperiment& p) {
  auto run = [&] {
    if (!p.problem.composite) return mirror_descent(p.problem.objective, p.problem.start, p.config);
    SolverConfig cfg = p.config;
    cfg.composite.reset();
    return composite_mirror_descent(p.problem.objective, *p.problem.composite, p.problem.start,
                                    cfg);
  };
  ExperimentResult r{run(), std::nullopt};
  if (p.problem.optimum) r.audit = audit_trace(r.trace, p.problem, p.config);
  return r;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::optional<double> optimum_value(const TestProblem& p) {
  if (!p.optimum) return std::nullopt;
  if (p.is_composite()) return p.optimum->F_star;
  return p.optimum->f_star;
}

struct TraceRow {
  std::size_t k;
  double gamma, grad, omega;
  std::optional<double> f_gap, ergodic_gap;
};

std::vector<TraceRow> trace_rows(const RunTrace& trace, const TestProblem& problem) {
  const auto target = optimum_value(problem);
  std::vector<TraceRow> rows;
  rows.reserve(trace.records.size());
  for (const IterationRecord& r : trace.records) {
    TraceRow row{r.k, r.gamma, r.grad_dual_norm, r.omega, std::nullopt, std::nullopt};
    if (target) {
      row.f_gap = r.f + r.h.value_or(0.0) - *target;
      if (r.average_value) row.ergodic_gap = *r.average_value - *target;
    }
    rows.push_back(row);
  }
  return rows;
}

json json_real(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error(ErrorCode::ConfigError, "failed writing '" + path + "'");
}

std::string report_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension();
  return p.string() + ".report.json";
}

}  // namespace

std::string trace_csv(const RunTrace& trace, const TestProblem& problem) {
  std::string s = "k,gamma,grad_dual_norm,omega,f_gap,ergodic_gap\n";
  for (const TraceRow& r : trace_rows(trace, problem)) {
    s += std::to_string(r.k);
    s += ',';
    s += format_real(r.gamma);
    s += ',';
    s += format_real(r.grad);
    s += ',';
    s += format_real(r.omega);
    s += ',';
    if (r.f_gap) s += format_real(*r.f_gap);
    s += ',';
    if (r.ergodic_gap) s += format_real(*r.ergodic_gap);
    s += '\n';
  }
  return s;
}

json report_json(const ExperimentSpec& spec, const PreparedExperiment& prepared,
                 const ExperimentResult& result) {
  const auto* lf = std::get_if<LipschitzFreeStep>(&prepared.config.rule);
  json j;
  j["problem"] = prepared.problem.name;
  j["rule"] = to_string(spec.rule);
  j["a"] = lf ? json(lf->a) : json(nullptr);
  j["m"] = spec.m;
  j["N"] = spec.N;
  j["R"] = lf ? json(lf->R) : json(nullptr);
  j["sigma"] = prepared.config.map.sigma();
  j["max_grad_dual"] = json_real(result.trace.max_grad_dual());
  if (result.audit) {
    const BoundReport& rep = result.audit->report;
    j["observed_gap"] = json_real(rep.observed_gap);
    j["theorem_rhs"] = json_real(rep.theorem_rhs);
    j["corollary_rhs"] = json_real(rep.corollary_rhs);
    j["satisfied"] = result.audit->passed();
  } else {
    j["observed_gap"] = nullptr;
    j["theorem_rhs"] = nullptr;
    j["corollary_rhs"] = nullptr;
    j["satisfied"] = nullptr;
  }
  j["status"] = result.trace.status == RunStatus::CompletedN ? "completed" : "stopped_zero_gradient";
  return j;
}

int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  std::optional<PreparedExperiment> prepared;
  std::optional<ExperimentResult> result;
  try {
    prepared = prepare(spec);
    result = execute(*prepared);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const json report = report_json(spec, *prepared, *result);
  try {
    if (spec.out) {
      if (spec.format == OutputFormat::Csv) {
        write_file(*spec.out, trace_csv(result->trace, prepared->problem));
        write_file(report_path(*spec.out), report.dump(2) + "\n");
      } else {
        json trace = json::array();
        for (const TraceRow& r : trace_rows(result->trace, prepared->problem)) {
          trace.push_back({{"k", r.k},
                           {"gamma", r.gamma},
                           {"grad_dual_norm", r.grad},
                           {"omega", r.omega},
                           {"f_gap", json_real(r.f_gap)},
                           {"ergodic_gap", json_real(r.ergodic_gap)}});
        }
        write_file(*spec.out, json{{"report", report}, {"trace", trace}}.dump(2) + "\n");
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  out << report.dump(2) << '\n';
  if (result->audit && !result->audit->passed()) {
    const AuditResult& a = *result->audit;
    if (!a.report.satisfied)
      err << "bound violated: observed gap " << format_real(a.report.observed_gap) << " > "
          << format_real(a.report.theorem_rhs.value_or(0.0)) << '\n';
    if (!a.certificates.ok())
      err << "certificate violated at k = " << a.certificates.first_violation.value_or(0) << " ("
          << a.certificates.violations << " total)\n";
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

const std::vector<Table1Row>& table1_reference() {
  static const std::vector<Table1Row> rows{
      {1, 10.0, 0.141421356237310},
      {2, 8.58578643762690, 0.116471566962991},
      {3, 7.58578643762690, 0.107635060338339},
      {4, 6.76928985669918, 0.104458044515078},
      {5, 6.06218307551263, 0.104328015857587},
      {13, 2.06458695099841, 0.189980988733214},
      {14, 1.67235468072204, 0.226007363967817},
      {24, 0.209552285731976, 1.37758046201432},
      {25, -0.0791228488628367, 3.57472862187939},
      {48, 0.166305589462573, 1.22740399701280},
      {49, -0.0378185557693590, 5.34210005645243},
      {60, 0.155379438403268, 1.17502153252226},
      {61, -0.0271947474317873, 6.65832593368331},
      {80, 0.143015997988010, 1.10556780523025},
      {81, -0.0150978850204088, 10.4077385707513},
  };
  return rows;
}

std::vector<Table1Row> simulate_table1(std::size_t iterations) {
  const TestProblem p = example1();
  SolverConfig cfg{.max_iters = iterations,
                   .rule = NesterovStep{},
                   .weights = WeightScheme(0.0),
                   .map = MirrorMap::euclidean(),
                   .norm = std::nullopt,
                   .feasible = p.feasible,
                   .composite = std::nullopt,
                   .record_iterates = true,
                   .track_average_value = false};
  const RunTrace t = mirror_descent(p.objective, p.start, cfg);
  std::vector<Table1Row> rows;
  for (std::size_t i = 0; i < t.records.size(); ++i)
    rows.push_back({t.records[i].k, t.iterates[i][0], t.records[i].gamma});
  return rows;
}

namespace {

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300);
}

}  // namespace

int cmd_table1(std::ostream& out, std::ostream& err, const std::optional<std::string>& csv_path) {
  std::vector<Table1Row> sim;
  try {
    sim = simulate_table1(81);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::string table = "k,x,gamma\n";
  for (const Table1Row& r : sim)
    table += std::to_string(r.k) + ',' + format_real(r.x) + ',' + format_real(r.gamma) + '\n';
  out << table;
  if (csv_path) {
    try {
      write_file(*csv_path, table);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  for (const Table1Row& ref : table1_reference()) {
    if (ref.k > sim.size()) {
      err << "mismatch: row k = " << ref.k << " was not produced\n";
      return kExitVerification;
    }
    const Table1Row& got = sim[ref.k - 1];
    if (!rel_close(got.x, ref.x, kTable1RelTol) || !rel_close(got.gamma, ref.gamma, kTable1RelTol)) {
      err << "mismatch at k = " << ref.k << ": got x = " << format_real(got.x)
          << ", gamma = " << format_real(got.gamma) << "; expected x = " << format_real(ref.x)
          << ", gamma = " << format_real(ref.gamma) << '\n';
      return kExitVerification;
    }
  }

  std::optional<std::size_t> witness;
  for (std::size_t i = 1; i < sim.size() && !witness; ++i)
    if (sim[i].gamma > sim[i - 1].gamma) witness = sim[i].k;
  if (!witness) {
    err << "no increasing step pair found\n";
    return kExitVerification;
  }
  err << "table1: " << table1_reference().size() << " reference rows match; gamma_" << *witness
      << " > gamma_" << (*witness - 1) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (RuleKind rule : spec.rules) {
    const std::vector<double> a_axis =
        rule == RuleKind::LipschitzFree ? spec.a : std::vector<double>{0.0};
    for (double a : a_axis)
      for (double m : spec.m)
        for (std::size_t N : spec.N) {
          SweepCell c;
          c.spec.problem = spec.problem;
          c.spec.rule = rule;
          c.spec.gamma0 = spec.gamma0;
          c.spec.a = a;
          c.spec.R = spec.R;
          c.spec.m = m;
          c.spec.N = N;
          c.spec.geometry = spec.geometry;
          c.spec.eps_floor = spec.eps_floor;
          c.spec.seed = spec.seed;
          cells.push_back(std::move(c));
        }
  }

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(spec.threads ? spec.threads : hw, std::max<std::size_t>(1, cells.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& c = cells[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const PreparedExperiment p = prepare(c.spec);
        c.result = execute(p);
      } catch (const Error& e) {
        c.error = std::string(to_string(e.code()));
      }
      c.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  pool.clear();
  return cells;
}

namespace {

std::string cell_status(const SweepCell& c) {
  if (!c.error.empty()) return c.error;
  return c.result->trace.status == RunStatus::CompletedN ? "completed" : "stopped_zero_gradient";
}

std::string opt_real(std::optional<double> v) { return v ? format_real(*v) : std::string(); }

}  // namespace

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string s =
      "problem,rule,a,m,N,status,observed_gap,theorem_rhs,corollary_rhs,satisfied,certificates_ok\n";
  for (const SweepCell& c : cells) {
    s += c.spec.problem + ',' + std::string(to_string(c.spec.rule)) + ',' + format_real(c.spec.a) +
         ',' + format_real(c.spec.m) + ',' + std::to_string(c.spec.N) + ',' + cell_status(c) + ',';
    if (c.result && c.result->audit) {
      const AuditResult& a = *c.result->audit;
      s += format_real(a.report.observed_gap) + ',' + opt_real(a.report.theorem_rhs) + ',' +
           opt_real(a.report.corollary_rhs) + ',' + (a.report.satisfied ? "true" : "false") + ',' +
           (a.certificates.ok() ? "true" : "false");
    } else {
      s += ",,,,";
    }
    s += '\n';
  }
  return s;
}

std::string sweep_rates_csv(const std::vector<SweepCell>& cells) {
  using Key = std::tuple<int, double, double>;
  std::map<Key, std::vector<const SweepCell*>> groups;
  std::vector<Key> order;
  for (const SweepCell& c : cells) {
    const Key key{static_cast<int>(c.spec.rule), c.spec.a, c.spec.m};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&c);
  }
  std::string s = "problem,rule,a,m,points,slope,error\n";
  for (const Key& key : order) {
    std::vector<const SweepCell*> g = groups[key];
    std::stable_sort(g.begin(), g.end(),
                     [](const SweepCell* x, const SweepCell* y) { return x->spec.N < y->spec.N; });
    std::vector<std::pair<double, double>> pts;
    for (const SweepCell* c : g)
      if (c->result && c->result->audit)
        pts.emplace_back(static_cast<double>(c->spec.N), c->result->audit->report.observed_gap);
    std::string slope, error;
    try {
      slope = format_real(empirical_rate(pts));
    } catch (const Error& e) {
      error = std::string(to_string(e.code()));
    }
    const SweepCell& first = *g.front();
    s += first.spec.problem + ',' + std::string(to_string(first.spec.rule)) + ',' +
         format_real(first.spec.a) + ',' + format_real(first.spec.m) + ',' +
         std::to_string(pts.size()) + ',' + slope + ',' + error + '\n';
  }
  return s;
}

int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.rules.empty() || spec.m.empty() || spec.N.empty() ||
      (spec.a.empty() && std::find(spec.rules.begin(), spec.rules.end(), RuleKind::LipschitzFree) !=
                             spec.rules.end())) {
    err << "error: ConfigError: empty sweep grid\n";
    return kExitConfig;
  }
  try {
    (void)make_problem(spec.problem, spec.eps_floor, spec.seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::vector<SweepCell> cells = run_sweep(spec);
  try {
    write_file(spec.out, sweep_csv(cells));
    std::filesystem::path rates(spec.out);
    rates.replace_extension();
    write_file(rates.string() + ".rates.csv", sweep_rates_csv(cells));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::size_t failed = 0, rejected = 0;
  out << "cell,rule,a,m,N,status,wall_seconds\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const SweepCell& c = cells[i];
    if (!c.error.empty()) ++rejected;
    if (c.result && !c.result->passed()) ++failed;
    out << i << ',' << to_string(c.spec.rule) << ',' << format_real(c.spec.a) << ','
        << format_real(c.spec.m) << ',' << c.spec.N << ',' << cell_status(c) << ','
        << format_real(c.wall_seconds) << '\n';
  }
  err << "sweep: " << cells.size() << " cells, " << rejected << " rejected, " << failed
      << " failed audits\n";
  return failed ? kExitVerification : kExitOk;
}

}  // namespace lfmd
