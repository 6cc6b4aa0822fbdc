#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfmd/errors.hpp"
#include "lfmd/experiment.hpp"

namespace {

struct CommonFlags {
  std::string problem;
  std::optional<double> gamma0;
  std::optional<double> R;
  std::optional<std::string> geometry;
  double eps_floor = 1e-12;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--problem", f.problem, "problem registry name")->required();
  app->add_option("--gamma0", f.gamma0, "step size for the fixed rule");
  app->add_option("--R", f.R, "radius constant for the lipschitz-free rule");
  app->add_option("--geometry", f.geometry, "euclidean or entropy")
      ->check(CLI::IsMember({"euclidean", "entropy"}));
  app->add_option("--eps-floor", f.eps_floor, "simplex floor for entropy problems");
  app->add_option("--seed", f.seed, "seed for generated problem data");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mirror descent experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_rule = "lipschitz-free";
  double run_a = 0.0, run_m = 0.0;
  std::size_t run_N = 1000;
  std::optional<std::string> run_out;
  std::string run_format = "csv";
  auto* run = app.add_subcommand("run", "run one experiment and audit it");
  add_common(run, run_flags);
  run->add_option("--rule", run_rule)->check(CLI::IsMember({"fixed", "nesterov", "lipschitz-free"}));
  run->add_option("--a", run_a);
  run->add_option("--m", run_m);
  run->add_option("--N", run_N);
  run->add_option("--out", run_out, "trace output path");
  run->add_option("--format", run_format)->check(CLI::IsMember({"csv", "json"}));

  std::optional<std::string> table_out;
  auto* table1 = app.add_subcommand("table1", "reproduce the Nesterov step-size table");
  table1->add_option("--out", table_out, "also write the table as CSV");

  CommonFlags sweep_flags;
  std::vector<std::string> sweep_rules{"lipschitz-free"};
  std::vector<double> sweep_a{0.0}, sweep_m{0.0};
  std::vector<std::size_t> sweep_N{100, 1000, 10000};
  std::string sweep_out = "sweep.csv";
  unsigned sweep_threads = 0;
  auto* sweep = app.add_subcommand("sweep", "grid of runs over rules, a, m and N");
  add_common(sweep, sweep_flags);
  sweep->add_option("--rule", sweep_rules)->delimiter(',');
  sweep->add_option("--a", sweep_a)->delimiter(',');
  sweep->add_option("--m", sweep_m)->delimiter(',');
  sweep->add_option("--N", sweep_N)->delimiter(',');
  sweep->add_option("--out", sweep_out, "summary CSV path");
  sweep->add_option("--threads", sweep_threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << '\n';
    return lfmd::kExitConfig;
  }

  try {
    if (*run) {
      lfmd::ExperimentSpec spec;
      spec.problem = run_flags.problem;
      spec.rule = lfmd::parse_rule(run_rule);
      spec.gamma0 = run_flags.gamma0;
      spec.a = run_a;
      spec.R = run_flags.R;
      spec.m = run_m;
      spec.N = run_N;
      if (run_flags.geometry) spec.geometry = lfmd::parse_geometry(*run_flags.geometry);
      spec.eps_floor = run_flags.eps_floor;
      spec.out = run_out;
      spec.format = run_format == "json" ? lfmd::OutputFormat::Json : lfmd::OutputFormat::Csv;
      spec.seed = run_flags.seed;
      return lfmd::cmd_run(spec, std::cout, std::cerr);
    }
    if (*table1) return lfmd::cmd_table1(std::cout, std::cerr, table_out);

    lfmd::SweepSpec spec;
    spec.problem = sweep_flags.problem;
    for (const auto& r : sweep_rules) spec.rules.push_back(lfmd::parse_rule(r));
    spec.a = sweep_a;
    spec.m = sweep_m;
    spec.N = sweep_N;
    spec.R = sweep_flags.R;
    spec.gamma0 = sweep_flags.gamma0;
    if (sweep_flags.geometry) spec.geometry = lfmd::parse_geometry(*sweep_flags.geometry);
    spec.eps_floor = sweep_flags.eps_floor;
    spec.seed = sweep_flags.seed;
    spec.out = sweep_out;
    spec.threads = sweep_threads;
    return lfmd::cmd_sweep(spec, std::cout, std::cerr);
  } catch (const lfmd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lfmd::kExitConfig;
  }
}
