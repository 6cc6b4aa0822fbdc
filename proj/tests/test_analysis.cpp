#include <doctest.h>

#include <cmath>
#include <random>

#include "lfmd/analysis.hpp"
#include "lfmd/errors.hpp"

using namespace lfmd;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an lfmd::Error");
  return ErrorCode::DomainError;
}

SolverConfig lf_config(const TestProblem& p, double a, double R, double m, std::size_t N,
                       MirrorMap map) {
  return SolverConfig{.max_iters = N,
                      .rule = LipschitzFreeStep{a, R, 1.0},
                      .weights = WeightScheme(m),
                      .map = map,
                      .norm = std::nullopt,
                      .feasible = p.feasible,
                      .composite = std::nullopt,
                      .record_iterates = true,
                      .track_average_value = false};
}

RunTrace solve(const TestProblem& p, const SolverConfig& cfg) {
  return p.composite ? composite_mirror_descent(p.objective, *p.composite, p.start, cfg)
                     : mirror_descent(p.objective, p.start, cfg);
}

}  // namespace

TEST_CASE("power sums") {
  CHECK(power_sum(4, -0.5) == doctest::Approx(2.784457050376173).epsilon(1e-15));
  CHECK(power_sum(4, 1.0) == 10.0);
  CHECK(power_sum(4, 0.5) == doctest::Approx(6.146264369941973).epsilon(1e-15));
}

TEST_CASE("theorem one examples") {
  CHECK(theorem1_rhs({2.0, 1.0, 0.0, 1}, 3.5) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(theorem1_rhs({50.0, 1.0, 0.0, 4}, 10.0) == doctest::Approx(59.80571).epsilon(1e-7));
  CHECK(theorem1_rhs({50.0, 1.0, 0.0, 4}, 10.0) ==
        doctest::Approx(5.0 * (2.0 + 2.784457050376173) / 4.0 * 10.0).epsilon(1e-15));
  CHECK(theorem1_rhs({50.0, 1.0, 2.0, 4}, 10.0) == doctest::Approx(70.73132).epsilon(1e-7));
  CHECK(code_of([] { (void)theorem1_rhs({50.0, 1.0, -2.0, 4}, 1.0); }) == ErrorCode::InvalidM);
  CHECK(code_of([] { (void)theorem1_rhs({0.0, 1.0, 0.0, 4}, 1.0); }) == ErrorCode::ConfigError);
}

TEST_CASE("corollary one examples") {
  CHECK(corollary1_rhs({50.0, 1.0, 0.0, 4}, 10.0) == doctest::Approx(75.0).epsilon(1e-15));
  CHECK(corollary1_rhs({2.0, 1.0, 0.0, 1}, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(corollary1_rhs({0.5, 1.0, 0.0, 100}, 1.0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(code_of([] { (void)corollary1_rhs({50.0, 1.0, 0.5, 4}, 1.0); }) == ErrorCode::InvalidM);
}

TEST_CASE("theorem two examples") {
  const BoundParams p{50.0, 1.0, 0.0, 4};
  CHECK(theorem2_rhs(p, 10.0, 10.0, 0.0) == theorem1_rhs(p, 10.0));
  CHECK(theorem2_rhs(p, 10.0, 10.0, 2.0) == doctest::Approx(60.30571).epsilon(1e-7));
  const BoundParams q{50.0, 1.0, -1.0, 4};
  CHECK(theorem2_rhs(q, 10.0, 5.0, 2.0) - theorem1_rhs(q, 10.0) ==
        doctest::Approx(1.436545).epsilon(1e-6));
  CHECK(code_of([] { (void)theorem2_rhs({50.0, 1.0, 0.5, 4}, 1.0, 1.0, 1.0); }) ==
        ErrorCode::InvalidM);
  CHECK(code_of([&] { (void)theorem2_rhs(q, 10.0, 0.0, 2.0); }) == ErrorCode::BoundUndefined);
  CHECK(theorem2_rhs(q, 10.0, 0.0, 0.0) == theorem1_rhs(q, 10.0));
}

TEST_CASE("corollary two examples") {
  CHECK(corollary2_rhs({50.0, 1.0, 0.0, 4}, 10.0, 0.0) == corollary1_rhs({50.0, 1.0, 0.0, 4}, 10.0));
  CHECK(corollary2_rhs({50.0, 1.0, 0.0, 4}, 10.0, 2.0) == doctest::Approx(75.5).epsilon(1e-15));
  CHECK(corollary2_rhs({0.5, 1.0, 0.0, 100}, 1.0, 5.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(code_of([] { (void)corollary2_rhs({0.5, 1.0, -1.0, 100}, 1.0, 5.0); }) ==
        ErrorCode::InvalidM);
}

TEST_CASE("bound dominance and monotone decay") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> n_dist(1, 1000000);
  for (int t = 0; t < 60; ++t) {
    const std::size_t N = t < 10 ? static_cast<std::size_t>(t + 1) : n_dist(rng);
    const BoundParams p{3.0, 1.0, 0.0, N};
    CHECK(theorem1_rhs(p, 2.0) <= corollary1_rhs(p, 2.0));
  }
  double prev = INFINITY;
  for (std::size_t N = 1; N <= 2000; ++N) {
    const double c = corollary1_rhs({1.0, 1.0, 0.0, N}, 1.0);
    CHECK(c < prev);
    prev = c;
  }
  for (double m : {-1.0, -0.5, 0.0})
    for (std::size_t N : {1u, 7u, 100u})
      CHECK(theorem2_rhs({2.0, 1.0, m, N}, 4.0, 1.0, 0.3) >= theorem1_rhs({2.0, 1.0, m, N}, 4.0));
}

TEST_CASE("empirical rate") {
  std::vector<std::pair<double, double>> half, one;
  for (double n : {100.0, 1000.0, 10000.0, 100000.0}) {
    half.emplace_back(n, 7.0 / std::sqrt(n));
    one.emplace_back(n, 0.3 / n);
  }
  CHECK(empirical_rate(half) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(empirical_rate(one) == doctest::Approx(-1.0).epsilon(1e-12));

  auto bad = half;
  bad[2].second = 0.0;
  CHECK(code_of([&] { (void)empirical_rate(bad); }) == ErrorCode::DegenerateFit);
  bad = half;
  bad.pop_back();
  CHECK(code_of([&] { (void)empirical_rate(bad); }) == ErrorCode::DegenerateFit);
  bad = half;
  std::swap(bad[0], bad[1]);
  CHECK(code_of([&] { (void)empirical_rate(bad); }) == ErrorCode::DegenerateFit);
}

TEST_CASE("audit of nesterov steps is diagnostic only") {
  const TestProblem p = example1();
  SolverConfig cfg = lf_config(p, 0.0, 200.0, 0.0, 81, MirrorMap::euclidean());
  cfg.rule = NesterovStep{};
  const RunTrace t = mirror_descent(p.objective, p.start, cfg);
  const AuditResult a = audit_trace(t, p, cfg);
  CHECK(a.report.kind == ReportKind::DiagnosticOnly);
  CHECK_FALSE(a.report.theorem_rhs.has_value());
  CHECK_FALSE(a.gamma_non_increasing);
  CHECK(a.report.satisfied);
  CHECK(a.certificates.ok());
  CHECK(to_string(a.report.kind) == "diagnostic-only");
}

TEST_CASE("audit of the abs distance run") {
  const TestProblem p = abs_distance_1d(0.3, 0.0, 1.0, 1.0);
  const SolverConfig cfg = lf_config(p, 0.0, 0.5, 0.0, 10000, MirrorMap::euclidean());
  const RunTrace t = mirror_descent(p.objective, p.start, cfg);
  const AuditResult a = audit_trace(t, p, cfg);
  CHECK(a.report.kind == ReportKind::TheoremOne);
  CHECK(a.report.observed_gap <= 0.015);
  CHECK(a.report.observed_gap <= *a.report.corollary_rhs);
  CHECK(a.passed());
  CHECK(a.gamma_non_increasing);
  CHECK(a.certificates.checked == t.completed());
  CHECK(t.completed() > 0);
}

TEST_CASE("audit needs a known optimum") {
  const TestProblem p = piecewise_linear_max({Vector{1.0}, Vector{-1.0}}, {0.0, 0.0},
                                             FeasibleSet::box(1, -1.0, 1.0), Vector{1.0});
  const SolverConfig cfg = lf_config(p, 0.0, 2.0, 0.0, 10, MirrorMap::euclidean());
  const RunTrace t = mirror_descent(p.objective, p.start, cfg);
  CHECK(code_of([&] { (void)audit_trace(t, p, cfg); }) == ErrorCode::MissingOptimum);
}

TEST_CASE("every shipped problem passes the audit on the sampled grid") {
  struct Entry {
    TestProblem p;
    MirrorMap map;
    double R;
  };
  std::vector<Entry> entries;
  entries.push_back({example1(), MirrorMap::euclidean(), 200.0});
  entries.push_back({abs_distance_1d(0.3, 0.0, 1.0, 1.0), MirrorMap::euclidean(), 0.5});
  const TestProblem sq = non_lipschitz_sqrt_simplex(4, 1e-12);
  entries.push_back({sq, MirrorMap::entropy(), *sq.radius_bound});
  entries.push_back({sq, MirrorMap::euclidean(), 1.0});
  const TestProblem pwl = piecewise_linear_max(3, 11);
  entries.push_back({pwl, MirrorMap::euclidean(), safe_R(pwl.feasible, MirrorMap::euclidean())});
  const TestProblem las = lasso_on_box(3, 0.2, 4);
  entries.push_back({las, MirrorMap::euclidean(), safe_R(las.feasible, MirrorMap::euclidean())});

  for (const Entry& e : entries) {
    std::vector<double> ms{-1.0, -0.5, 0.0};
    if (!e.p.is_composite()) {
      ms.push_back(1.0);
      ms.push_back(2.0);
    }
    for (double a : {0.0, 0.5, 1.0}) {
      for (double m : ms) {
        const SolverConfig cfg = lf_config(e.p, a, e.R, m, 300, e.map);
        const AuditResult r = audit_trace(solve(e.p, cfg), e.p, cfg);
        INFO(e.p.name, " a=", a, " m=", m);
        CHECK(r.passed());
        CHECK(r.gamma_non_increasing);
        CHECK(r.report.kind ==
              (e.p.is_composite() ? ReportKind::TheoremTwo : ReportKind::TheoremOne));
      }
    }
  }
}

TEST_CASE("audit of an immediate stop") {
  const TestProblem p = example1();
  const SolverConfig cfg = lf_config(p, 0.0, 200.0, 0.0, 10, MirrorMap::euclidean());
  const RunTrace t = mirror_descent(p.objective, Vector{0.0}, cfg);
  const AuditResult a = audit_trace(t, p, cfg);
  CHECK(a.report.observed_gap == 0.0);
  CHECK(a.passed());
}
