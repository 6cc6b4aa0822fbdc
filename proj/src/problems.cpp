#include "lfmd/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <regex>
#include <sstream>

#include <Eigen/Dense>

#include "lfmd/errors.hpp"

namespace lfmd {

namespace {

Eigen::VectorXd to_eigen(const Vector& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data().data(), static_cast<Eigen::Index>(x.dim()));
}

Vector from_eigen(const Eigen::VectorXd& v) {
  return Vector(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

}  // namespace

double safe_R(const FeasibleSet& q, const MirrorMap& map) {
  if (map.kind() != MirrorKind::EuclideanHalfSq)
    throw Error(ErrorCode::NeedsExplicitR,
                "entropy divergence is unbounded near the simplex boundary; supply R");
  if (const auto* b = q.as_box()) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < b->lower.dim(); ++i) {
      const double w = b->upper[i] - b->lower[i];
      d2 += w * w;
    }
    return 0.5 * d2;
  }
  if (const auto* b = q.as_ball2()) return 2.0 * b->radius * b->radius;
  return 1.0;
}

// ---------------------------------------------------------------------------

TestProblem example1() {
  Objective f{"half-square",
              [](const Vector& x) { return 0.5 * x[0] * x[0]; },
              [](const Vector& x) { return x; }};
  FeasibleSet q = FeasibleSet::box(1, -10.0, 10.0);
  const double r = safe_R(q, MirrorMap::euclidean());
  return TestProblem{"example1",
                     std::move(f),
                     std::nullopt,
                     std::move(q),
                     MirrorKind::EuclideanHalfSq,
                     KnownOptimum{Vector{0.0}, 0.0, std::nullopt},
                     true,
                     Vector{10.0},
                     r};
}

TestProblem non_lipschitz_sqrt_simplex(std::size_t n, double floor) {
  if (n < 2) throw Error(ErrorCode::ConfigError, "sqrt-simplex needs n >= 2");
  FeasibleSet q = FeasibleSet::simplex(n, floor);
  const double nd = static_cast<double>(n);

  Objective f{"neg-sum-sqrt",
              [](const Vector& x) {
                double s = 0.0;
                for (double e : x) s -= std::sqrt(std::max(e, 0.0));
                return s;
              },
              [](const Vector& x) {
                std::vector<double> g(x.dim());
                for (std::size_t i = 0; i < x.dim(); ++i) g[i] = -0.5 / std::sqrt(x[i]);
                return Vector(std::move(g));
              }};

  std::vector<double> start(n);
  std::optional<double> radius;
  if (floor > 0.0) {
    std::fill(start.begin(), start.end(), floor);
    start[0] = 1.0 - (nd - 1.0) * floor;
    // KL(u, x) = -log n - mean(log x_i) is convex in x, so its maximum over
    // the floored simplex sits at a floored vertex.
    radius = -std::log(nd) - ((nd - 1.0) * std::log(floor) + std::log(start[0])) / nd;
  } else {
    std::fill(start.begin(), start.end(), 0.3 / (nd - 1.0));
    start[0] = 0.7;
  }

  return TestProblem{"sqrt-simplex-n" + std::to_string(n),
                     std::move(f),
                     std::nullopt,
                     std::move(q),
                     MirrorKind::NegEntropy,
                     KnownOptimum{Vector::constant(n, 1.0 / nd), -std::sqrt(nd), std::nullopt},
                     false,
                     Vector(std::move(start)),
                     radius};
}

// ---------------------------------------------------------------------------
// Piecewise-linear max
// ---------------------------------------------------------------------------

namespace {

struct Pieces {
  std::vector<Vector> slopes;
  std::vector<double> offsets;
};

Objective pwl_objective(std::shared_ptr<const Pieces> p) {
  auto value = [p](const Vector& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p->slopes.size(); ++j)
      best = std::max(best, dot(p->slopes[j], x) + p->offsets[j]);
    return best;
  };
  // First maximising piece, so the selection is deterministic at kinks.
  auto subgradient = [p](const Vector& x) {
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p->slopes.size(); ++j) {
      const double v = dot(p->slopes[j], x) + p->offsets[j];
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    return p->slopes[arg];
  };
  return Objective{"pwl-max", value, subgradient};
}

// min_{x in [-1,1]^n} max_j <a_j, x> + b_j as an LP in (x, t), solved by
// enumerating every basis of n + 1 tight constraints.
std::pair<Vector, double> pwl_exact_minimum(const Pieces& p, std::size_t n) {
  const std::size_t nv = n + 1;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (std::size_t j = 0; j < p.slopes.size(); ++j) {
    Eigen::VectorXd r(nv);
    for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = -p.slopes[j][i];
    r[static_cast<Eigen::Index>(n)] = 1.0;
    rows.push_back(r);
    rhs.push_back(p.offsets[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
    r[static_cast<Eigen::Index>(i)] = 1.0;
    rows.push_back(r);
    rhs.push_back(-1.0);
    rows.push_back(-r);
    rhs.push_back(-1.0);
  }

  const std::size_t total = rows.size();
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(nv), true);

  double best_t = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  do {
    Eigen::MatrixXd m(nv, nv);
    Eigen::VectorXd v(nv);
    Eigen::Index r = 0;
    for (std::size_t c = 0; c < total; ++c) {
      if (!pick[c]) continue;
      m.row(r) = rows[c].transpose();
      v[r] = rhs[c];
      ++r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd z = lu.solve(v);
    bool feasible = true;
    for (std::size_t c = 0; c < total && feasible; ++c) feasible = rows[c].dot(z) >= rhs[c] - 1e-12;
    if (feasible && z[static_cast<Eigen::Index>(n)] < best_t) {
      best_t = z[static_cast<Eigen::Index>(n)];
      best_x = z.head(static_cast<Eigen::Index>(n));
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));

  if (!std::isfinite(best_t))
    throw Error(ErrorCode::OracleUnavailable, "vertex enumeration found no feasible basis");
  Vector x(std::vector<double>(best_x.data(), best_x.data() + best_x.size()));
  return {FeasibleSet::box(n, -1.0, 1.0).project(x), best_t};
}

}  // namespace

TestProblem piecewise_linear_max(std::size_t n, std::uint64_t seed, bool planted) {
  if (n == 0) throw Error(ErrorCode::ConfigError, "pwl-max needs n >= 1");
  if (!planted && n > 3)
    throw Error(ErrorCode::OracleUnavailable,
                "exact enumeration is limited to n <= 3; request a planted optimum");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_vec = [&](double scale) {
    std::vector<double> v(n);
    for (double& e : v) e = scale * unit(rng);
    return v;
  };

  auto pieces = std::make_shared<Pieces>();
  std::optional<KnownOptimum> opt;
  if (planted) {
    // n random slopes plus their negated sum: 0 is the centroid of the
    // active slopes, so x* minimises f over R^n and f* = 0.
    const Vector x_star(random_vec(0.5));
    std::vector<double> closing(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto a = random_vec(1.0);
      for (std::size_t i = 0; i < n; ++i) closing[i] -= a[i];
      pieces->slopes.emplace_back(a);
    }
    pieces->slopes.emplace_back(closing);
    std::vector<double> active_offsets(n + 1, 0.0);
    for (int extra = 0; extra < 2; ++extra) {
      pieces->slopes.emplace_back(random_vec(1.0));
      active_offsets.push_back(-0.5 - 0.5 * (unit(rng) + 1.0));
    }
    for (std::size_t j = 0; j < pieces->slopes.size(); ++j)
      pieces->offsets.push_back(active_offsets[j] - dot(pieces->slopes[j], x_star));
    opt = KnownOptimum{x_star, 0.0, std::nullopt};
  } else {
    for (std::size_t j = 0; j < n + 2; ++j) {
      pieces->slopes.emplace_back(random_vec(1.0));
      pieces->offsets.push_back(0.5 * unit(rng));
    }
    auto [x_star, t] = pwl_exact_minimum(*pieces, n);
    opt = KnownOptimum{x_star, t, std::nullopt};
  }

  Objective f = pwl_objective(pieces);
  opt->f_star = f.value(opt->x_star);
  FeasibleSet q = FeasibleSet::box(n, -1.0, 1.0);
  const double r = safe_R(q, MirrorMap::euclidean());
  std::string name = "pwl-max-n" + std::to_string(n) + "-s" + std::to_string(seed);
  if (!planted) name += "-exact";
  return TestProblem{std::move(name), std::move(f),       std::nullopt,
                     std::move(q),    MirrorKind::EuclideanHalfSq, std::move(opt),
                     true,            Vector::constant(n, 1.0),    r};
}

TestProblem piecewise_linear_max(std::vector<Vector> slopes, std::vector<double> offsets,
                                 FeasibleSet feasible, Vector start) {
  if (slopes.empty() || slopes.size() != offsets.size())
    throw Error(ErrorCode::ConfigError, "need one offset per slope and at least one piece");
  for (const auto& a : slopes) {
    if (a.dim() != feasible.dim()) throw Error(ErrorCode::DimensionMismatch, "slope dim");
  }
  auto pieces = std::make_shared<Pieces>(Pieces{std::move(slopes), std::move(offsets)});
  std::optional<double> r;
  r = safe_R(feasible, MirrorMap::euclidean());
  return TestProblem{"pwl-max-custom", pwl_objective(pieces), std::nullopt, std::move(feasible),
                     MirrorKind::EuclideanHalfSq, std::nullopt, true, std::move(start), r};
}

// ---------------------------------------------------------------------------
// Lasso on a box
// ---------------------------------------------------------------------------

namespace {

struct LassoData {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double lambda;
};

double soft_threshold(double z, double t) {
  return std::copysign(std::max(std::abs(z) - t, 0.0), z);
}

double lasso_total(const LassoData& d, const Eigen::VectorXd& x) {
  return 0.5 * (d.A * x - d.b).squaredNorm() + d.lambda * x.lpNorm<1>();
}

// Reference 1: proximal gradient with step 1/L; the prox of lambda|.|_1 plus
// the box indicator is the clamped soft-threshold.
Eigen::VectorXd lasso_proximal_gradient(const LassoData& d) {
  const Eigen::MatrixXd gram = d.A.transpose() * d.A;
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
  const double step = 1.0 / L;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.A.cols());
  for (int it = 0; it < 500'000; ++it) {
    const Eigen::VectorXd z = x - step * (d.A.transpose() * (d.A * x - d.b));
    Eigen::VectorXd next(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      next[i] = std::clamp(soft_threshold(z[i], step * d.lambda), -1.0, 1.0);
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (change < 1e-15) break;
  }
  return x;
}

// Reference 2: cyclic coordinate descent with exact 1-D minimisation.
Eigen::VectorXd lasso_coordinate_descent(const LassoData& d) {
  const Eigen::Index n = d.A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = d.b;  // b - A x
  const Eigen::VectorXd col_sq = d.A.colwise().squaredNorm().transpose();
  for (int sweep = 0; sweep < 1'000'000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (col_sq[i] == 0.0) continue;
      const double z = x[i] + d.A.col(i).dot(residual) / col_sq[i];
      const double t = std::clamp(soft_threshold(z, d.lambda / col_sq[i]), -1.0, 1.0);
      const double delta = t - x[i];
      if (delta != 0.0) {
        residual -= delta * d.A.col(i);
        x[i] = t;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change < 1e-15) break;
  }
  return x;
}

TestProblem make_lasso(std::shared_ptr<const LassoData> d, std::string name) {
  const Eigen::VectorXd x_pg = lasso_proximal_gradient(*d);
  const Eigen::VectorXd x_cd = lasso_coordinate_descent(*d);
  const double gap_x = (x_pg - x_cd).lpNorm<Eigen::Infinity>();
  const double gap_F = std::abs(lasso_total(*d, x_pg) - lasso_total(*d, x_cd));
  if (!(gap_x <= 1e-10) || !(gap_F <= 1e-10))
    throw Error(ErrorCode::OracleUnavailable,
                "lasso reference solvers disagree (|dx| = " + format_double(gap_x) + ")");
  // The coordinate-descent point is the better of the two in practice.
  const Eigen::VectorXd x_best =
      lasso_total(*d, x_cd) <= lasso_total(*d, x_pg) ? x_cd : x_pg;

  const std::size_t n = static_cast<std::size_t>(d->A.cols());
  Objective f{"half-least-squares",
              [d](const Vector& x) { return 0.5 * (d->A * to_eigen(x) - d->b).squaredNorm(); },
              [d](const Vector& x) {
                return from_eigen(d->A.transpose() * (d->A * to_eigen(x) - d->b));
              }};
  CompositeTerm h = CompositeTerm::l1(d->lambda);
  const Vector x_star = from_eigen(x_best);
  const double f_star = f.value(x_star);
  const double F_star = f_star + h.value(x_star);
  FeasibleSet q = FeasibleSet::box(n, -1.0, 1.0);
  const double r = safe_R(q, MirrorMap::euclidean());
  return TestProblem{std::move(name),
                     std::move(f),
                     std::move(h),
                     std::move(q),
                     MirrorKind::EuclideanHalfSq,
                     KnownOptimum{x_star, f_star, F_star},
                     true,
                     Vector::constant(n, 1.0),
                     r};
}

}  // namespace

TestProblem lasso_on_box(std::size_t n, double lambda, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::ConfigError, "lasso needs n >= 1");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::ConfigError, "lambda must be >= 0");
  const std::size_t rows = 2 * n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-0.8, 0.8);

  auto d = std::make_shared<LassoData>();
  d->A.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < d->A.rows(); ++i)
    for (Eigen::Index j = 0; j < d->A.cols(); ++j)
      d->A(i, j) = normal(rng) / std::sqrt(static_cast<double>(rows));
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < truth.size(); j += 2) truth[j] = unit(rng);
  d->b = d->A * truth;
  for (Eigen::Index i = 0; i < d->b.size(); ++i) d->b[i] += 0.1 * normal(rng);
  d->lambda = lambda;

  return make_lasso(d, "lasso-box-n" + std::to_string(n) + "-l" + format_double(lambda) + "-s" +
                           std::to_string(seed));
}

TestProblem lasso_on_box(std::vector<double> A, std::size_t rows, std::size_t cols,
                         std::vector<double> b, double lambda, std::string name) {
  if (A.size() != rows * cols || b.size() != rows || cols == 0)
    throw Error(ErrorCode::DimensionMismatch, "lasso data shape");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::ConfigError, "lambda must be >= 0");
  auto d = std::make_shared<LassoData>();
  d->A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      A.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  d->b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(rows));
  d->lambda = lambda;
  return make_lasso(d, std::move(name));
}

TestProblem abs_distance_1d(double center, double lo, double hi, double start) {
  if (!(center >= lo && center <= hi))
    throw Error(ErrorCode::ConfigError, "center must lie inside [lo, hi]");
  Objective f{"abs-distance",
              [center](const Vector& x) { return std::abs(x[0] - center); },
              [center](const Vector& x) {
                const double d = x[0] - center;
                return Vector{d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)};
              }};
  FeasibleSet q = FeasibleSet::box(1, lo, hi);
  const double r = safe_R(q, MirrorMap::euclidean());
  return TestProblem{"abs-1d",
                     std::move(f),
                     std::nullopt,
                     std::move(q),
                     MirrorKind::EuclideanHalfSq,
                     KnownOptimum{Vector{center}, 0.0, std::nullopt},
                     true,
                     Vector{start},
                     r};
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ConfigError, "bad integer '" + s + "' in problem name");
  return v;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ConfigError, "bad number '" + s + "' in problem name");
  return v;
}

const std::regex kSqrt(R"(sqrt-simplex-n(\d+))");
const std::regex kPwl(R"(pwl-max-n(\d+)(?:-s(\d+))?)");
const std::regex kLasso(R"(lasso-box-n(\d+)-l([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)(?:-s(\d+))?)");

}  // namespace

bool names_composite_problem(std::string_view name) {
  return std::regex_match(std::string(name), kLasso);
}

TestProblem make_problem(std::string_view name, double eps_floor, std::uint64_t default_seed) {
  const std::string s(name);
  std::smatch m;
  if (s == "example1") return example1();
  if (std::regex_match(s, m, kSqrt)) {
    return non_lipschitz_sqrt_simplex(static_cast<std::size_t>(parse_u64(m[1])), eps_floor);
  }
  if (std::regex_match(s, m, kPwl)) {
    const std::uint64_t seed = m[2].matched ? parse_u64(m[2]) : default_seed;
    return piecewise_linear_max(static_cast<std::size_t>(parse_u64(m[1])), seed, true);
  }
  if (std::regex_match(s, m, kLasso)) {
    const std::uint64_t seed = m[3].matched ? parse_u64(m[3]) : default_seed;
    return lasso_on_box(static_cast<std::size_t>(parse_u64(m[1])), parse_real(m[2]), seed);
  }
  throw Error(ErrorCode::ConfigError, "unknown problem '" + s + "'");
}

}  // namespace lfmd
