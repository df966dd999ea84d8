#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gldual/solvers.hpp"
#include "gldual/rng.hpp"
#include "support/dense.hpp"

using namespace gldual;
using testsupport::random_field;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("solve_spd: zero rhs, sine mode, dense oracle") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 5});
  EllipticOperator a = laplacian(g, 1.0, 1.0);  // -Lap + I
  CHECK(l2_norm(solve_spd(a, ScalarField::zeros(g))) == 0.0);

  const double h = g->spacing();
  const double mu1 = (2.0 - 2.0 * std::cos(kPi * h)) / (h * h);
  ScalarField s1 = ScalarField::zeros(g);
  for (std::size_t i = 0; i < s1.size(); ++i)
    s1[i] = std::sin(kPi * g->coord(i, 0));
  ScalarField x = solve_spd(a, s1);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(x[i] == doctest::Approx(s1[i] / (mu1 + 1.0)).epsilon(1e-11));

  // random SPD systems up to 50 unknowns against dense Cholesky
  Rng rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = (trial % 2) + 1;
    const int n = dim == 1 ? 4 + static_cast<int>(rng.uniform(0, 9)) : 5 + (trial % 3);
    GridPtr gg = Grid::build({dim, {1.0, 1.0}, n});
    if (gg->size() > 50) continue;
    ScalarField diag = random_field(gg, rng, 0.1, 3.0);
    EllipticOperator A = laplacian(gg, rng.uniform(0.2, 2.0), diag);
    ScalarField b = random_field(gg, rng, -1.0, 1.0);
    ScalarField xx = solve_spd(A, b);
    auto ref = testsupport::cholesky_solve(testsupport::densify(A), b.values);
    for (std::size_t i = 0; i < xx.size(); ++i)
      CHECK(std::fabs(xx[i] - ref[i]) <= 1e-10 * (1.0 + std::fabs(ref[i])));
  }
}

TEST_CASE("solve_spd: residual contract and non-SPD detection") {
  Rng rng(73);
  GridPtr g = Grid::build({2, {1.0, 1.0}, 9});
  EllipticOperator a = laplacian(g, 0.5, random_field(g, rng, 0.0, 1.0));
  ScalarField b = random_field(g, rng, -1.0, 1.0);
  ScalarField x = solve_spd(a, b);
  ScalarField r = add_scaled(b, -1.0, a.apply(x));
  const double bn = std::sqrt(inner(b, b));
  CHECK(std::sqrt(inner(r, r)) <= 1e-11 * bn);

  // strongly negative diagonal makes the operator indefinite
  EllipticOperator bad = laplacian(g, 0.01, -100.0);
  CHECK_THROWS_AS(solve_spd(bad, b), SolveError);
}

TEST_CASE("min_eigenvalue: closed form, shift, dense oracle") {
  for (int n : {8, 12}) {
    GridPtr g = Grid::build({1, {1.0, 1.0}, n});
    const double h = g->spacing();
    EllipticOperator a = laplacian(g, 1.0, 0.0);
    const double expected = (2.0 - 2.0 * std::cos(kPi * h)) / (h * h);
    CHECK(std::fabs(min_eigenvalue(a) - expected) <= 1e-8 * expected);

    const double c = -3.7;
    CHECK(min_eigenvalue(a.shifted(c)) ==
          doctest::Approx(expected + c).epsilon(1e-8));
  }

  Rng rng(79);
  for (int trial = 0; trial < 8; ++trial) {
    const int dim = (trial % 2) + 1;
    const int n = dim == 1 ? 5 + static_cast<int>(rng.uniform(0, 8)) : 5 + (trial % 3);
    GridPtr g = Grid::build({dim, {1.0, 1.0}, n});
    if (g->size() > 50) continue;
    ScalarField diag = random_field(g, rng, -5.0, 5.0);  // indefinite allowed
    EllipticOperator a = laplacian(g, rng.uniform(0.1, 2.0), diag);
    const double lam = min_eigenvalue(a);
    const double ref = testsupport::dense_min_eig(a);
    CHECK(std::fabs(lam - ref) <= 1e-8 * (1.0 + std::fabs(ref)));
  }
}

TEST_CASE("newton_primal: manufactured solution from a perturbed start") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 41});
  ScalarField w = ScalarField::zeros(g);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = g->coord(i, 0);
    w[i] = 0.4 * std::sin(kPi * x) + 0.1 * std::sin(2.0 * kPi * x);
  }
  ModelParams p0 = make_params(g, 1.0, 1.0, 1.0);
  ModelParams p = make_params(g, 1.0, 1.0, 1.0, primal_gradient(p0, w));

  Rng rng(83);
  ScalarField u0 = w;
  for (auto& x : u0.values) x += rng.uniform(-0.05, 0.05);
  auto [u, rep] = newton_primal(p, u0);
  CHECK(rep.converged);
  CHECK(rep.residual < 1e-10);
  CHECK(sup_norm(add_scaled(u, -1.0, w)) < 1e-8);
  // residual history never increases after an accepted step
  for (std::size_t i = 1; i < rep.history.size(); ++i)
    CHECK(rep.history[i] <= rep.history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("newton_primal: stable-zero regime and the already-critical start") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 31});
  ModelParams p = make_params(g, 1.0, 1.0, 1.0);

  Rng rng(89);
  ScalarField init = random_field(g, rng, -0.1, 0.1);
  auto [u, rep] = newton_primal(p, init);
  CHECK(rep.converged);
  CHECK(sup_norm(u) < 1e-9);  // converges to zero in this regime

  auto [u2, rep2] = newton_primal(p, ScalarField::zeros(g));
  CHECK(rep2.converged);
  CHECK(rep2.iterations == 0);
}

TEST_CASE("newton_primal: budget exhaustion is reported, not thrown") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 31});
  ScalarField f = ScalarField::zeros(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = 0.05 * std::sin(kPi * g->coord(i, 0));
  ModelParams p = make_params(g, 1.0, 1.0, 1.0, f);
  SolveOptions opts;
  opts.max_iterations = 1;
  auto [u, rep] = newton_primal(p, ScalarField::zeros(g), opts);
  CHECK_FALSE(rep.converged);
}

TEST_CASE("solve_dual: stable-zero regime converges to (0, -alpha beta)") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 21});
  ModelParams p = make_params(g, 1.0, 1.0, 1.0);
  Rng rng(97);
  ScalarField init = random_field(g, rng, -0.5, 0.5);
  auto [pair, rep] = solve_dual(p, init);
  CHECK(rep.converged);
  CHECK(sup_norm(pair.v1) < 1e-7);
  for (std::size_t i = 0; i < pair.v0.size(); ++i)
    CHECK(pair.v0[i] == doctest::Approx(-1.0).epsilon(1e-7));
  // monotone objective along accepted iterates
  for (std::size_t i = 1; i < rep.objective_history.size(); ++i)
    CHECK(rep.objective_history[i] <= rep.objective_history[i - 1] + 1e-14);
  // iterates stay in the box
  CHECK(check_C_star(p, pair.v1).member);
}

TEST_CASE("solve_dual: warm start from the stationary pair ends immediately") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 41});
  ScalarField f = ScalarField::zeros(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = 0.05 * std::sin(kPi * g->coord(i, 0));
  ModelParams p = make_params(g, 1.0, 1.0, 1.0, f);

  auto [u0, prep] = newton_primal(p, ScalarField::zeros(g));
  REQUIRE(prep.converged);
  // v1 = -gamma Lap u0 + K u0 - f
  EllipticOperator a = laplacian(g, p.gamma, p.K);
  ScalarField v1 = add_scaled(a.apply(u0), -1.0, p.f);

  auto [pair, rep] = solve_dual(p, v1);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2);

  // infeasible start rejected when projection is off
  SolveOptions opts;
  opts.project = false;
  CHECK_THROWS_AS(solve_dual(p, ScalarField::constant(g, 2.0 * p.K2), opts),
                  ConfigError);
}

TEST_CASE("brute_force_min: deterministic, agrees with Newton at desk scale") {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 7});  // 5 interior nodes
  ModelParams p = make_params(g, 1.0, 1.0, 1.0);
  SolveOptions opts;
  opts.seed = 2024;

  BruteForceResult a = brute_force_min(p, opts);
  BruteForceResult b = brute_force_min(p, opts);
  CHECK(a.value == b.value);  // seeded determinism, bit for bit
  for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] == b.u[i]);

  // stable-zero regime: the flat state is the global minimum
  CHECK(std::fabs(a.value - 0.5 * g->measure()) < 1e-10);

  auto [u, rep] = newton_primal(p, ScalarField::zeros(g));
  REQUIRE(rep.converged);
  CHECK(std::fabs(a.value - eval_J(p, u)) < 1e-8);

  GridPtr big = Grid::build({1, {1.0, 1.0}, 20});
  ModelParams pbig = make_params(big, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(brute_force_min(pbig, opts), ConfigError);
}

TEST_CASE("solve options are validated") {
  SolveOptions opts;
  opts.backtrack_factor = 1.5;
  CHECK_THROWS_AS(opts.validate(), ConfigError);
}
