// Acceptance suite: every criterion the project must meet, each printed as a
// single pass/fail line with its measured margin. Exits nonzero when any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gldual/config.hpp"
#include "gldual/dual.hpp"
#include "gldual/model.hpp"
#include "gldual/rng.hpp"
#include "gldual/solvers.hpp"
#include "gldual/verify.hpp"
#include "support/dense.hpp"

using namespace gldual;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
int g_failures = 0;

void report(int id, const std::string& label, bool pass,
            const std::string& detail) {
  std::printf("[%s] %02d %s (%s)\n", pass ? "PASS" : "FAIL", id, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

ScalarField sine_source(const GridPtr& g, double amp) {
  ScalarField f = ScalarField::zeros(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = amp * std::sin(kPi * g->coord(i, 0));
  return f;
}

struct Instance {
  int n;
  double amp;
  ModelParams p;
  ScalarField u0;
  SolveReport primal;
  DualityReport rep;
  double seconds = 0.0;
};

// criteria 1-4 share the converged pipeline instances
std::vector<Instance> run_instances() {
  std::vector<Instance> out;
  for (int n : {51, 101, 201}) {
    for (double amp : {0.0, 0.05}) {
      const auto t0 = std::chrono::steady_clock::now();
      GridPtr g = Grid::build({1, {1.0, 1.0}, n});
      ModelParams p = make_params(g, 1.0, 1.0, 1.0, sine_source(g, amp));
      auto [u0, prep] = newton_primal(p, ScalarField::zeros(g));
      DualityReport rep = duality_gap(p, u0);
      const auto t1 = std::chrono::steady_clock::now();
      Instance inst{n, amp, std::move(p), std::move(u0), prep, std::move(rep),
                    std::chrono::duration<double>(t1 - t0).count()};
      out.push_back(std::move(inst));
    }
  }
  return out;
}

void criterion_1(const std::vector<Instance>& insts) {
  bool pass = true;
  double worst_gap = 0.0, worst_time = 0.0;
  for (const auto& i : insts) {
    const bool members = i.rep.a_plus.member_strict && i.rep.b_star.member &&
                         i.rep.c_star.member && i.rep.u_tilde_proxy;
    pass = pass && i.primal.converged && i.primal.residual < 1e-10 && members &&
           i.rep.gap_rel < 1e-8 && i.seconds < 10.0;
    worst_gap = std::max(worst_gap, i.rep.gap_rel);
    worst_time = std::max(worst_time, i.seconds);
  }
  report(1, "zero duality gap, stable regimes, n in {51,101,201}", pass,
         "max gap_rel " + num(worst_gap) + ", max time " + num(worst_time) + "s");
}

void criterion_2(const std::vector<Instance>& insts) {
  bool pass = true;
  double worst_cross = 0.0, worst_rec = 0.0, worst_v0 = 0.0;
  for (const auto& i : insts) {
    DualPair pair = dual_pair_from_primal(i.p, i.u0);
    // v0 re-derived with the plain expression; identical by construction
    double v0diff = 0.0;
    for (std::size_t k = 0; k < i.u0.size(); ++k)
      v0diff = std::max(v0diff,
                        std::fabs(pair.v0[k] -
                                  i.p.alpha * (i.u0[k] * i.u0[k] - i.p.beta)));
    worst_v0 = std::max(worst_v0, v0diff);
    worst_cross = std::max(worst_cross, i.rep.cross_residual);
    worst_rec = std::max(worst_rec, i.rep.recover_linf);
    pass = pass && v0diff == 0.0 && i.rep.cross_residual < 1e-9 &&
           i.rep.recover_linf < 1e-9;
  }
  report(2, "extremality relations at the stationary pair", pass,
         "v0 " + num(worst_v0) + ", cross " + num(worst_cross) + ", recover " +
             num(worst_rec));
}

void criterion_3(const std::vector<Instance>& insts) {
  bool pass = true;
  double worst = 0.0;
  for (const auto& i : insts) {
    const double tol_F = 1e-8 * (1.0 + std::fabs(eval_F(i.p, i.u0)));
    const double tol_G =
        1e-8 * (1.0 + std::fabs(eval_G(i.p, i.u0, ScalarField::zeros(i.u0.grid))));
    pass = pass && i.rep.legendre_F_res < tol_F && i.rep.legendre_G_res < tol_G;
    worst = std::max({worst, i.rep.legendre_F_res, i.rep.legendre_G_res});
  }
  report(3, "Legendre identities for F* and G*", pass, "max residual " + num(worst));
}

void criterion_4(const std::vector<Instance>& insts) {
  bool pass = true;
  double worst_grad = 0.0;
  int worst_iters = 0;
  for (const auto& i : insts) {
    pass = pass && i.rep.dual_grad_norm < 1e-7;
    worst_grad = std::max(worst_grad, i.rep.dual_grad_norm);
    DualPair pair = dual_pair_from_primal(i.p, i.u0);
    auto [dp, drep] = solve_dual(i.p, std::move(pair.v1));
    pass = pass && drep.converged && drep.iterations <= 2;
    worst_iters = std::max(worst_iters, drep.iterations);
  }
  report(4, "dual stationarity transfers to J1*", pass,
         "max |grad J1*| " + num(worst_grad) + ", warm-start iterations " +
             std::to_string(worst_iters));
}

void criterion_5() {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 31});
  ModelParams p = make_params(g, 1.0, 1.0, 1.0);
  ProbeReport pr = convexity_probe(p, g, 12345, 10, 20, 200);
  ProbeReport neg = probe_convexity(
      [&](const ScalarField& v) { return -eval_J1_star(p, v); }, p, g, 12345,
      10, 20, 200);
  const bool pass = pr.failures == 0 && pr.min_second_diff >= -1e-8 &&
                    pr.worst_midpoint_gap <= 1e-9 && !neg.pass &&
                    neg.min_second_diff < -1e-8;
  report(5, "convexity of J1* on C*, with failing negative control", pass,
         "min second diff " + num(pr.min_second_diff) + ", worst midpoint " +
             num(pr.worst_midpoint_gap) + ", control " +
             num(neg.min_second_diff));
}

void criterion_6() {
  struct Setting { double gamma, beta; int n; };
  const std::vector<Setting> settings = {
      {1.0, 1.0, 8}, {0.8, 1.0, 7}, {1.5, 1.2, 8}, {1.0, 0.8, 6}, {1.2, 1.0, 7}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& s : settings) {
    GridPtr g = Grid::build({1, {1.0, 1.0}, s.n});
    ModelParams p = make_params(g, s.gamma, 1.0, s.beta);
    SolveOptions opts;
    opts.seed = 99;
    BruteForceResult oracle = brute_force_min(p, opts);
    auto [u0, rep] = newton_primal(p, ScalarField::zeros(g));
    if (!rep.converged) { pass = false; continue; }
    DualPair pair = dual_pair_from_primal(p, u0);
    const double j1 = eval_J1_star(p, pair.v1);
    const double diff = std::fabs(oracle.value - j1);
    worst = std::max(worst, diff);
    pass = pass && diff < 1e-8;
  }
  report(6, "brute-force oracle equals J1* at desk scale (5 settings)", pass,
         "max |oracle - J1*| " + num(worst));
}

void criterion_7() {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 101});
  ModelParams p = make_params(g, 0.01, 1.0, 1.0);
  MembershipReport a = check_A_plus(p, ScalarField::zeros(g));
  bool pass = a.converged && a.lambda_min < 0.0 && !a.member;

  // the CLI must exit 3 and mark the hypotheses unmet
  const fs::path tmp = fs::current_path() / "acceptance_negctrl";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  {
    std::ofstream os(tmp / "cfg.ini");
    os << "[domain]\ndimension = 1\nextent = 1.0\nn = 101\n"
       << "[model]\ngamma = 0.01\nalpha = 1.0\nbeta = 1.0\n";
  }
  const std::string cmd = std::string(GLDUAL_CLI_PATH) + " --config " +
                          (tmp / "cfg.ini").string() + " --out " +
                          (tmp / "out").string() + " verify > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  pass = pass && rc == 3;

  std::ifstream is(tmp / "out" / "duality_report.txt");
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string rep = buf.str();
  pass = pass && rep.find("hypotheses_met = 0") != std::string::npos &&
         rep.find("in_A_plus = 0") != std::string::npos;
  fs::remove_all(tmp);

  report(7, "negative control: low gamma fails the hypotheses, exit 3", pass,
         "lambda_min " + num(a.lambda_min) + ", exit code " + std::to_string(rc));
}

void criterion_8() {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 21});
  Rng rng(321);
  ModelParams p =
      make_params(g, 1.0, 1.0, 1.0, testsupport::random_field(g, rng, -0.3, 0.3));
  const double eps = 1e-5;
  double worst = 0.0;
  bool pass = true;
  auto check_rel = [&](double an, double fd) {
    const double rel = std::fabs(an - fd) / (1.0 + std::fabs(fd));
    worst = std::max(worst, rel);
    pass = pass && rel < 1e-6;
  };

  for (int trial = 0; trial < 20; ++trial) {
    ScalarField u = testsupport::random_field(g, rng, -1.5, 1.5);
    ScalarField d = testsupport::random_field(g, rng, -1.0, 1.0);
    check_rel(inner(primal_gradient(p, u), d),
              testsupport::directional_derivative(
                  [&](const ScalarField& x) { return eval_J(p, x); }, u, d, eps));

    ScalarField hd = primal_hessian(p, u).apply(d);
    ScalarField fdh = scaled(
        add_scaled(primal_gradient(p, add_scaled(u, eps, d)), -1.0,
                   primal_gradient(p, add_scaled(u, -eps, d))),
        0.5 / eps);
    const double rel =
        l2_norm(add_scaled(hd, -1.0, fdh)) / (1.0 + l2_norm(hd));
    worst = std::max(worst, rel);
    pass = pass && rel < 1e-6;

    ScalarField v1 = testsupport::random_field(g, rng, -0.8 * p.K2, 0.8 * p.K2);
    ScalarField v0 = testsupport::random_field(g, rng, -2.5, 0.25 * p.K - 0.2);
    check_rel(inner(grad_G_star_v1(p, v1, v0), d),
              testsupport::directional_derivative(
                  [&](const ScalarField& x) { return eval_G_star(p, x, v0); },
                  v1, d, eps));

    check_rel(inner(grad_J1_star(p, v1), d),
              testsupport::directional_derivative(
                  [&](const ScalarField& x) { return eval_J1_star(p, x); },
                  v1, d, eps));
  }
  report(8, "analytic derivatives match central differences (4 kinds x 20)",
         pass, "worst relative error " + num(worst));
}

void criterion_9() {
  GridPtr g = Grid::build({1, {1.0, 1.0}, 41});
  ModelParams p = make_params(g, 1.0, 1.0, 1.0);
  Rng rng(654);
  bool pass = true;
  double worst_res = 0.0, worst_cert = -1.0 / p.alpha, worst_margin = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField v1 =
        testsupport::random_field(g, rng, -0.999 * p.K2, 0.999 * p.K2);
    ScalarField v0 = v0_of_v1(p, v1);
    const double res = sup_norm(inner_stationarity(p, v1, v0));
    const double cert = concavity_certificate(p, v1, v0);
    const double margin = check_B_star(p, v0).margin;
    worst_res = std::max(worst_res, res);
    worst_cert = std::max(worst_cert, cert);
    worst_margin = std::min(worst_margin, margin);
    pass = pass && res < 1e-10 && cert < 0.0 && margin > 0.0;
  }
  report(9, "inner maximization: stationarity, strict B*, concavity certificate",
         pass, "max residual " + num(worst_res) + ", max certificate " +
                   num(worst_cert) + ", min margin " + num(worst_margin));
}

void criterion_10() {
  bool pass = true;
  double worst_eig = 0.0, worst_solve = 0.0;
  // closed-form stencil spectrum, n <= 12, against the dense oracle and the
  // production eigensolver
  for (int n = 4; n <= 12; ++n) {
    GridPtr g = Grid::build({1, {1.0, 1.0}, n});
    const double h = g->spacing();
    EllipticOperator a = laplacian(g, 1.0, 0.0);
    auto eig = testsupport::jacobi_eigenvalues(testsupport::densify(a));
    for (int k = 1; k <= g->interior_per_axis(); ++k) {
      const double mu = (2.0 - 2.0 * std::cos(k * kPi * h)) / (h * h);
      const double err = std::fabs(eig[k - 1] - mu);
      worst_eig = std::max(worst_eig, err);
      pass = pass && err <= 1e-10 * (1.0 + mu);
    }
    const double lam = min_eigenvalue(a);
    const double mu1 = (2.0 - 2.0 * std::cos(kPi * h)) / (h * h);
    pass = pass && std::fabs(lam - mu1) <= 1e-10 * (1.0 + mu1);
  }

  Rng rng(987);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = (trial % 2) + 1;
    const int n = dim == 1 ? 5 + static_cast<int>(rng.uniform(0, 9)) : 5 + (trial % 3);
    GridPtr g = Grid::build({dim, {1.0, 1.0}, n});
    if (g->size() > 50) continue;
    EllipticOperator a =
        laplacian(g, rng.uniform(0.2, 2.0), testsupport::random_field(g, rng, 0.1, 3.0));
    ScalarField b = testsupport::random_field(g, rng, -1.0, 1.0);
    ScalarField x = solve_spd(a, b);
    auto ref = testsupport::cholesky_solve(testsupport::densify(a), b.values);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double err = std::fabs(x[i] - ref[i]) / (1.0 + std::fabs(ref[i]));
      worst_solve = std::max(worst_solve, err);
      pass = pass && err <= 1e-10;
    }
  }
  report(10, "discretization sanity: stencil spectrum and SPD solves", pass,
         "max eigen err " + num(worst_eig) + ", max solve err " + num(worst_solve));
}

}  // namespace

int main() {
  std::printf("gldual acceptance suite\n");
  std::vector<Instance> insts = run_instances();
  criterion_1(insts);
  criterion_2(insts);
  criterion_3(insts);
  criterion_4(insts);
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
