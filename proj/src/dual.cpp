#include "gldual/dual.hpp"

#include <cmath>
#include <string>

#include "gldual/kernels.hpp"
#include "gldual/solvers.hpp"

namespace gldual {

SetCheck check_B_star(const ModelParams& p, const ScalarField& v0,
                      double tol) {
  double vmax = v0[0];
  for (double x : v0.values) vmax = std::max(vmax, x);
  SetCheck c;
  c.margin = 0.25 * p.K - vmax;
  c.member = vmax < 0.25 * p.K - tol;
  return c;
}

SetCheck check_C_star(const ModelParams& p, const ScalarField& v1) {
  p.validate();  // K2 may have been edited after construction
  SetCheck c;
  const double s = sup_norm(v1);
  c.margin = p.K2 - s;
  c.member = s <= p.K2;
  return c;
}

namespace {

void require_B_star(const ModelParams& p, const ScalarField& v0,
                    const char* who) {
  if (!check_B_star(p, v0, 0.0).member)
    throw DomainError(std::string(who) +
                      ": v0 not in B* (some node has v0 >= K/4), closed form invalid");
}

}  // namespace

double eval_G_star(const ModelParams& p, const ScalarField& v1,
                   const ScalarField& v0) {
  require_same_grid(v1, v0, "eval_G_star");
  require_B_star(p, v0, "eval_G_star");
  const auto& k = kernels::active();
  const double w = v1.grid->weight();
  const double quad = k.ratio_quad_sum(v1.data(), v0.data(), p.K, v1.size());
  const double v0sq = k.dot(v0.data(), v0.data(), v0.size());
  const double v0sum = k.sum(v0.data(), v0.size());
  return -0.5 * w * quad - 0.5 / p.alpha * w * v0sq - p.beta * w * v0sum;
}

double eval_F_star(const ModelParams& p, const ScalarField& v1) {
  require_same_grid(v1, p.f, "eval_F_star");
  EllipticOperator a = laplacian(v1.grid, p.gamma, p.K);
  ScalarField rhs = add_scaled(v1, 1.0, p.f);
  ScalarField w = solve_spd(a, rhs);
  return 0.5 * inner(rhs, w);
}

double eval_J_star(const ModelParams& p, const DualPair& pair) {
  return -eval_F_star(p, pair.v1) + eval_G_star(p, pair.v1, pair.v0);
}

namespace {

struct NodeRoot {
  double t;
  double residual;
};

// g(t) = s/(2t-K)^2 - t/alpha - beta on t < K/4, strictly decreasing there
// whenever 4 s / |2t-K|^3 < 1/alpha (guaranteed for s <= K2^2).
NodeRoot solve_inner_node(double s, double alpha, double beta, double K) {
  const double eps = 1e-12 * K;
  const double t_hi = 0.25 * K - eps;
  auto g = [&](double t) {
    const double den = 2.0 * t - K;
    return s / (den * den) - t / alpha - beta;
  };
  auto dg = [&](double t) {
    const double den = 2.0 * t - K;
    return -4.0 * s / (den * den * den) - 1.0 / alpha;
  };

  if (g(t_hi) >= 0.0)
    throw DomainError(
        "v0_of_v1: inner stationarity has no root below K/4 at some node "
        "(v1 outside C*?)");

  // g -> +inf as t -> -inf, so this bracket end exists
  double t_lo = -alpha * (beta + 4.0 * s / (K * K)) - 1.0;
  for (int i = 0; i < 80 && g(t_lo) <= 0.0; ++i) t_lo = 2.0 * t_lo - 1.0;
  if (g(t_lo) <= 0.0)
    throw DomainError("v0_of_v1: failed to bracket the inner root");

  double lo = t_lo, hi = t_hi;
  // decent initial guess: one fixed-point sweep from the s = 0 solution
  double t = alpha * (s / ((2.0 * (-alpha * beta) - K) *
                           (2.0 * (-alpha * beta) - K)) -
                      beta);
  if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);

  double r = g(t);
  for (int it = 0; it < 100; ++it) {
    if (std::fabs(r) <= 1e-13 * (1.0 + std::fabs(t) / alpha + beta)) break;
    if (r > 0.0) lo = t; else hi = t;  // g decreasing
    const double d = dg(t);
    double t_next = (d != 0.0) ? t - r / d : 0.5 * (lo + hi);
    if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
    t = t_next;
    r = g(t);
    if (hi - lo <= 1e-16 * (1.0 + std::fabs(t))) break;
  }
  return {t, g(t)};
}

}  // namespace

ScalarField v0_of_v1(const ModelParams& p, const ScalarField& v1) {
  require_same_grid(v1, p.f, "v0_of_v1");
  ScalarField v0 = ScalarField::zeros(v1.grid);
  // per-node roots are independent; order does not matter
  for (std::size_t i = 0; i < v1.size(); ++i)
    v0[i] = solve_inner_node(v1[i] * v1[i], p.alpha, p.beta, p.K).t;
  return v0;
}

ScalarField inner_stationarity(const ModelParams& p, const ScalarField& v1,
                               const ScalarField& v0) {
  require_same_grid(v1, v0, "inner_stationarity");
  ScalarField r = ScalarField::zeros(v1.grid);
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const double den = 2.0 * v0[i] - p.K;
    r[i] = v1[i] * v1[i] / (den * den) - v0[i] / p.alpha - p.beta;
  }
  return r;
}

double concavity_certificate(const ModelParams& p, const ScalarField& v1,
                             const ScalarField& v0) {
  require_same_grid(v1, v0, "concavity_certificate");
  double worst = -1.0 / p.alpha;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const double den = std::fabs(2.0 * v0[i] - p.K);
    worst = std::max(worst,
                     4.0 * v1[i] * v1[i] / (den * den * den) - 1.0 / p.alpha);
  }
  return worst;
}

double eval_J1_star(const ModelParams& p, const ScalarField& v1) {
  ScalarField v0 = v0_of_v1(p, v1);
  return -eval_F_star(p, v1) + eval_G_star(p, v1, v0);
}

ScalarField grad_G_star_v1(const ModelParams& p, const ScalarField& v1,
                           const ScalarField& v0) {
  require_same_grid(v1, v0, "grad_G_star_v1");
  require_B_star(p, v0, "grad_G_star_v1");
  ScalarField g = ScalarField::zeros(v1.grid);
  kernels::active().neg_ratio(v1.data(), v0.data(), p.K, g.data(), v1.size());
  return g;
}

J1Eval eval_J1_star_with_gradient(const ModelParams& p, const ScalarField& v1) {
  J1Eval out;
  out.v0 = v0_of_v1(p, v1);
  EllipticOperator a = laplacian(v1.grid, p.gamma, p.K);
  ScalarField rhs = add_scaled(v1, 1.0, p.f);
  ScalarField w = solve_spd(a, rhs);
  out.value = -0.5 * inner(rhs, w) + eval_G_star(p, v1, out.v0);
  // envelope: the v0 stationarity term contributes nothing
  out.gradient = grad_G_star_v1(p, v1, out.v0);
  axpy_inplace(-1.0, w, out.gradient);
  return out;
}

ScalarField grad_J1_star(const ModelParams& p, const ScalarField& v1) {
  return eval_J1_star_with_gradient(p, v1).gradient;
}

ScalarField recover_u(const ModelParams& p, const DualPair& pair) {
  require_same_grid(pair.v1, pair.v0, "recover_u");
  require_B_star(p, pair.v0, "recover_u");
  ScalarField u = ScalarField::zeros(pair.v1.grid);
  kernels::active().neg_ratio(pair.v1.data(), pair.v0.data(), p.K, u.data(),
                              u.size());
  return u;
}

BranchReport lambda_branch_check(const ModelParams& p, const ScalarField& u,
                                 double tol) {
  EllipticOperator h = primal_hessian(p, u);
  if (tol < 0.0) tol = 1e-9 * (1.0 + std::fabs(h.spectral_upper_bound()));
  BranchReport r;
  r.tol = tol;
  try {
    r.lambda_min = min_eigenvalue(h);
    r.converged = true;
  } catch (const SolveError&) {
    r.converged = false;
    return r;
  }
  r.lambda_is_zero = r.lambda_min > tol;
  return r;
}

}  // namespace gldual
