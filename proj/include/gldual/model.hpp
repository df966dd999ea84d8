#pragma once

#include "gldual/grid.hpp"

namespace gldual {

// Every scalar constant of the energy plus the source field f. The energy is
//
//   J(u) = gamma/2 <grad u, grad u> + alpha/2 Int (u^2 - beta)^2 - <u, f>
//
// split as J = F - G with an auxiliary K-weighted quadratic in both pieces:
//
//   F(u)   = gamma/2 <grad u, grad u> + K/2 Int u^2 - <u, f>
//   G(u,v) = -alpha/2 Int (u^2 - beta + v)^2 + K/2 Int u^2
//
// K and K2 parameterize the dual feasibility boxes; defaults keep the dual
// pair generated by a well-scale minimizer feasible.
struct ModelParams {
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double K = 8.0;
  double K2 = 3.96;
  ScalarField f;

  static double default_K(double alpha, double beta) { return 8.0 * alpha * beta; }
  // largest K2 with 32 K2^2 / K^3 < 1/alpha, pulled in for strictness
  static double default_K2(double K, double alpha);

  const GridPtr& grid() const { return f.grid; }

  // positivity of all constants and the box-consistency bound
  // 32 K2^2 / K^3 - 1/alpha < 0; throws ConfigError naming the violation
  void validate() const;
};

// constructs params with defaulted K/K2 and a given source
ModelParams make_params(const GridPtr& g, double gamma, double alpha,
                        double beta, ScalarField f);
ModelParams make_params(const GridPtr& g, double gamma, double alpha,
                        double beta);  // f = 0

double eval_J(const ModelParams& p, const ScalarField& u);
double eval_F(const ModelParams& p, const ScalarField& u);
double eval_G(const ModelParams& p, const ScalarField& u, const ScalarField& v);

// L2 gradient of J: -gamma Lap_h u + 2 alpha (u^2 - beta) u - f
ScalarField primal_gradient(const ModelParams& p, const ScalarField& u);

// second variation of J at u: -gamma Lap_h + diag(6 alpha u^2 - 2 alpha beta)
EllipticOperator primal_hessian(const ModelParams& p, const ScalarField& u);

struct MembershipReport {
  double lambda_min = 0.0;  // smallest eigenvalue of the second variation
  double tol = 0.0;
  bool member = false;         // lambda_min >= -tol
  bool member_strict = false;  // lambda_min > tol
  bool converged = false;      // eigenvalue iteration met its contract
};

// Positive-semidefiniteness of the second variation at u (and the strict
// variant). tol < 0 selects the default 1e-9 * (1 + spectral upper bound).
MembershipReport check_A_plus(const ModelParams& p, const ScalarField& u,
                              double tol = -1.0);

}  // namespace gldual
