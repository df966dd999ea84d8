#pragma once

#include "gldual/model.hpp"

namespace gldual {

// A dual candidate (v1, v0). Feasibility lives in the two box checks below:
// B* bounds v0 pointwise below K/4 (keeping the denominator 2 v0 - K below
// -K/2), C* is the sup-norm box ||v1||_inf <= K2.
struct DualPair {
  ScalarField v1;
  ScalarField v0;
};

struct SetCheck {
  bool member = false;
  double margin = 0.0;  // distance to the boundary, negative when outside
};

// v0 in B*  <=>  max(v0) < K/4 - tol
SetCheck check_B_star(const ModelParams& p, const ScalarField& v0,
                      double tol = 0.0);

// v1 in C*  <=>  sup_norm(v1) <= K2; also re-validates the params' box bound
SetCheck check_C_star(const ModelParams& p, const ScalarField& v1);

// G*(v1, v0) = -1/2 Int v1^2/(2 v0 - K) - 1/(2 alpha) Int v0^2 - beta Int v0.
// Requires v0 in B*; throws DomainError otherwise (the closed form needs the
// denominator bounded away from zero).
double eval_G_star(const ModelParams& p, const ScalarField& v1,
                   const ScalarField& v0);

// F*(v1) = 1/2 <v1 + f, w> with (-gamma Lap_h + K) w = v1 + f.
// Valid on the branch where the second variation at the transform's
// stationary field is positive definite (see lambda_branch_check).
double eval_F_star(const ModelParams& p, const ScalarField& v1);

// J*(v1, v0) = -F*(v1) + G*(v1, v0)
double eval_J_star(const ModelParams& p, const DualPair& pair);

// Pointwise maximizer of G* over v0 in B* at fixed v1: the unique t < K/4
// solving s/(2t - K)^2 - t/alpha - beta = 0 with s = v1^2. Safeguarded
// Newton on a sign-change bracket; throws DomainError when no root exists
// below K/4 (possible only for v1 outside C*).
ScalarField v0_of_v1(const ModelParams& p, const ScalarField& v1);

// residual field of the inner stationarity equation, one value per node
ScalarField inner_stationarity(const ModelParams& p, const ScalarField& v1,
                               const ScalarField& v0);

// max over nodes of 4 v1^2 / |2 v0 - K|^3 - 1/alpha; strictly negative on
// B* x C*, which is what makes the inner problem concave
double concavity_certificate(const ModelParams& p, const ScalarField& v1,
                             const ScalarField& v0);

// J1*(v1) = sup over v0 in B* of J*(v1, v0), via v0_of_v1
double eval_J1_star(const ModelParams& p, const ScalarField& v1);

// envelope gradient of J1*: -w - v1/(2 v0 - K), w = (-gamma Lap_h + K)^{-1}(v1 + f)
ScalarField grad_J1_star(const ModelParams& p, const ScalarField& v1);

// value and gradient in one shot (shares the inner solve and the SPD solve)
struct J1Eval {
  double value = 0.0;
  ScalarField gradient;
  ScalarField v0;
};
J1Eval eval_J1_star_with_gradient(const ModelParams& p, const ScalarField& v1);

// partial derivative of G* in v1 at fixed v0: -v1/(2 v0 - K)
ScalarField grad_G_star_v1(const ModelParams& p, const ScalarField& v1,
                           const ScalarField& v0);

// primal recovery u = -v1/(2 v0 - K); requires v0 in B*
ScalarField recover_u(const ModelParams& p, const DualPair& pair);

struct BranchReport {
  double lambda_min = 0.0;  // of -gamma Lap_h + 6 alpha u^2 - 2 alpha beta
  double tol = 0.0;
  bool lambda_is_zero = false;  // multiplier vanishes iff lambda_min > tol
  bool converged = false;
};

// Checks whether the multiplier branch of the F* transform is inactive at u.
// When it is not, the closed form used by eval_F_star is uncertified; the
// report flags this and no attempt is made to solve the multiplier system.
BranchReport lambda_branch_check(const ModelParams& p, const ScalarField& u,
                                 double tol = -1.0);

}  // namespace gldual
