#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gldual/dual.hpp"
#include "gldual/model.hpp"

namespace gldual {

struct SolveOptions {
  int max_iterations = 0;     // 0 = per-solver default
  double tolerance = 0.0;     // 0 = per-solver default
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  bool project = true;        // clamp dual iterates into the C* box
  std::uint64_t seed = 1;
  int multistart = 256;       // brute-force starts

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;   // final convergence metric
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> history;            // residual per accepted iterate
  std::vector<double> objective_history;  // objective per accepted iterate
};

// Conjugate gradients for symmetric positive definite operators.
// Contract: ||A x - rhs||_2 <= tol * ||rhs||_2 (Euclidean). Default
// tol 1e-13, default budget 10*n + 100 iterations. Throws SolveError on
// non-convergence or when a non-SPD direction is detected.
ScalarField solve_spd(const EllipticOperator& A, const ScalarField& rhs,
                      const SolveOptions& opts = {});

// Damped Newton on the primal energy: solves primal_hessian * d = -gradient
// with a Levenberg shift when the Hessian is indefinite, then backtracks on
// the gradient norm. Converged when the weighted L2 norm of the gradient is
// <= tol (default 1e-11).
std::pair<ScalarField, SolveReport> newton_primal(const ModelParams& p,
                                                  ScalarField u_init,
                                                  const SolveOptions& opts = {});

// Projected gradient descent on the convex reduced dual J1* over the box
// ||v1||_inf <= K2, with a Barzilai-Borwein step and monotone Armijo
// backtracking. Converged when the weighted norm of the projected gradient
// step is <= tol (default 1e-9). Returns the pair (v1, v0_of_v1(v1)).
std::pair<DualPair, SolveReport> solve_dual(const ModelParams& p,
                                            ScalarField v1_init,
                                            const SolveOptions& opts = {});

// Smallest eigenvalue of a symmetric elliptic operator by Lanczos with full
// reorthogonalization (exact once the Krylov space fills the grid). Relative
// accuracy 1e-10 by default; throws SolveError on non-convergence.
double min_eigenvalue(const EllipticOperator& A, const SolveOptions& opts = {});

struct BruteForceResult {
  ScalarField u;
  double value = 0.0;
  int starts = 0;
  std::uint64_t seed = 0;
};

// Desk-scale ground truth for the global primal minimum: seeded multistart
// (uniform in [-2 sqrt(beta), 2 sqrt(beta)] per node) finite-difference
// gradient descent plus a small catalog of candidate fields. Independent of
// newton_primal and of the analytic gradient. Grids with more than 6
// interior nodes are rejected.
BruteForceResult brute_force_min(const ModelParams& p,
                                 const SolveOptions& opts = {});

}  // namespace gldual
