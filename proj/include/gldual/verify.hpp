#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gldual/dual.hpp"
#include "gldual/model.hpp"

namespace gldual {

// One verified identity: |residual| must stay below tolerance. Identities
// that the duality principle only guarantees under its hypotheses are marked
// not-applicable instead of pass/fail when those hypotheses do not hold.
struct IdentityCheck {
  enum class Status { Pass, Fail, NotApplicable };
  std::string name;
  double value = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  Status status = Status::Fail;
};

struct DualityReport {
  // values
  double J_primal = 0.0;
  double J_star = 0.0;
  double J1_star = 0.0;
  double gap_abs = 0.0;   // |J(u0) - J*(v1, v0)|
  double gap_rel = 0.0;   // gap_abs / (1 + |J(u0)|)
  double gap1_abs = 0.0;  // |J(u0) - J1*(v1)|
  double gap1_rel = 0.0;

  // residuals
  double primal_grad_norm = 0.0;
  double cross_residual = 0.0;   // two expressions for v1, weighted L2
  double recover_linf = 0.0;     // recover_u round trip, sup norm
  double legendre_F_res = 0.0;
  double legendre_G_res = 0.0;
  double dual_grad_norm = 0.0;   // grad_J1_star at v1, weighted L2
  double v0_stationarity_sup = 0.0;
  double certificate = 0.0;      // max 4 v1^2/|2 v0 - K|^3 - 1/alpha, < 0 required

  // hypotheses
  MembershipReport a_plus;  // at u0
  SetCheck b_star;          // of v0
  SetCheck c_star;          // of v1
  bool u_tilde_proxy = false;
  BranchReport branch;      // at u0
  bool hypotheses_met = false;

  bool pass = false;  // hypotheses met and every identity within tolerance
  std::vector<IdentityCheck> checks;
};

// Builds the stationary dual candidate from a primal critical point:
//   v0 = alpha (u0^2 - beta),  v1 = -gamma Lap_h u0 + K u0 - f.
DualPair dual_pair_from_primal(const ModelParams& p, const ScalarField& u0);

// || (-gamma Lap_h u0 + K u0 - f) - (K u0 - 2 v0 u0) ||, which equals the
// primal gradient norm identically
double cross_expression_residual(const ModelParams& p, const ScalarField& u0,
                                 const DualPair& pair);

// residuals of F*(v1) = <u0, v1> - F(u0) and G*(v1, v0) = <u0, v1> - G(u0, 0)
std::pair<double, double> legendre_identities(const ModelParams& p,
                                              const ScalarField& u0,
                                              const DualPair& pair);

// Strict interiority of v1 in the C* box. Stands in for the inf-restriction
// condition defining the admissible primal set, which has no computable
// characterization; when v1 sits strictly inside the box the restricted and
// unrestricted inner problems agree locally.
bool u_tilde_proxy(const ModelParams& p, const ScalarField& v1_hat,
                   double tol = -1.0);

// Full machine check of the duality principle at a primal critical point.
// Always returns a report; pass/fail and applicability live inside.
DualityReport duality_gap(const ModelParams& p, const ScalarField& u0);

struct ProbeReport {
  int points = 0;
  int directions = 0;
  int pairs = 0;
  double min_second_diff = 0.0;      // most negative directional curvature
  double worst_midpoint_gap = 0.0;   // max of J(mid) - (J(a)+J(b))/2
  int failures = 0;                  // inner solves that errored
  bool pass = false;
  std::uint64_t seed = 0;
};

// Second-difference and midpoint convexity sampling of an arbitrary
// functional over the C* box (used directly for negative controls).
ProbeReport probe_convexity(const std::function<double(const ScalarField&)>& fn,
                            const ModelParams& p, const GridPtr& g,
                            std::uint64_t seed, int n_points, int n_dirs,
                            int n_pairs);

// Convexity probe of the reduced dual J1* on C*.
ProbeReport convexity_probe(const ModelParams& p, const GridPtr& g,
                            std::uint64_t seed, int n_points, int n_dirs,
                            int n_pairs = 200);

// flat key = value text block
std::string to_kv_text(const DualityReport& r);
// one CSV row per identity: name,value,residual,tolerance,pass
void write_identity_csv(std::ostream& os, const DualityReport& r);

}  // namespace gldual
