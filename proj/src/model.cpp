#include "gldual/model.hpp"

#include <cmath>
#include <string>

#include "gldual/kernels.hpp"
#include "gldual/solvers.hpp"

namespace gldual {

double ModelParams::default_K2(double K, double alpha) {
  return 0.99 * std::sqrt(K * K * K / (32.0 * alpha));
}

void ModelParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw ConfigError(std::string("ModelParams: ") + name +
                        " must be strictly positive and finite");
  };
  positive(gamma, "gamma");
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(K, "K");
  positive(K2, "K2");
  if (!f.grid) throw ConfigError("ModelParams: source field f is unset");
  f.check_finite("ModelParams: f");
  const double bound = 32.0 * K2 * K2 / (K * K * K) - 1.0 / alpha;
  if (!(bound < 0.0))
    throw ConfigError(
        "ModelParams: box consistency 32*K2^2/K^3 < 1/alpha violated "
        "(32*K2^2/K^3 - 1/alpha = " +
        std::to_string(bound) + ")");
}

ModelParams make_params(const GridPtr& g, double gamma, double alpha,
                        double beta, ScalarField f) {
  ModelParams p;
  p.gamma = gamma;
  p.alpha = alpha;
  p.beta = beta;
  p.K = ModelParams::default_K(alpha, beta);
  p.K2 = ModelParams::default_K2(p.K, alpha);
  p.f = std::move(f);
  if (!p.f.grid) p.f = ScalarField::zeros(g);
  p.validate();
  return p;
}

ModelParams make_params(const GridPtr& g, double gamma, double alpha,
                        double beta) {
  return make_params(g, gamma, alpha, beta, ScalarField::zeros(g));
}

namespace {

// gamma/2 <(-Lap_h) u, u> via one stencil apply with zero diagonal
double gradient_energy(const ModelParams& p, const ScalarField& u) {
  EllipticOperator a0 = laplacian(u.grid, p.gamma, 0.0);
  ScalarField au = a0.apply(u);
  return 0.5 * inner(au, u);
}

void check_shapes(const ModelParams& p, const ScalarField& u, const char* who) {
  require_same_grid(p.f, u, who);
}

}  // namespace

double eval_J(const ModelParams& p, const ScalarField& u) {
  check_shapes(p, u, "eval_J");
  const auto& k = kernels::active();
  const double well = k.well_sum(u.data(), p.beta, u.size());
  return gradient_energy(p, u) +
         0.5 * p.alpha * u.grid->weight() * well - inner(u, p.f);
}

double eval_F(const ModelParams& p, const ScalarField& u) {
  check_shapes(p, u, "eval_F");
  return gradient_energy(p, u) + 0.5 * p.K * inner(u, u) - inner(u, p.f);
}

double eval_G(const ModelParams& p, const ScalarField& u,
              const ScalarField& v) {
  check_shapes(p, u, "eval_G");
  require_same_grid(u, v, "eval_G");
  const auto& k = kernels::active();
  const double shifted = k.well_shift_sum(u.data(), v.data(), p.beta, u.size());
  return -0.5 * p.alpha * u.grid->weight() * shifted + 0.5 * p.K * inner(u, u);
}

ScalarField primal_gradient(const ModelParams& p, const ScalarField& u) {
  check_shapes(p, u, "primal_gradient");
  EllipticOperator a0 = laplacian(u.grid, p.gamma, 0.0);
  ScalarField g = a0.apply(u);  // -gamma Lap_h u
  ScalarField cubic = ScalarField::zeros(u.grid);
  kernels::active().cubic_well(u.data(), p.beta, 2.0 * p.alpha, cubic.data(),
                               u.size());
  axpy_inplace(1.0, cubic, g);
  axpy_inplace(-1.0, p.f, g);
  return g;
}

EllipticOperator primal_hessian(const ModelParams& p, const ScalarField& u) {
  check_shapes(p, u, "primal_hessian");
  ScalarField diag = ScalarField::zeros(u.grid);
  kernels::active().sq_affine(u.data(), 6.0 * p.alpha, -2.0 * p.alpha * p.beta,
                              diag.data(), u.size());
  return EllipticOperator(u.grid, p.gamma, std::move(diag));
}

MembershipReport check_A_plus(const ModelParams& p, const ScalarField& u,
                              double tol) {
  EllipticOperator h = primal_hessian(p, u);
  if (tol < 0.0) tol = 1e-9 * (1.0 + std::fabs(h.spectral_upper_bound()));
  MembershipReport r;
  r.tol = tol;
  try {
    r.lambda_min = min_eigenvalue(h);
    r.converged = true;
  } catch (const SolveError&) {
    // report the failure, never a made-up eigenvalue
    r.converged = false;
    return r;
  }
  r.member = r.lambda_min >= -tol;
  r.member_strict = r.lambda_min > tol;
  return r;
}

}  // namespace gldual
