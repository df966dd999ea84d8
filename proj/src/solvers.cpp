#include "gldual/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "gldual/kernels.hpp"
#include "gldual/rng.hpp"

namespace gldual {

void SolveOptions::validate() const {
  if (max_iterations < 0) throw ConfigError("SolveOptions: max_iterations < 0");
  if (tolerance < 0.0) throw ConfigError("SolveOptions: tolerance < 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw ConfigError("SolveOptions: backtrack_factor must be in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    throw ConfigError("SolveOptions: sufficient_decrease must be in (0, 1)");
}

namespace {

double edot(const std::vector<double>& a, const std::vector<double>& b) {
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double enorm(const std::vector<double>& a) { return std::sqrt(edot(a, a)); }

}  // namespace

ScalarField solve_spd(const EllipticOperator& A, const ScalarField& rhs,
                      const SolveOptions& opts) {
  opts.validate();
  if (rhs.size() != A.grid()->size())
    throw ShapeError("solve_spd: rhs does not match operator grid");
  const std::size_t m = rhs.size();
  const double tol = opts.tolerance > 0.0 ? opts.tolerance : 1e-12;
  const int maxit = opts.max_iterations > 0
                        ? opts.max_iterations
                        : static_cast<int>(20 * m + 200);
  const auto& k = kernels::active();

  ScalarField x = ScalarField::zeros(rhs.grid);
  const double bn = enorm(rhs.values);
  if (bn == 0.0) return x;

  std::vector<double> r = rhs.values;
  std::vector<double> p = r;
  std::vector<double> ap(m, 0.0);
  double rs = edot(r, r);

  for (int it = 0; it < maxit; ++it) {
    A.apply(p.data(), ap.data());
    const double pap = kernels::active().dot(p.data(), ap.data(), m);
    if (!(pap > 0.0))
      throw SolveError("solve_spd: non-positive curvature direction, operator is not SPD");
    const double alpha = rs / pap;
    k.axpy(alpha, p.data(), x.data(), m);
    k.axpy(-alpha, ap.data(), r.data(), m);
    const double rs_new = edot(r, r);
    if (std::sqrt(rs_new) <= tol * bn) {
      // recurrence can drift; confirm against the true residual
      A.apply(x.data(), ap.data());
      std::vector<double> tr = rhs.values;
      k.axpy(-1.0, ap.data(), tr.data(), m);
      const double tn = enorm(tr);
      if (tn <= 4.0 * tol * bn) return x;
      r = tr;
      rs = edot(r, r);
      p = r;
      continue;
    }
    const double beta = rs_new / rs;
    for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
    rs = rs_new;
  }
  throw SolveError("solve_spd: no convergence in " + std::to_string(maxit) +
                   " iterations");
}

// ---------------------------------------------------------------------------
// smallest eigenvalue: Lanczos, full reorthogonalization, Sturm bisection on
// the tridiagonal section
// ---------------------------------------------------------------------------

namespace {

// eigenvalues of the symmetric tridiagonal (a, b) strictly below x
int sturm_count(const std::vector<double>& a, const std::vector<double>& b,
                double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double off = (i > 0) ? b[i - 1] * b[i - 1] : 0.0;
    d = a[i] - x - off / d;
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

double tridiag_min_eig(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double lo = a[0], hi = a[0];
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = ((i > 0) ? std::fabs(b[i - 1]) : 0.0) +
                     ((i < b.size()) ? std::fabs(b[i]) : 0.0);
    lo = std::min(lo, a[i] - r);
    hi = std::max(hi, a[i] + r);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(a, b, mid) >= 1) hi = mid; else lo = mid;
    if (hi - lo <= 1e-16 * (1.0 + std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double min_eigenvalue(const EllipticOperator& A, const SolveOptions& opts) {
  opts.validate();
  const std::size_t m = A.grid()->size();
  const double tol = opts.tolerance > 0.0 ? opts.tolerance : 1e-10;
  const int kmax = opts.max_iterations > 0
                       ? std::min<std::size_t>(opts.max_iterations, m)
                       : std::min<std::size_t>(m, 400);
  const double scale =
      std::max(std::fabs(A.spectral_lower_bound()), A.spectral_upper_bound());
  const auto& kr = kernels::active();

  for (std::uint64_t restart = 0; restart < 3; ++restart) {
    Rng rng(opts.seed + restart);
    std::vector<std::vector<double>> V;
    std::vector<double> alpha, beta;
    std::vector<double> v(m), w(m);
    for (auto& x : v) x = rng.normal();
    {
      const double n0 = enorm(v);
      kr.scal(1.0 / n0, v.data(), m);
    }
    V.push_back(v);

    double theta_prev = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;

    for (int j = 0; j < kmax; ++j) {
      A.apply(V[j].data(), w.data());
      if (j > 0) kr.axpy(-beta[j - 1], V[j - 1].data(), w.data(), m);
      const double a_j = kernels::active().dot(w.data(), V[j].data(), m);
      kr.axpy(-a_j, V[j].data(), w.data(), m);
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : V) {
          const double c = kernels::active().dot(w.data(), q.data(), m);
          kr.axpy(-c, q.data(), w.data(), m);
        }
      alpha.push_back(a_j);

      const double theta = tridiag_min_eig(alpha, beta);
      if (j >= 5 && std::fabs(theta - theta_prev) <= tol * (1.0 + std::fabs(theta)))
        ++stable;
      else
        stable = 0;
      theta_prev = theta;
      if (stable >= 3) return theta;

      const double b_j = enorm(w);
      if (b_j <= 1e-13 * (1.0 + scale)) return theta;  // invariant subspace
      if (static_cast<std::size_t>(j + 1) == m) return theta;  // full space, exact
      if (j + 1 == kmax) break;
      beta.push_back(b_j);
      std::vector<double> vn = w;
      kr.scal(1.0 / b_j, vn.data(), m);
      V.push_back(std::move(vn));
    }
  }
  throw SolveError("min_eigenvalue: Lanczos did not converge");
}

// ---------------------------------------------------------------------------
// primal Newton with Levenberg damping
// ---------------------------------------------------------------------------

std::pair<ScalarField, SolveReport> newton_primal(const ModelParams& p,
                                                  ScalarField u,
                                                  const SolveOptions& opts) {
  opts.validate();
  p.validate();
  require_same_grid(p.f, u, "newton_primal");
  const double tol = opts.tolerance > 0.0 ? opts.tolerance : 1e-11;
  const int maxit = opts.max_iterations > 0 ? opts.max_iterations : 100;

  SolveReport rep;
  rep.seed = opts.seed;

  SolveOptions cg;
  cg.tolerance = 1e-12;

  ScalarField grad = primal_gradient(p, u);
  double gn = l2_norm(grad);
  rep.history.push_back(gn);
  double shift = 0.0;

  while (gn > tol) {
    if (rep.iterations >= maxit) {
      rep.converged = false;
      rep.residual = gn;
      rep.objective = eval_J(p, u);
      return {std::move(u), rep};
    }
    EllipticOperator h = primal_hessian(p, u);
    bool stepped = false;
    for (int escalation = 0; escalation < 40 && !stepped; ++escalation) {
      ScalarField d;
      try {
        const EllipticOperator hs = (shift > 0.0) ? h.shifted(shift) : h;
        d = solve_spd(hs, scaled(grad, -1.0), cg);
      } catch (const SolveError&) {
        const double lo = h.spectral_lower_bound();
        shift = (shift == 0.0) ? std::max(1e-6, -1.5 * lo + 1e-6) : 4.0 * shift;
        continue;
      }
      // backtracking on the gradient norm
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        ScalarField cand = add_scaled(u, t, d);
        ScalarField cgrad = primal_gradient(p, cand);
        const double cgn = l2_norm(cgrad);
        if (cgn <= (1.0 - opts.sufficient_decrease * t) * gn) {
          u = std::move(cand);
          grad = std::move(cgrad);
          gn = cgn;
          stepped = true;
          break;
        }
        t *= opts.backtrack_factor;
      }
      if (!stepped) shift = std::max(1e-6, 8.0 * shift);
    }
    if (!stepped) {
      rep.converged = false;
      rep.residual = gn;
      rep.objective = eval_J(p, u);
      return {std::move(u), rep};
    }
    shift *= 0.25;
    if (shift < 1e-12) shift = 0.0;
    ++rep.iterations;
    rep.history.push_back(gn);
  }

  rep.converged = true;
  rep.residual = gn;
  rep.objective = eval_J(p, u);
  return {std::move(u), rep};
}

// ---------------------------------------------------------------------------
// projected gradient on the reduced dual over the C* box
// ---------------------------------------------------------------------------

std::pair<DualPair, SolveReport> solve_dual(const ModelParams& p,
                                            ScalarField v1,
                                            const SolveOptions& opts) {
  opts.validate();
  p.validate();
  require_same_grid(p.f, v1, "solve_dual");
  const double tol = opts.tolerance > 0.0 ? opts.tolerance : 1e-9;
  const int maxit = opts.max_iterations > 0 ? opts.max_iterations : 500;
  const auto& k = kernels::active();
  const std::size_t m = v1.size();
  const double box = p.K2;

  if (opts.project)
    k.clamp_box(v1.data(), -box, box, m);
  else if (sup_norm(v1) > box)
    throw ConfigError("solve_dual: v1_init outside the C* box");

  SolveReport rep;
  rep.seed = opts.seed;

  J1Eval e = eval_J1_star_with_gradient(p, v1);
  double step = 1.0;
  ScalarField s_prev, y_prev;
  bool have_bb = false;

  for (int it = 0; it <= maxit; ++it) {
    // projected-gradient residual at unit step
    ScalarField probe = add_scaled(v1, -1.0, e.gradient);
    k.clamp_box(probe.data(), -box, box, m);
    ScalarField pg = add_scaled(v1, -1.0, probe);
    const double pgn = l2_norm(pg);
    rep.history.push_back(pgn);
    rep.objective_history.push_back(e.value);
    if (pgn <= tol) {
      rep.converged = true;
      rep.iterations = it;
      rep.residual = pgn;
      rep.objective = e.value;
      DualPair pair{std::move(v1), std::move(e.v0)};
      return {std::move(pair), rep};
    }
    if (it == maxit) break;

    if (have_bb) {
      const double ss = inner(s_prev, s_prev);
      const double sy = inner(s_prev, y_prev);
      step = (sy > 0.0) ? std::clamp(ss / sy, 1e-8, 1e8) : 1.0;
    }

    double t = step;
    bool accepted = false;
    ScalarField cand;
    for (int ls = 0; ls < 50; ++ls) {
      cand = add_scaled(v1, -t, e.gradient);
      k.clamp_box(cand.data(), -box, box, m);
      ScalarField diff = add_scaled(cand, -1.0, v1);
      const double dn2 = inner(diff, diff);
      if (dn2 == 0.0) break;
      const double jc = eval_J1_star(p, cand);
      if (jc <= e.value - (opts.sufficient_decrease / t) * dn2) {
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) {
      rep.converged = false;
      rep.iterations = it;
      rep.residual = pgn;
      rep.objective = e.value;
      DualPair pair{v1, v0_of_v1(p, v1)};
      return {std::move(pair), rep};
    }

    J1Eval e_new = eval_J1_star_with_gradient(p, cand);
    s_prev = add_scaled(cand, -1.0, v1);
    y_prev = add_scaled(e_new.gradient, -1.0, e.gradient);
    have_bb = true;
    v1 = std::move(cand);
    e = std::move(e_new);
  }

  rep.converged = false;
  rep.iterations = maxit;
  rep.residual = rep.history.empty() ? 0.0 : rep.history.back();
  rep.objective = e.value;
  DualPair pair{std::move(v1), std::move(e.v0)};
  return {std::move(pair), rep};
}

// ---------------------------------------------------------------------------
// desk-scale brute force
// ---------------------------------------------------------------------------

namespace {

// central finite differences of the energy; deliberately avoids the analytic
// gradient so this path stays independent of it
std::vector<double> fd_energy_gradient(
    const std::function<double(const std::vector<double>&)>& J,
    std::vector<double> x) {
  std::vector<double> g(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eps = 1e-6 * (1.0 + std::fabs(x[i]));
    const double keep = x[i];
    x[i] = keep + eps;
    const double jp = J(x);
    x[i] = keep - eps;
    const double jm = J(x);
    x[i] = keep;
    g[i] = (jp - jm) / (2.0 * eps);
  }
  return g;
}

double descend(const std::function<double(const std::vector<double>&)>& J,
               std::vector<double>& x) {
  double jx = J(x);
  for (int it = 0; it < 3000; ++it) {
    std::vector<double> g = fd_energy_gradient(J, x);
    const double gn = enorm(g);
    if (gn <= 1e-8) break;
    double t = 1.0 / (1.0 + gn);
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::vector<double> cand = x;
      for (std::size_t i = 0; i < x.size(); ++i) cand[i] -= t * g[i];
      const double jc = J(cand);
      if (jc <= jx - 1e-4 * t * gn * gn) {
        x = std::move(cand);
        jx = jc;
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;
  }
  return jx;
}

}  // namespace

BruteForceResult brute_force_min(const ModelParams& p,
                                 const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const GridPtr& g = p.grid();
  const std::size_t m = g->size();
  if (m > 6)
    throw ConfigError(
        "brute_force_min: grid has more than 6 interior nodes; the oracle is "
        "desk-scale only");

  auto J = [&](const std::vector<double>& x) {
    return eval_J(p, ScalarField(g, x));
  };

  const int starts = std::max(opts.multistart, 200);
  const double span = 2.0 * std::sqrt(p.beta);
  Rng rng(opts.seed);

  BruteForceResult best;
  best.seed = opts.seed;
  best.starts = starts;
  best.value = std::numeric_limits<double>::infinity();

  auto consider = [&](std::vector<double> x) {
    const double v = descend(J, x);
    if (v < best.value) {
      best.value = v;
      best.u = ScalarField(g, std::move(x));
    }
  };

  for (int s = 0; s < starts; ++s) {
    std::vector<double> x(m);
    for (auto& xi : x) xi = rng.uniform(-span, span);
    consider(std::move(x));
  }
  // cross-checks: canonical candidates (flat states and the well floor)
  const double root = std::sqrt(p.beta);
  for (double c : {0.0, root, -root}) consider(std::vector<double>(m, c));

  return best;
}

}  // namespace gldual
