// Command-line front end: configuration-driven primal/dual solves, duality
// verification, parameter sweeps and the desk-scale oracle comparison.
//
// Exit codes (stable contract):
//   0  success / all applicable checks pass
//   1  configuration error
//   2  solver non-convergence or numerical failure
//   3  verification did not pass (duality hypotheses unmet or a check failed)

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gldual/config.hpp"
#include "gldual/dual.hpp"
#include "gldual/kernels.hpp"
#include "gldual/model.hpp"
#include "gldual/solvers.hpp"
#include "gldual/svg.hpp"
#include "gldual/verify.hpp"

namespace fs = std::filesystem;
using namespace gldual;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file " + path.string());
  os << text;
}

std::string config_echo(const ExperimentConfig& cfg) {
  return "# resolved configuration\n" + serialize_config(cfg);
}

const char* kSummaryHeader =
    "gamma,alpha,beta,K,K2,dim,n,seed,J_primal,J_dual,gap_abs,gap_rel,"
    "in_A_plus_strict,in_B_star,in_C_star,u_tilde_proxy,lambda_zero_branch,"
    "primal_iters,dual_iters\n";

std::string summary_row(const ExperimentConfig& cfg, const DualityReport& r,
                        int primal_iters, int dual_iters) {
  std::ostringstream os;
  os << fmt17(cfg.gamma) << ',' << fmt17(cfg.alpha) << ',' << fmt17(cfg.beta)
     << ',' << fmt17(cfg.resolved_K()) << ',' << fmt17(cfg.resolved_K2()) << ','
     << cfg.domain.dimension << ',' << cfg.domain.nodes_per_axis << ','
     << cfg.seed << ',' << fmt17(r.J_primal) << ',' << fmt17(r.J_star) << ','
     << fmt17(r.gap_abs) << ',' << fmt17(r.gap_rel) << ','
     << (r.a_plus.member_strict ? 1 : 0) << ',' << (r.b_star.member ? 1 : 0)
     << ',' << (r.c_star.member ? 1 : 0) << ',' << (r.u_tilde_proxy ? 1 : 0)
     << ',' << (r.branch.lambda_is_zero ? 1 : 0) << ',' << primal_iters << ','
     << dual_iters << '\n';
  return os.str();
}

struct VerifyOutcome {
  DualityReport report;
  SolveReport primal;
  int dual_iters = -1;  // -1 = dual solve not run (hypotheses unmet)
  bool primal_converged = false;
};

// primal solve -> stationary dual pair -> full report; the shared pipeline
// behind verify, sweep and oracle-compare
VerifyOutcome run_verification(const ExperimentConfig& cfg) {
  VerifyOutcome out;
  GridPtr g = build_grid(cfg);
  ModelParams p = build_params(cfg, g);
  SolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;

  auto [u0, prep] = newton_primal(p, ScalarField::zeros(g), opts);
  out.primal = prep;
  out.primal_converged = prep.converged;
  if (!prep.converged) return out;

  out.report = duality_gap(p, u0);
  if (out.report.hypotheses_met) {
    DualPair pair = dual_pair_from_primal(p, u0);
    SolveOptions dopts = opts;
    dopts.project = true;
    auto [dp, drep] = solve_dual(p, std::move(pair.v1), dopts);
    out.dual_iters = drep.converged ? drep.iterations : -2;  // -2 = failed
  }
  return out;
}

int cmd_solve_primal(const ExperimentConfig& cfg) {
  GridPtr g = build_grid(cfg);
  ModelParams p = build_params(cfg, g);
  SolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  auto [u0, rep] = newton_primal(p, ScalarField::zeros(g), opts);

  const fs::path out(cfg.out_dir);
  write_field((out / "u0.txt").string(), u0);
  std::ostringstream os;
  os << config_echo(cfg) << "\n# primal solve\n";
  os << "converged = " << (rep.converged ? 1 : 0) << "\n";
  os << "iterations = " << rep.iterations << "\n";
  os << "gradient_norm = " << fmt17(rep.residual) << "\n";
  os << "J = " << fmt17(rep.objective) << "\n";
  os << "seed = " << cfg.seed << "\n";
  write_text(out / "primal_report.txt", os.str());
  if (!rep.converged) {
    std::cerr << "solve-primal: no convergence in " << rep.iterations
              << " iterations (gradient norm " << rep.residual << ")\n";
    return 2;
  }
  std::cout << "solve-primal: J = " << fmt17(rep.objective) << " after "
            << rep.iterations << " iterations\n";
  return 0;
}

int cmd_solve_dual(const ExperimentConfig& cfg) {
  GridPtr g = build_grid(cfg);
  ModelParams p = build_params(cfg, g);
  SolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  auto [pair, rep] = solve_dual(p, ScalarField::zeros(g), opts);

  const fs::path out(cfg.out_dir);
  write_field((out / "v1.txt").string(), pair.v1);
  write_field((out / "v0.txt").string(), pair.v0);
  std::ostringstream os;
  os << config_echo(cfg) << "\n# dual solve\n";
  os << "converged = " << (rep.converged ? 1 : 0) << "\n";
  os << "iterations = " << rep.iterations << "\n";
  os << "projected_gradient_norm = " << fmt17(rep.residual) << "\n";
  os << "J1_star = " << fmt17(rep.objective) << "\n";
  os << "seed = " << cfg.seed << "\n";
  write_text(out / "dual_report.txt", os.str());
  if (!rep.converged) {
    std::cerr << "solve-dual: no convergence in " << rep.iterations
              << " iterations\n";
    return 2;
  }
  std::cout << "solve-dual: J1* = " << fmt17(rep.objective) << " after "
            << rep.iterations << " iterations\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
  GridPtr g = build_grid(cfg);
  ModelParams p = build_params(cfg, g);
  SolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;

  auto [u0, prep] = newton_primal(p, ScalarField::zeros(g), opts);
  const fs::path out(cfg.out_dir);
  write_field((out / "u0.txt").string(), u0);
  if (!prep.converged) {
    write_text(out / "duality_report.txt",
               config_echo(cfg) + "\nprimal_converged = 0\n");
    std::cerr << "verify: primal solve did not converge\n";
    return 2;
  }

  DualityReport r = duality_gap(p, u0);
  DualPair pair = dual_pair_from_primal(p, u0);
  write_field((out / "v1.txt").string(), pair.v1);
  write_field((out / "v0.txt").string(), pair.v0);

  int dual_iters = -1;
  if (r.hypotheses_met) {
    auto [dp, drep] = solve_dual(p, std::move(pair.v1), opts);
    dual_iters = drep.converged ? drep.iterations : -2;
  }

  write_text(out / "duality_report.txt",
             config_echo(cfg) + "\nprimal_converged = 1\n" + to_kv_text(r));
  {
    std::ofstream os(out / "duality_report.csv");
    write_identity_csv(os, r);
  }
  write_text(out / "summary.csv",
             std::string(kSummaryHeader) +
                 summary_row(cfg, r, prep.iterations, dual_iters));

  if (r.pass) {
    std::cout << "verify: PASS  gap_rel = " << fmt17(r.gap_rel) << "\n";
    return 0;
  }
  std::cerr << "verify: " << (r.hypotheses_met
                                  ? "hypotheses met but a check failed"
                                  : "duality hypotheses unmet")
            << " (see " << (out / "duality_report.txt").string() << ")\n";
  return 3;
}

int cmd_sweep(const ExperimentConfig& base, const std::string& plot_path) {
  if (base.sweep.empty()) {
    std::cerr << "sweep: no [sweep] axes in config\n";
    return 1;
  }
  const auto& axes = base.sweep.axes;
  const std::size_t cells = base.sweep.cells();
  if (cells == 0) {
    std::cerr << "sweep: empty sweep\n";
    return 1;
  }

  auto cell_config = [&](std::size_t idx) {
    ExperimentConfig cfg = base;
    cfg.sweep.axes.clear();
    std::size_t rest = idx;
    // odometer, last axis fastest
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& [key, vals] = axes[a];
      const double v = vals[rest % vals.size()];
      rest /= vals.size();
      if (key == "gamma") cfg.gamma = v;
      else if (key == "alpha") cfg.alpha = v;
      else if (key == "beta") cfg.beta = v;
      else if (key == "K") cfg.K = v;
      else if (key == "K2") cfg.K2 = v;
      else if (key == "n") cfg.domain.nodes_per_axis = static_cast<int>(v);
    }
    return cfg;
  };

  struct Cell {
    std::string row;
    bool solver_failed = false;
    double x = 0.0;       // first axis value
    double gap_rel = 0.0;
    bool have_gap = false;
    std::string group;    // remaining axis values, for plot series
  };
  std::vector<Cell> rows(cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells) return;
      ExperimentConfig cfg = cell_config(i);
      Cell& cell = rows[i];
      try {
        VerifyOutcome v = run_verification(cfg);
        if (!v.primal_converged) {
          cell.solver_failed = true;
          DualityReport blank;
          cell.row = summary_row(cfg, blank, v.primal.iterations, -2);
        } else {
          cell.row = summary_row(cfg, v.report, v.primal.iterations, v.dual_iters);
          cell.gap_rel = v.report.gap_rel;
          cell.have_gap = v.report.hypotheses_met;
        }
      } catch (const std::exception& e) {
        cell.solver_failed = true;
        cell.row = "# cell " + std::to_string(i) + " failed: " + e.what() + "\n";
      }
      // plot coordinates
      std::size_t rest = i;
      std::string group;
      for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& [key, vals] = axes[a];
        const double val = vals[rest % vals.size()];
        rest /= vals.size();
        if (a == 0) cell.x = val;
        else group += key + "=" + fmt17(val) + " ";
      }
      cell.group = group;
    }
  };

  const int nworkers = std::max(1, base.workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const fs::path out(base.out_dir);
  {
    std::ofstream os(out / "sweep.csv");
    os << kSummaryHeader;
    for (const auto& c : rows) os << c.row;
  }
  write_text(out / "resolved_config.txt", config_echo(base));

  if (!plot_path.empty()) {
    // log10 of the relative gap against the first swept axis, one series per
    // combination of the remaining axes
    std::vector<PlotSeries> series;
    for (const auto& c : rows) {
      if (!c.have_gap) continue;
      const double y = std::log10(std::max(c.gap_rel, 1e-17));
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const PlotSeries& s) { return s.label == c.group; });
      if (it == series.end()) {
        series.push_back({c.group, {}});
        it = series.end() - 1;
      }
      it->points.emplace_back(c.x, y);
    }
    for (auto& s : series)
      std::sort(s.points.begin(), s.points.end());
    write_line_plot((out / plot_path).string(), "relative duality gap",
                    axes.front().first, "log10(gap_rel)", series);
  }

  bool any_failed = false;
  for (const auto& c : rows) any_failed = any_failed || c.solver_failed;
  std::cout << "sweep: " << cells << " cells -> "
            << (out / "sweep.csv").string() << "\n";
  if (any_failed) {
    std::cerr << "sweep: some cells failed to converge\n";
    return 2;
  }
  return 0;
}

int cmd_oracle_compare(const ExperimentConfig& cfg) {
  GridPtr g = build_grid(cfg);
  if (g->size() > 6) {
    std::cerr << "oracle-compare: grid has " << g->size()
              << " interior nodes; the oracle allows at most 6\n";
    return 1;
  }
  ModelParams p = build_params(cfg, g);
  SolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;

  auto [u0, prep] = newton_primal(p, ScalarField::zeros(g), opts);
  if (!prep.converged) {
    std::cerr << "oracle-compare: primal solve did not converge\n";
    return 2;
  }
  DualityReport r = duality_gap(p, u0);
  BruteForceResult oracle = brute_force_min(p, opts);

  const fs::path out(cfg.out_dir);
  std::ostringstream os;
  os << config_echo(cfg) << "\n# oracle comparison\n";
  os << "oracle_value = " << fmt17(oracle.value) << "\n";
  os << "oracle_starts = " << oracle.starts << "\n";
  os << "J_primal = " << fmt17(r.J_primal) << "\n";
  os << "J1_star = " << fmt17(r.J1_star) << "\n";
  os << "oracle_vs_primal = " << fmt17(std::fabs(oracle.value - r.J_primal)) << "\n";
  os << "oracle_vs_J1_star = " << fmt17(std::fabs(oracle.value - r.J1_star)) << "\n";
  os << "hypotheses_met = " << (r.hypotheses_met ? 1 : 0) << "\n";
  os << "seed = " << cfg.seed << "\n";
  write_text(out / "oracle_report.txt", os.str());
  write_field((out / "u_oracle.txt").string(), oracle.u);

  std::cout << "oracle-compare: |oracle - J1*| = "
            << fmt17(std::fabs(oracle.value - r.J1_star)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gldual: primal/dual solves of a double-well energy and machine "
               "verification of the zero-gap duality identities"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  int workers_override = 0;
  std::string plot_path;

  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_override, "output directory (overrides [run] out)");
  app.add_option("--seed", seed_override, "seed (overrides [run] seed)");
  app.add_option("--workers", workers_override, "sweep workers (overrides [run] workers)");

  CLI::App* sp = app.add_subcommand("solve-primal", "Newton solve of the primal energy");
  CLI::App* sd = app.add_subcommand("solve-dual", "projected-gradient solve of the reduced dual");
  CLI::App* vf = app.add_subcommand("verify", "solve, build the dual pair, check every duality identity");
  CLI::App* sw = app.add_subcommand("sweep", "Cartesian parameter sweep with one CSV row per cell");
  sw->add_option("--plot", plot_path, "write an SVG line plot of the gap");
  CLI::App* oc = app.add_subcommand("oracle-compare", "brute-force ground truth on a tiny grid");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (workers_override > 0) cfg.workers = workers_override;

    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "resolved_config.txt", config_echo(cfg));

    if (sp->parsed()) return cmd_solve_primal(cfg);
    if (sd->parsed()) return cmd_solve_dual(cfg);
    if (vf->parsed()) return cmd_verify(cfg);
    if (sw->parsed()) return cmd_sweep(cfg, plot_path);
    if (oc->parsed()) return cmd_oracle_compare(cfg);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
