#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gldual/model.hpp"
#include "gldual/solvers.hpp"

namespace gldual {

// Closed catalog of source terms, so configs stay declarative:
//   zero                          f = 0
//   constant                      f = value
//   sine                          f = amplitude * prod_axes sin(mode*pi*x/L)
//   bump                          f = amplitude * exp(-sum ((x-c)/width)^2),
//                                 centered in the domain
//   polynomial                    f = sum_j coeffs[j] * x^j  (first axis)
//   file                          one real per line, row-major interior nodes
struct SourceSpec {
  enum class Kind { Zero, Constant, Sine, Bump, Polynomial, File };
  Kind kind = Kind::Zero;
  double value = 0.0;      // constant
  double amplitude = 1.0;  // sine, bump
  int mode = 1;            // sine
  double width = 0.0;      // bump; 0 = extent/8
  std::vector<double> coeffs;  // polynomial
  std::string path;            // file
};

struct SweepSpec {
  // keys limited to: gamma, alpha, beta, K, K2, n
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  bool empty() const { return axes.empty(); }
  std::size_t cells() const;
};

struct ExperimentConfig {
  DomainSpec domain;
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<double> K;   // default 8*alpha*beta
  std::optional<double> K2;  // default 0.99*sqrt(K^3/(32*alpha))
  SourceSpec source;
  SolveOptions solver;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 1;
  std::string plot;  // optional SVG path for sweeps
  SweepSpec sweep;

  double resolved_K() const;
  double resolved_K2() const;
  void validate() const;
};

// Flat key-value sections:
//   [domain] dimension, extent, n
//   [model]  gamma, alpha, beta, K, K2
//   [source] kind, value, amplitude, mode, width, coeffs, path
//   [solver] max_iterations, tolerance, backtrack_factor,
//            sufficient_decrease, multistart
//   [run]    seed, out, workers, plot
//   [sweep]  gamma / alpha / beta / K / K2 / n = space-separated values
// '#' starts a comment. Unknown sections or keys are rejected.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical form: fixed order, resolved K/K2, 17 significant digits.
// Idempotent under parse -> serialize.
std::string serialize_config(const ExperimentConfig& cfg);

// instantiate the source term on a grid
ScalarField build_source(const SourceSpec& src, const GridPtr& g);

// grid + params from a config (validates everything)
GridPtr build_grid(const ExperimentConfig& cfg);
ModelParams build_params(const ExperimentConfig& cfg, const GridPtr& g);

// field files: one real per line, row-major, 17 significant digits
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path, const GridPtr& g);

}  // namespace gldual
