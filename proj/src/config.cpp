#include "gldual/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gldual {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse number '" + s + "' for " + where);
  }
}

long parse_long(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse integer '" + s + "' for " + where);
  }
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SourceSpec::Kind parse_kind(const std::string& s) {
  if (s == "zero") return SourceSpec::Kind::Zero;
  if (s == "constant") return SourceSpec::Kind::Constant;
  if (s == "sine") return SourceSpec::Kind::Sine;
  if (s == "bump") return SourceSpec::Kind::Bump;
  if (s == "polynomial") return SourceSpec::Kind::Polynomial;
  if (s == "file") return SourceSpec::Kind::File;
  throw ConfigError("config: unknown source kind '" + s +
                    "' (zero|constant|sine|bump|polynomial|file)");
}

const char* kind_name(SourceSpec::Kind k) {
  switch (k) {
    case SourceSpec::Kind::Zero: return "zero";
    case SourceSpec::Kind::Constant: return "constant";
    case SourceSpec::Kind::Sine: return "sine";
    case SourceSpec::Kind::Bump: return "bump";
    case SourceSpec::Kind::Polynomial: return "polynomial";
    case SourceSpec::Kind::File: return "file";
  }
  return "zero";
}

bool sweep_key_ok(const std::string& k) {
  return k == "gamma" || k == "alpha" || k == "beta" || k == "K" ||
         k == "K2" || k == "n";
}

}  // namespace

std::size_t SweepSpec::cells() const {
  std::size_t n = 1;
  for (const auto& [k, vals] : axes) n *= vals.size();
  return n;
}

double ExperimentConfig::resolved_K() const {
  return K ? *K : ModelParams::default_K(alpha, beta);
}

double ExperimentConfig::resolved_K2() const {
  return K2 ? *K2 : ModelParams::default_K2(resolved_K(), alpha);
}

void ExperimentConfig::validate() const {
  domain.validate();
  solver.validate();
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
  for (const auto& [k, vals] : sweep.axes) {
    if (!sweep_key_ok(k))
      throw ConfigError("config: sweep key '" + k +
                        "' not one of gamma|alpha|beta|K|K2|n");
    if (vals.empty()) throw ConfigError("config: empty sweep list for " + k);
    if (k == "n")
      for (double v : vals)
        if (v < 3.0 || v != std::floor(v))
          throw ConfigError("config: sweep n values must be integers >= 3");
  }
  // model invariants checked when params are built (needs the grid for f)
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  bool extent_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: bad section header at line " +
                          std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "model" && section != "source" &&
          section != "solver" && section != "run" && section != "sweep")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string where = section + "." + key;

    if (section == "domain") {
      if (key == "dimension") cfg.domain.dimension = static_cast<int>(parse_long(val, where));
      else if (key == "extent") {
        const auto toks = split_ws(val);
        if (toks.empty() || toks.size() > 2)
          throw ConfigError("config: extent takes 1 or 2 values");
        cfg.domain.extent[0] = parse_double(toks[0], where);
        cfg.domain.extent[1] = toks.size() == 2 ? parse_double(toks[1], where)
                                                : cfg.domain.extent[0];
        extent_seen = true;
      } else if (key == "n") cfg.domain.nodes_per_axis = static_cast<int>(parse_long(val, where));
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "model") {
      if (key == "gamma") cfg.gamma = parse_double(val, where);
      else if (key == "alpha") cfg.alpha = parse_double(val, where);
      else if (key == "beta") cfg.beta = parse_double(val, where);
      else if (key == "K") cfg.K = parse_double(val, where);
      else if (key == "K2") cfg.K2 = parse_double(val, where);
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "source") {
      if (key == "kind") cfg.source.kind = parse_kind(val);
      else if (key == "value") cfg.source.value = parse_double(val, where);
      else if (key == "amplitude") cfg.source.amplitude = parse_double(val, where);
      else if (key == "mode") cfg.source.mode = static_cast<int>(parse_long(val, where));
      else if (key == "width") cfg.source.width = parse_double(val, where);
      else if (key == "coeffs") {
        cfg.source.coeffs.clear();
        for (const auto& t : split_ws(val))
          cfg.source.coeffs.push_back(parse_double(t, where));
      } else if (key == "path") cfg.source.path = val;
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "solver") {
      if (key == "max_iterations") cfg.solver.max_iterations = static_cast<int>(parse_long(val, where));
      else if (key == "tolerance") cfg.solver.tolerance = parse_double(val, where);
      else if (key == "backtrack_factor") cfg.solver.backtrack_factor = parse_double(val, where);
      else if (key == "sufficient_decrease") cfg.solver.sufficient_decrease = parse_double(val, where);
      else if (key == "multistart") cfg.solver.multistart = static_cast<int>(parse_long(val, where));
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "run") {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(val, where));
      else if (key == "out") cfg.out_dir = val;
      else if (key == "workers") cfg.workers = static_cast<int>(parse_long(val, where));
      else if (key == "plot") cfg.plot = val;
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "sweep") {
      if (!sweep_key_ok(key))
        throw ConfigError("config: sweep key '" + key +
                          "' not one of gamma|alpha|beta|K|K2|n");
      std::vector<double> vals;
      for (const auto& t : split_ws(val)) vals.push_back(parse_double(t, where));
      cfg.sweep.axes.emplace_back(key, std::move(vals));
    } else {
      throw ConfigError("config: key outside any section at line " +
                        std::to_string(lineno));
    }
  }
  if (cfg.domain.dimension == 1 && extent_seen) cfg.domain.extent[1] = cfg.domain.extent[0];
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(is);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[domain]\n";
  os << "dimension = " << cfg.domain.dimension << "\n";
  os << "extent = " << fmt17(cfg.domain.extent[0]);
  if (cfg.domain.dimension == 2) os << " " << fmt17(cfg.domain.extent[1]);
  os << "\n";
  os << "n = " << cfg.domain.nodes_per_axis << "\n";
  os << "\n[model]\n";
  os << "gamma = " << fmt17(cfg.gamma) << "\n";
  os << "alpha = " << fmt17(cfg.alpha) << "\n";
  os << "beta = " << fmt17(cfg.beta) << "\n";
  os << "K = " << fmt17(cfg.resolved_K()) << "\n";
  os << "K2 = " << fmt17(cfg.resolved_K2()) << "\n";
  os << "\n[source]\n";
  os << "kind = " << kind_name(cfg.source.kind) << "\n";
  switch (cfg.source.kind) {
    case SourceSpec::Kind::Constant:
      os << "value = " << fmt17(cfg.source.value) << "\n";
      break;
    case SourceSpec::Kind::Sine:
      os << "amplitude = " << fmt17(cfg.source.amplitude) << "\n";
      os << "mode = " << cfg.source.mode << "\n";
      break;
    case SourceSpec::Kind::Bump:
      os << "amplitude = " << fmt17(cfg.source.amplitude) << "\n";
      os << "width = " << fmt17(cfg.source.width) << "\n";
      break;
    case SourceSpec::Kind::Polynomial: {
      os << "coeffs =";
      for (double c : cfg.source.coeffs) os << " " << fmt17(c);
      os << "\n";
      break;
    }
    case SourceSpec::Kind::File:
      os << "path = " << cfg.source.path << "\n";
      break;
    case SourceSpec::Kind::Zero:
      break;
  }
  os << "\n[solver]\n";
  os << "max_iterations = " << cfg.solver.max_iterations << "\n";
  os << "tolerance = " << fmt17(cfg.solver.tolerance) << "\n";
  os << "backtrack_factor = " << fmt17(cfg.solver.backtrack_factor) << "\n";
  os << "sufficient_decrease = " << fmt17(cfg.solver.sufficient_decrease) << "\n";
  os << "multistart = " << cfg.solver.multistart << "\n";
  os << "\n[run]\n";
  os << "seed = " << cfg.seed << "\n";
  os << "out = " << cfg.out_dir << "\n";
  os << "workers = " << cfg.workers << "\n";
  if (!cfg.plot.empty()) os << "plot = " << cfg.plot << "\n";
  if (!cfg.sweep.empty()) {
    os << "\n[sweep]\n";
    for (const auto& [k, vals] : cfg.sweep.axes) {
      os << k << " =";
      for (double v : vals) os << " " << fmt17(v);
      os << "\n";
    }
  }
  return os.str();
}

ScalarField build_source(const SourceSpec& src, const GridPtr& g) {
  ScalarField f = ScalarField::zeros(g);
  const int dim = g->dimension();
  const auto& spec = g->spec();
  switch (src.kind) {
    case SourceSpec::Kind::Zero:
      break;
    case SourceSpec::Kind::Constant:
      for (auto& x : f.values) x = src.value;
      break;
    case SourceSpec::Kind::Sine: {
      if (src.mode < 1) throw ConfigError("source: sine mode must be >= 1");
      const double pi = 3.14159265358979323846;
      for (std::size_t i = 0; i < f.size(); ++i) {
        double v = src.amplitude;
        for (int a = 0; a < dim; ++a)
          v *= std::sin(src.mode * pi * g->coord(i, a) / spec.extent[a]);
        f[i] = v;
      }
      break;
    }
    case SourceSpec::Kind::Bump: {
      for (std::size_t i = 0; i < f.size(); ++i) {
        double e = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double w = src.width > 0.0 ? src.width : spec.extent[a] / 8.0;
          const double d = (g->coord(i, a) - 0.5 * spec.extent[a]) / w;
          e += d * d;
        }
        f[i] = src.amplitude * std::exp(-e);
      }
      break;
    }
    case SourceSpec::Kind::Polynomial: {
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = g->coord(i, 0);
        double v = 0.0;
        for (std::size_t j = src.coeffs.size(); j-- > 0;)
          v = v * x + src.coeffs[j];
        f[i] = v;
      }
      break;
    }
    case SourceSpec::Kind::File:
      f = read_field(src.path, g);
      break;
  }
  f.check_finite("build_source");
  return f;
}

GridPtr build_grid(const ExperimentConfig& cfg) { return Grid::build(cfg.domain); }

ModelParams build_params(const ExperimentConfig& cfg, const GridPtr& g) {
  ModelParams p;
  p.gamma = cfg.gamma;
  p.alpha = cfg.alpha;
  p.beta = cfg.beta;
  p.K = cfg.resolved_K();
  p.K2 = cfg.resolved_K2();
  p.f = build_source(cfg.source, g);
  p.validate();
  return p;
}

void write_field(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("write_field: cannot open '" + path + "'");
  for (double x : f.values) os << fmt17(x) << "\n";
}

ScalarField read_field(const std::string& path, const GridPtr& g) {
  std::ifstream is(path);
  if (!is) throw ConfigError("read_field: cannot open '" + path + "'");
  std::vector<double> vals;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    vals.push_back(parse_double(line, "field file " + path));
  }
  if (vals.size() != g->size())
    throw ConfigError("read_field: '" + path + "' has " +
                      std::to_string(vals.size()) + " values, grid needs " +
                      std::to_string(g->size()));
  return ScalarField(g, std::move(vals));
}

}  // namespace gldual
