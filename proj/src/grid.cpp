#include "gldual/grid.hpp"

#include <cmath>
#include <string>

#include "gldual/kernels.hpp"

namespace gldual {

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw ConfigError("DomainSpec: dimension must be 1 or 2, got " +
                      std::to_string(dimension));
  if (nodes_per_axis < 3)
    throw ConfigError(
        "DomainSpec: nodes_per_axis must be >= 3 (no interior node otherwise), got " +
        std::to_string(nodes_per_axis));
  for (int a = 0; a < dimension; ++a)
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
      throw ConfigError("DomainSpec: extent must be positive and finite");
}

Grid::Grid(const DomainSpec& spec) : spec_(spec) {
  m_ = spec.nodes_per_axis - 2;
  size_ = static_cast<std::size_t>(m_);
  if (spec.dimension == 2) size_ *= static_cast<std::size_t>(m_);
  for (int a = 0; a < spec.dimension; ++a)
    h_[a] = spec.extent[a] / static_cast<double>(spec.nodes_per_axis - 1);
  weight_ = (spec.dimension == 1) ? h_[0] : h_[0] * h_[1];
}

GridPtr Grid::build(const DomainSpec& spec) {
  spec.validate();
  return GridPtr(new Grid(spec));
}

double Grid::coord(std::size_t node, int axis) const {
  if (spec_.dimension == 1) return (static_cast<double>(node) + 1.0) * h_[0];
  const std::size_t mx = static_cast<std::size_t>(m_);
  const std::size_t ix = node % mx;
  const std::size_t iy = node / mx;
  return axis == 0 ? (static_cast<double>(ix) + 1.0) * h_[0]
                   : (static_cast<double>(iy) + 1.0) * h_[1];
}

ScalarField::ScalarField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (grid && values.size() != grid->size())
    throw ShapeError("ScalarField: value count does not match grid size");
}

ScalarField ScalarField::zeros(const GridPtr& g) {
  return ScalarField(g, std::vector<double>(g->size(), 0.0));
}

ScalarField ScalarField::constant(const GridPtr& g, double c) {
  return ScalarField(g, std::vector<double>(g->size(), c));
}

void ScalarField::check_finite(const char* who) const {
  for (double x : values)
    if (!std::isfinite(x))
      throw DomainError(std::string(who) + ": field contains NaN or Inf");
}

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* who) {
  if (!a.grid || !b.grid)
    throw ShapeError(std::string(who) + ": field has no grid");
  if (a.grid == b.grid && a.size() == b.size()) return;
  bool same = a.size() == b.size() && a.grid->size() == b.grid->size() &&
              a.grid->dimension() == b.grid->dimension();
  for (int ax = 0; same && ax < a.grid->dimension(); ++ax)
    same = a.grid->spacing(ax) == b.grid->spacing(ax);
  if (!same)
    throw ShapeError(std::string(who) + ": fields live on different grids");
}

EllipticOperator::EllipticOperator(GridPtr grid, double gamma, ScalarField diag)
    : grid_(std::move(grid)), gamma_(gamma), diag_(std::move(diag)) {
  if (!(gamma_ > 0.0))
    throw ConfigError("EllipticOperator: gamma must be > 0");
  if (!diag_.grid || diag_.size() != grid_->size())
    throw ShapeError("EllipticOperator: diag field does not match grid");
  for (int a = 0; a < grid_->dimension(); ++a)
    c_[a] = gamma_ / (grid_->spacing(a) * grid_->spacing(a));
}

EllipticOperator::EllipticOperator(GridPtr grid, double gamma,
                                   double diag_constant)
    : EllipticOperator(grid, gamma, ScalarField::constant(grid, diag_constant)) {}

void EllipticOperator::apply(const double* x, double* y) const {
  const auto& k = kernels::active();
  const std::size_t m = static_cast<std::size_t>(grid_->interior_per_axis());
  if (grid_->dimension() == 1)
    k.stencil1(c_[0], x, diag_.data(), y, m);
  else
    k.stencil2(c_[0], c_[1], x, diag_.data(), y, m, m);
}

ScalarField EllipticOperator::apply(const ScalarField& x) const {
  if (x.size() != grid_->size())
    throw ShapeError("EllipticOperator::apply: field does not match grid");
  ScalarField y = ScalarField::zeros(grid_);
  apply(x.data(), y.data());
  return y;
}

EllipticOperator EllipticOperator::shifted(double c) const {
  ScalarField d = diag_;
  for (double& x : d.values) x += c;
  return EllipticOperator(grid_, gamma_, std::move(d));
}

double EllipticOperator::spectral_lower_bound() const {
  double lo = diag_[0];
  for (double d : diag_.values) lo = std::min(lo, d);
  return lo;
}

double EllipticOperator::spectral_upper_bound() const {
  double hi = diag_[0];
  for (double d : diag_.values) hi = std::max(hi, d);
  double lap = 4.0 * c_[0];
  if (grid_->dimension() == 2) lap += 4.0 * c_[1];
  return hi + lap;
}

EllipticOperator laplacian(const GridPtr& g, double gamma,
                           const ScalarField& diag) {
  return EllipticOperator(g, gamma, diag);
}

EllipticOperator laplacian(const GridPtr& g, double gamma,
                           double diag_constant) {
  return EllipticOperator(g, gamma, diag_constant);
}

double integrate(const ScalarField& w) {
  if (!w.grid) throw ShapeError("integrate: field has no grid");
  return w.grid->weight() * kernels::active().sum(w.data(), w.size());
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "inner");
  return a.grid->weight() * kernels::active().dot(a.data(), b.data(), a.size());
}

double sup_norm(const ScalarField& w) {
  return kernels::active().sup_abs(w.data(), w.size());
}

double l2_norm(const ScalarField& w) {
  const double d = kernels::active().dot(w.data(), w.data(), w.size());
  return std::sqrt(w.grid->weight() * d);
}

ScalarField add_scaled(const ScalarField& a, double s, const ScalarField& b) {
  require_same_grid(a, b, "add_scaled");
  ScalarField out = a;
  kernels::active().axpy(s, b.data(), out.data(), out.size());
  return out;
}

void axpy_inplace(double s, const ScalarField& x, ScalarField& y) {
  require_same_grid(x, y, "axpy_inplace");
  kernels::active().axpy(s, x.data(), y.data(), y.size());
}

ScalarField scaled(const ScalarField& a, double s) {
  ScalarField out = a;
  kernels::active().scal(s, out.data(), out.size());
  return out;
}

}  // namespace gldual
