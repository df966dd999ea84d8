#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "gldual/errors.hpp"

namespace gldual {

// Uniform 1D interval or 2D rectangle with homogeneous Dirichlet boundary.
// Only interior nodes are stored; boundary values are implicitly zero.
struct DomainSpec {
  int dimension = 1;                       // 1 or 2
  std::array<double, 2> extent = {1.0, 1.0};  // length per axis
  int nodes_per_axis = 3;                  // total nodes per axis, >= 3

  void validate() const;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

// Immutable after construction; shared freely across threads.
class Grid {
 public:
  static GridPtr build(const DomainSpec& spec);

  int dimension() const { return spec_.dimension; }
  int interior_per_axis() const { return m_; }
  std::size_t size() const { return size_; }
  double spacing(int axis = 0) const { return h_[axis]; }
  // quadrature weight per interior node: h in 1D, hx*hy in 2D
  double weight() const { return weight_; }
  double measure() const { return weight_ * static_cast<double>(size_); }
  const DomainSpec& spec() const { return spec_; }

  // interior node coordinates, row-major (x fastest in 2D)
  double coord(std::size_t node, int axis) const;

 private:
  explicit Grid(const DomainSpec& spec);

  DomainSpec spec_;
  int m_ = 0;  // interior nodes per axis
  std::size_t size_ = 0;
  std::array<double, 2> h_ = {0.0, 0.0};
  double weight_ = 0.0;
};

// Real values at the interior nodes of one grid.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(GridPtr g, std::vector<double> v);

  static ScalarField zeros(const GridPtr& g);
  static ScalarField constant(const GridPtr& g, double c);

  std::size_t size() const { return values.size(); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  // throws if values contain NaN/Inf
  void check_finite(const char* who) const;
};

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* who);

// Symmetric operator -gamma * Lap_h + diag on the interior nodes, with the
// 3-point (1D) / 5-point (2D) Dirichlet stencil.
class EllipticOperator {
 public:
  EllipticOperator(GridPtr grid, double gamma, ScalarField diag);
  EllipticOperator(GridPtr grid, double gamma, double diag_constant);

  const GridPtr& grid() const { return grid_; }
  double gamma() const { return gamma_; }
  const ScalarField& diag() const { return diag_; }

  void apply(const double* x, double* y) const;
  ScalarField apply(const ScalarField& x) const;

  EllipticOperator shifted(double c) const;  // A + c*I

  // cheap outer bounds on the spectrum:
  //   lower: min(diag)            (the discrete Laplacian is PSD)
  //   upper: gamma*(4/hx^2 [+4/hy^2]) + max(diag)
  double spectral_lower_bound() const;
  double spectral_upper_bound() const;

 private:
  GridPtr grid_;
  double gamma_ = 0.0;
  ScalarField diag_;
  std::array<double, 2> c_ = {0.0, 0.0};  // gamma / h^2 per axis
};

// -gamma * Lap_h + diag; requires gamma > 0 and diag on the same grid
EllipticOperator laplacian(const GridPtr& g, double gamma,
                           const ScalarField& diag);
EllipticOperator laplacian(const GridPtr& g, double gamma,
                           double diag_constant = 0.0);

// interior rectangle rule, sum_i w_i * weight
double integrate(const ScalarField& w);
// L2 pairing <a, b> with the same quadrature
double inner(const ScalarField& a, const ScalarField& b);
// max_i |w_i|
double sup_norm(const ScalarField& w);
// quadrature-weighted L2 norm, sqrt(<w, w>)
double l2_norm(const ScalarField& w);

// small field arithmetic used across modules
ScalarField add_scaled(const ScalarField& a, double s, const ScalarField& b);  // a + s*b
void axpy_inplace(double s, const ScalarField& x, ScalarField& y);             // y += s*x
ScalarField scaled(const ScalarField& a, double s);

}  // namespace gldual
