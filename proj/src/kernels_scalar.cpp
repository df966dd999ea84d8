#include "gldual/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gldual::kernels {
namespace {

double dot_(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sup_abs_(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double well_sum_(const double* u, double beta, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u[i] * u[i] - beta;
    acc += t * t;
  }
  return acc;
}

double well_shift_sum_(const double* u, const double* v, double beta,
                       std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u[i] * u[i] - beta + v[i];
    acc += t * t;
  }
  return acc;
}

double ratio_quad_sum_(const double* a, const double* b, double K,
                       std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i] / (2.0 * b[i] - K);
  return acc;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void clamp_box_(double* x, double lo, double hi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(hi, std::max(lo, x[i]));
}

void cubic_well_(const double* u, double beta, double c, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c * (u[i] * u[i] - beta) * u[i];
}

void sq_affine_(const double* u, double a, double b, double* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * u[i] * u[i] + b;
}

void neg_ratio_(const double* a, const double* b, double K, double* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i] / (2.0 * b[i] - K);
}

void stencil1_(double c, const double* u, const double* diag, double* out,
               std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    const double left = (i > 0) ? u[i - 1] : 0.0;
    const double right = (i + 1 < m) ? u[i + 1] : 0.0;
    out[i] = c * (2.0 * u[i] - left - right) + diag[i] * u[i];
  }
}

void stencil2_(double cx, double cy, const double* u, const double* diag,
               double* out, std::size_t mx, std::size_t my) {
  for (std::size_t iy = 0; iy < my; ++iy) {
    const double* row = u + iy * mx;
    const double* down = (iy > 0) ? row - mx : nullptr;
    const double* up = (iy + 1 < my) ? row + mx : nullptr;
    double* o = out + iy * mx;
    const double* d = diag + iy * mx;
    for (std::size_t ix = 0; ix < mx; ++ix) {
      const double left = (ix > 0) ? row[ix - 1] : 0.0;
      const double right = (ix + 1 < mx) ? row[ix + 1] : 0.0;
      const double lo = down ? down[ix] : 0.0;
      const double hi = up ? up[ix] : 0.0;
      o[ix] = cx * (2.0 * row[ix] - left - right) +
              cy * (2.0 * row[ix] - lo - hi) + d[ix] * row[ix];
    }
  }
}

}  // namespace

const Backend& scalar() {
  static const Backend b{
      "scalar",      dot_,       sum_,       sup_abs_,  well_sum_,
      well_shift_sum_, ratio_quad_sum_, axpy_, scal_,  clamp_box_,
      cubic_well_,   sq_affine_, neg_ratio_, stencil1_, stencil2_,
  };
  return b;
}

}  // namespace gldual::kernels
