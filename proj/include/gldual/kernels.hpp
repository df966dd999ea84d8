#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace gldual::kernels {

// Flat-array inner loops shared by the grid operators, the energy/gradient
// evaluations and the iterative solvers. Every entry has a scalar reference
// implementation; on x86-64 an AVX2+FMA variant is selected at runtime when
// the CPU supports it. Variants are equivalence-tested against the scalar
// reference (reductions reassociate, so agreement is to rounding, not bits).
struct Backend {
  const char* name;

  // reductions
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sup_abs)(const double* x, std::size_t n);
  // sum_i (x_i^2 - beta)^2
  double (*well_sum)(const double* u, double beta, std::size_t n);
  // sum_i (u_i^2 - beta + v_i)^2
  double (*well_shift_sum)(const double* u, const double* v, double beta,
                           std::size_t n);
  // sum_i a_i^2 / (2 b_i - K)
  double (*ratio_quad_sum)(const double* a, const double* b, double K,
                           std::size_t n);

  // elementwise
  void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a x
  void (*scal)(double a, double* x, std::size_t n);
  void (*clamp_box)(double* x, double lo, double hi, std::size_t n);
  // out_i = c (u_i^2 - beta) u_i
  void (*cubic_well)(const double* u, double beta, double c, double* out,
                     std::size_t n);
  // out_i = a u_i^2 + b
  void (*sq_affine)(const double* u, double a, double b, double* out,
                    std::size_t n);
  // out_i = -a_i / (2 b_i - K)
  void (*neg_ratio)(const double* a, const double* b, double K, double* out,
                    std::size_t n);

  // Dirichlet finite-difference stencils, boundary values implicitly zero.
  // 1D: out_i = c (2 u_i - u_{i-1} - u_{i+1}) + d_i u_i
  void (*stencil1)(double c, const double* u, const double* diag, double* out,
                   std::size_t m);
  // 2D row-major (x fastest):
  // out = cx (2u - left - right) + cy (2u - down - up) + d u
  void (*stencil2)(double cx, double cy, const double* u, const double* diag,
                   double* out, std::size_t mx, std::size_t my);
};

const Backend& scalar();
const Backend* avx2();  // nullptr when not compiled in or CPU lacks AVX2/FMA

// Active backend. Defaults to the best available; the GLDUAL_KERNELS
// environment variable ("scalar", "avx2", "auto") overrides at startup.
const Backend& active();

// Explicit selection, mainly for tests. Returns false if the named backend
// is unavailable. "auto" restores the default choice.
bool select(std::string_view name);

std::vector<const Backend*> available();

}  // namespace gldual::kernels
