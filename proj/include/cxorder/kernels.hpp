#pragma once

// Data-parallel inner loops shared by the eigensolver, the dense matrix
// helpers and the transport solvers.
//
// Every kernel has a scalar reference implementation. AVX2 (x86-64) and
// NEON (aarch64) variants are compiled in separate translation units and
// picked once at runtime from the host CPU. The vector variants must agree
// with the scalar ones: bit-for-bit for the element-wise kernels (rotate,
// axpy, scale, sub_min) and up to summation order for the reductions (dot,
// squared_distance).

#include <cstddef>
#include <span>
#include <string_view>

namespace cxorder::kernels {

enum class Isa { scalar, avx2, neon };

/// Function table for one instruction set. All spans passed to a kernel
/// must have equal length.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // (x, y) <- (c*x - s*y, s*x + c*y), a Givens/Jacobi plane rotation.
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  // Smallest a[j] - b[j]; writes its first index to *argmin. n > 0.
  double (*sub_min)(const double* a, const double* b, std::size_t n,
                    std::size_t* argmin);
};

const KernelTable& scalar_table();
/// Null when the variant is not compiled in or the CPU lacks support.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Table selected for this process. CXORDER_FORCE_SCALAR=1 in the
/// environment pins the scalar table.
const KernelTable& active();

/// Overrides the process-wide selection (tests and benchmarks).
void set_active(Isa isa);

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) {
  active().scale(alpha, x.data(), x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c,
                   double s) {
  active().rotate(x.data(), y.data(), c, s, x.size());
}

inline double sub_min(std::span<const double> a, std::span<const double> b,
                      std::size_t* argmin) {
  return active().sub_min(a.data(), b.data(), a.size(), argmin);
}

}  // namespace cxorder::kernels
