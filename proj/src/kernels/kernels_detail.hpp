#pragma once

#include <cstddef>

#include "cxorder/kernels.hpp"

namespace cxorder::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);
void rotate_scalar(double* x, double* y, double c, double s, std::size_t n);
double sub_min_scalar(const double* a, const double* b, std::size_t n,
                      std::size_t* argmin);

// Defined only in the ISA-specific translation units.
const KernelTable* make_avx2_table();
const KernelTable* make_neon_table();

}  // namespace cxorder::kernels::detail
