#include "cxorder/kernels.hpp"
#include "kernels_detail.hpp"

namespace cxorder::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    acc += t * t;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void rotate_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double sub_min_scalar(const double* a, const double* b, std::size_t n,
                      std::size_t* argmin) {
  double best = a[0] - b[0];
  std::size_t where = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = a[i] - b[i];
    if (t < best) {
      best = t;
      where = i;
    }
  }
  *argmin = where;
  return best;
}

}  // namespace cxorder::kernels::detail
