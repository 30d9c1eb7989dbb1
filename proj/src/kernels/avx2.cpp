// AVX2 (256-bit, 4 doubles per lane group) kernel variants.
// Compiled with -mavx2 and without -mfma so that the element-wise kernels
// round exactly like the scalar reference.

#include "kernels_detail.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace cxorder::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

double hsum(__m256d v) {
  alignas(32) double t[kLanes];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + kLanes),
                                             _mm256_loadu_pd(b + i + kLanes)));
  }
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_avx2(const double* a, const double* b,
                             std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d t =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double t = a[i] - b[i];
    out += t * t;
  }
  return out;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void rotate_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi),
                                          _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi),
                                          _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double sub_min_avx2(const double* a, const double* b, std::size_t n,
                    std::size_t* argmin) {
  if (n < 2 * kLanes) return sub_min_scalar(a, b, n, argmin);

  __m256d best = _mm256_sub_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
  __m256d best_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_idx;
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  std::size_t i = kLanes;
  for (; i + kLanes <= n; i += kLanes) {
    idx = _mm256_add_pd(idx, step);
    const __m256d t =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    // Strict less-than keeps the earliest index within each lane.
    const __m256d lt = _mm256_cmp_pd(t, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, t, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
  }

  alignas(32) double vals[kLanes];
  alignas(32) double where[kLanes];
  _mm256_store_pd(vals, best);
  _mm256_store_pd(where, best_idx);
  double out = vals[0];
  std::size_t out_idx = static_cast<std::size_t>(where[0]);
  for (std::size_t l = 1; l < kLanes; ++l) {
    const auto w = static_cast<std::size_t>(where[l]);
    if (vals[l] < out || (vals[l] == out && w < out_idx)) {
      out = vals[l];
      out_idx = w;
    }
  }
  for (; i < n; ++i) {
    const double t = a[i] - b[i];
    if (t < out) {
      out = t;
      out_idx = i;
    }
  }
  *argmin = out_idx;
  return out;
}

const KernelTable kAvx2Table{Isa::avx2,         dot_avx2,  squared_distance_avx2,
                             axpy_avx2,         scale_avx2, rotate_avx2,
                             sub_min_avx2};

}  // namespace

const KernelTable* make_avx2_table() { return &kAvx2Table; }

}  // namespace cxorder::kernels::detail

#else

namespace cxorder::kernels::detail {
const KernelTable* make_avx2_table() { return nullptr; }
}  // namespace cxorder::kernels::detail

#endif
