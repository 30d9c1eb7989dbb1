#include "cxorder/bures.hpp"

#include <algorithm>
#include <cmath>

#include "cxorder/error.hpp"
#include "cxorder/kernels.hpp"

namespace cxorder {
namespace {

double trace_sqrt(const SpdMatrix& m) {
  double t = 0.0;
  for (double v : m.eigenvalues()) t += v > m.rank_tol() ? std::sqrt(v) : 0.0;
  return t;
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "covariance dimensions differ");
  }
}

}  // namespace

GaussianMeasure::GaussianMeasure(Vector m, SpdMatrix s)
    : mean(std::move(m)), cov(std::move(s)) {
  if (mean.size() != cov.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "mean and covariance dimensions differ");
  }
}

double bw2(const SpdMatrix& s1, const SpdMatrix& s2, const Tolerances& tol) {
  require_same_dim(s1, s2);
  const SpdMatrix inner = sandwich(spd_sqrt(s1, tol), s2, tol);
  const double v =
      s1.mat().trace() + s2.mat().trace() - 2.0 * trace_sqrt(inner);
  return std::max(v, 0.0);
}

double gaussian_w2(const GaussianMeasure& mu, const GaussianMeasure& nu,
                   const Tolerances& tol) {
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "Gaussian dimensions differ");
  }
  const double shift = kernels::squared_distance(mu.mean, nu.mean);
  return std::sqrt(shift + bw2(mu.cov, nu.cov, tol));
}

double centered_w2(const GaussianMeasure& mu, const GaussianMeasure& nu,
                   const Tolerances& tol) {
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "Gaussian dimensions differ");
  }
  return std::sqrt(bw2(mu.cov, nu.cov, tol));
}

Bw2Evaluation bw2_value_and_gradient(const SpdMatrix& fixed,
                                     const SpdMatrix& fixed_root,
                                     const SpdMatrix& s,
                                     const Tolerances& tol) {
  require_same_dim(fixed, s);
  if (!fixed.is_pd()) {
    throw Error(ErrorCode::singular_input,
                "bw2 gradient needs a positive definite fixed argument",
                fixed.min_eigenvalue());
  }
  const SpdMatrix inner = sandwich(fixed_root, s, tol);
  if (!inner.is_pd()) {
    throw Error(ErrorCode::singular_input,
                "bw2 gradient needs a positive definite argument",
                inner.min_eigenvalue());
  }
  const SpdMatrix inv_root = spd_inv_sqrt(inner, tol);
  const std::size_t d = s.dim();
  Matrix g = Matrix::identity(d) -
             fixed_root.mat() * inv_root.mat() * fixed_root.mat();

  Bw2Evaluation out;
  out.value = std::max(
      fixed.mat().trace() + s.mat().trace() - 2.0 * trace_sqrt(inner), 0.0);
  out.gradient = SymMatrix(g, tol);
  return out;
}

SymMatrix bw2_gradient(const SpdMatrix& fixed, const SpdMatrix& s,
                       const Tolerances& tol) {
  return bw2_value_and_gradient(fixed, spd_sqrt(fixed, tol), s, tol).gradient;
}

}  // namespace cxorder
