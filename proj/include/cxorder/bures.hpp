#pragma once

// Bures-Wasserstein geometry on covariance matrices.

#include "cxorder/linalg.hpp"

namespace cxorder {

struct GaussianMeasure {
  Vector mean;
  SpdMatrix cov;

  GaussianMeasure() = default;
  /// Throws dimension_mismatch unless mean.size() == cov.dim().
  GaussianMeasure(Vector m, SpdMatrix s);
  std::size_t dim() const noexcept { return mean.size(); }
};

/// tr s1 + tr s2 - 2 tr (s1^{1/2} s2 s1^{1/2})^{1/2}, clamped at 0.
double bw2(const SpdMatrix& s1, const SpdMatrix& s2,
           const Tolerances& tol = default_tolerances());

/// W2 between Gaussians (not squared).
double gaussian_w2(const GaussianMeasure& mu, const GaussianMeasure& nu,
                   const Tolerances& tol = default_tolerances());

/// W2 after aligning the means; sqrt(bw2) of the covariances.
double centered_w2(const GaussianMeasure& mu, const GaussianMeasure& nu,
                   const Tolerances& tol = default_tolerances());

/// Gradient of s -> bw2(fixed, s):
///   I - fixed^{1/2} (fixed^{1/2} s fixed^{1/2})^{-1/2} fixed^{1/2}.
/// Both arguments must be positive definite; throws singular_input
/// otherwise.
SymMatrix bw2_gradient(const SpdMatrix& fixed, const SpdMatrix& s,
                       const Tolerances& tol = default_tolerances());

struct Bw2Evaluation {
  double value = 0.0;
  SymMatrix gradient;
};

/// Value and gradient sharing one eigendecomposition. `fixed_root` is
/// spd_sqrt(fixed).
Bw2Evaluation bw2_value_and_gradient(const SpdMatrix& fixed,
                                     const SpdMatrix& fixed_root,
                                     const SpdMatrix& s,
                                     const Tolerances& tol = default_tolerances());

}  // namespace cxorder
