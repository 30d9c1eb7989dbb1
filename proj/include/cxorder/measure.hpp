#pragma once

#include <cstddef>

#include "cxorder/matrix.hpp"

namespace cxorder {

/// Finitely supported probability measure on R^d. Points are stored in
/// lexicographic order with duplicates (max-norm distance <= merge_tol)
/// merged and their weights summed.
class DiscreteMeasure {
 public:
  static constexpr double kWeightTol = 1e-9;
  static constexpr double kMergeTol = 1e-12;

  DiscreteMeasure() = default;
  /// `points` is n x d. Throws empty_measure, zero_row on a zero weight,
  /// invalid_measure on negative weights or |sum w - 1| > weight_tol,
  /// non_finite on NaN/inf.
  DiscreteMeasure(const Matrix& points, const Vector& weights,
                  double weight_tol = kWeightTol,
                  double merge_tol = kMergeTol);

  static DiscreteMeasure from_1d(const Vector& points, const Vector& weights,
                                 double weight_tol = kWeightTol,
                                 double merge_tol = kMergeTol);
  static DiscreteMeasure dirac(const Vector& point);

  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  const Matrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  std::span<const double> point(std::size_t i) const { return points_.row(i); }
  double weight(std::size_t i) const { return weights_[i]; }

  Vector barycenter() const;
  /// sum_i w_i |x_i|^2
  double second_moment() const;

 private:
  Matrix points_;
  Vector weights_;
};

}  // namespace cxorder
