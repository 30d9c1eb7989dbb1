#include "cxorder/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cxorder/error.hpp"
#include "cxorder/kernels.hpp"

namespace cxorder {

DiscreteMeasure::DiscreteMeasure(const Matrix& points, const Vector& weights,
                                 double weight_tol, double merge_tol) {
  const std::size_t n = points.rows();
  if (n == 0 || points.cols() == 0) {
    throw Error(ErrorCode::empty_measure, "measure has no support points");
  }
  if (weights.size() != n) {
    throw Error(ErrorCode::dimension_mismatch,
                "expected " + std::to_string(n) + " weights, got " +
                    std::to_string(weights.size()));
  }
  for (double v : points.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite, "support point is not finite");
    }
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::non_finite, "weight is not finite");
    }
    if (w < 0.0) throw Error(ErrorCode::invalid_measure, "negative weight", w);
    if (w == 0.0) throw Error(ErrorCode::zero_row, "zero weight");
    total += w;
  }
  if (std::abs(total - 1.0) > weight_tol) {
    throw Error(ErrorCode::invalid_measure,
                "weights sum to " + std::to_string(total), total - 1.0);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(points.row(a).begin(), points.row(a).end(),
                                        points.row(b).begin(), points.row(b).end());
  });

  const std::size_t d = points.cols();
  std::vector<std::size_t> kept;
  Vector merged;
  for (std::size_t idx : order) {
    if (!kept.empty()) {
      auto prev = points.row(kept.back());
      auto cur = points.row(idx);
      double gap = 0.0;
      for (std::size_t k = 0; k < d; ++k) gap = std::max(gap, std::abs(prev[k] - cur[k]));
      if (gap <= merge_tol) {
        merged.back() += weights[idx];
        continue;
      }
    }
    kept.push_back(idx);
    merged.push_back(weights[idx]);
  }

  points_ = Matrix(kept.size(), d);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto src = points.row(kept[i]);
    std::copy(src.begin(), src.end(), points_.row(i).begin());
  }
  for (double& w : merged) w /= total;
  weights_ = std::move(merged);
}

DiscreteMeasure DiscreteMeasure::from_1d(const Vector& points,
                                         const Vector& weights,
                                         double weight_tol, double merge_tol) {
  Matrix p(points.size(), 1);
  for (std::size_t i = 0; i < points.size(); ++i) p(i, 0) = points[i];
  return DiscreteMeasure(p, weights, weight_tol, merge_tol);
}

DiscreteMeasure DiscreteMeasure::dirac(const Vector& point) {
  Matrix p(1, point.size());
  std::copy(point.begin(), point.end(), p.row(0).begin());
  return DiscreteMeasure(p, Vector{1.0});
}

Vector DiscreteMeasure::barycenter() const {
  Vector m(dim(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) kernels::axpy(weights_[i], point(i), m);
  return m;
}

double DiscreteMeasure::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * kernels::dot(point(i), point(i));
  return s;
}

}  // namespace cxorder
