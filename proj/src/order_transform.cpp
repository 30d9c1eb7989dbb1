#include "cxorder/order_transform.hpp"

#include <algorithm>
#include <cmath>

namespace cxorder {
namespace {

Matrix rotated(const OrthogonalMatrix& O, const SpdMatrix& s) {
  Matrix a = congruence_t(O.mat(), s.mat());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

double zero_floor(const SpdMatrix& s) { return 8.0 * s.rank_tol(); }

}  // namespace

double order_tolerance(const SpdMatrix& nu) {
  return 1e-7 * (1.0 + nu.max_eigenvalue());
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::fast_path: return "fast_path";
    case Method::commuting: return "commuting";
    case Method::pgd: return "pgd";
    case Method::singular_reduction: return "singular_reduction";
  }
  return "unknown";
}

OrderTransform build_order_transform(const OrthogonalMatrix& O,
                                     const SpdMatrix& mu, const SpdMatrix& nu,
                                     const std::vector<char>* nu_positive,
                                     const Tolerances& tol) {
  const std::size_t d = O.dim();
  if (mu.dim() != d || nu.dim() != d) {
    throw Error(ErrorCode::dimension_mismatch, "order transform dimensions");
  }
  const Matrix a = rotated(O, mu);
  const Matrix b = rotated(O, nu);

  OrderTransform t;
  t.O = O;
  t.D.assign(d, 1.0);
  if (nu_positive != nullptr) {
    t.nu_positive = *nu_positive;
  } else {
    t.nu_positive.resize(d);
    for (std::size_t i = 0; i < d; ++i) t.nu_positive[i] = b(i, i) > zero_floor(nu);
  }
  const double mu_floor = zero_floor(mu);
  for (std::size_t i = 0; i < d; ++i) {
    const double ai = a(i, i);
    if (ai <= mu_floor) continue;
    const double bi = t.nu_positive[i] ? std::max(b(i, i), 0.0) : 0.0;
    t.D[i] = std::min(1.0, std::sqrt(bi / ai));
  }

  Matrix gap = b;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) gap(i, j) -= t.D[i] * a(i, j) * t.D[j];
  t.order_margin = min_eigenvalue(SymMatrix(gap, tol), tol);
  t.order_tol = order_tolerance(nu);
  return t;
}

SpdMatrix assemble_I(const OrderTransform& t, const SpdMatrix& mu,
                     const Tolerances& tol) {
  Matrix a = rotated(t.O, mu);
  const std::size_t d = a.rows();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) *= t.D[i] * t.D[j];
  return positive_part(SymMatrix(congruence(t.O.mat(), a), tol), tol);
}

SpdMatrix assemble_J(const OrderTransform& t, const SpdMatrix& mu,
                     const SpdMatrix& nu, const Tolerances& tol) {
  const Matrix a = rotated(t.O, mu);
  const Matrix b = rotated(t.O, nu);
  const std::size_t d = a.rows();
  Matrix s(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      s(i, j) = (t.nu_positive[i] && t.nu_positive[j])
                    ? b(i, j) / (t.D[i] * t.D[j])
                    : a(i, j);
    }
  return positive_part(SymMatrix(congruence(t.O.mat(), s), tol), tol);
}

double projection_distance2(const OrderTransform& t, const SpdMatrix& mu,
                            const SpdMatrix& nu) {
  const Matrix a = rotated(t.O, mu);
  const Matrix b = rotated(t.O, nu);
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double ai = std::max(a(i, i), 0.0);
    const double bi = t.nu_positive[i] ? std::max(b(i, i), 0.0) : 0.0;
    const double gap = std::sqrt(ai) - std::sqrt(bi);
    if (gap > 0.0) s += gap * gap;
  }
  return s;
}

}  // namespace cxorder
