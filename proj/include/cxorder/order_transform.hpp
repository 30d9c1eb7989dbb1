#pragma once

// The certificate (O, D) behind the Gaussian projections and the
// closed-form assembly of both projected covariances from it.

#include <optional>
#include <string_view>
#include <vector>

#include "cxorder/error.hpp"
#include "cxorder/linalg.hpp"

namespace cxorder {

/// 1e-7 * (1 + |nu|_2): slack for Loewner certificates that sit downstream
/// of an iterative solve.
double order_tolerance(const SpdMatrix& nu);

struct OrderTransform {
  OrthogonalMatrix O;
  Vector D;                              // entries in [0, 1]
  std::optional<Vector> D_hat;           // shared-correlation path only
  std::optional<CorrelationMatrix> C;    // shared-correlation path only
  // Coordinates i where (O^T nu O)_ii is treated as positive.
  std::vector<char> nu_positive;
  // lambda_min(O^T nu O - D O^T mu O D); certified when >= -order_tol.
  double order_margin = 0.0;
  double order_tol = 0.0;

  bool certified() const { return order_margin >= -order_tol; }
};

/// D_ii = min(1, sqrt(nu_ii / mu_ii)) on the diagonals of O^T mu O and
/// O^T nu O, with D_ii = 1 when mu_ii = 0. `nu_positive`, when given,
/// fixes which nu diagonals count as nonzero; otherwise diagonals at or
/// below 8 * rank_tol(nu) count as zero.
OrderTransform build_order_transform(
    const OrthogonalMatrix& O, const SpdMatrix& mu, const SpdMatrix& nu,
    const std::vector<char>* nu_positive = nullptr,
    const Tolerances& tol = default_tolerances());

/// O D O^T mu O D O^T.
SpdMatrix assemble_I(const OrderTransform& t, const SpdMatrix& mu,
                     const Tolerances& tol = default_tolerances());

/// O S O^T where S_ij = (O^T mu O)_ij if nu_ii * nu_jj = 0 and
/// (O^T nu O)_ij / (D_ii D_jj) otherwise.
SpdMatrix assemble_J(const OrderTransform& t, const SpdMatrix& mu,
                     const SpdMatrix& nu,
                     const Tolerances& tol = default_tolerances());

/// sum_i (sqrt(mu_ii) - sqrt(nu_ii))_+^2 in the transformed basis.
double projection_distance2(const OrderTransform& t, const SpdMatrix& mu,
                            const SpdMatrix& nu);

enum class Method { closed_form, fast_path, commuting, pgd, singular_reduction };

std::string_view method_name(Method m);

struct ProjectionDiagnostics {
  int iterations = 0;
  double solver_residual = 0.0;
  double order_margin = 0.0;
  double corr_residual = 0.0;
};

struct ProjectionResult {
  SpdMatrix cov;
  double distance2 = 0.0;
  std::optional<OrderTransform> transform;
  Method method = Method::closed_form;
  ProjectionDiagnostics diagnostics;
};

/// Thrown when the Loewner certificate fails; carries the rejected
/// candidate.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, OrderTransform candidate)
      : Error(ErrorCode::certification_failed, what, -candidate.order_margin),
        candidate_(std::move(candidate)) {}
  const OrderTransform& candidate() const noexcept { return candidate_; }

 private:
  OrderTransform candidate_;
};

}  // namespace cxorder
