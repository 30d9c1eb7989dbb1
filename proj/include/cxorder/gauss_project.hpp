#pragma once

// Projections of a centered Gaussian covariance onto the convex-order
// cones: I2(mu, nu) is the closest covariance below nu, J2(nu, mu) the
// closest covariance above mu, both in the Bures-Wasserstein distance.

#include <optional>
#include <string>

#include "cxorder/order_transform.hpp"
#include "cxorder/pgd.hpp"

namespace cxorder {

enum class SolveMethod { automatic, closed_form, pgd };

struct GaussProjectOptions {
  SolveMethod method = SolveMethod::automatic;
  PgdConfig pgd{};
  Tolerances tol{};
};

struct SingularReduction {
  std::size_t rank = 0;
  OrthogonalMatrix O_nu;       // eigenbasis of nu, range first
  SpdMatrix reduced_nu;        // diag(lambda_1..lambda_r)
  SpdMatrix reduced_mu;        // (O^T mu O)_{1:r,1:r}
  SpdMatrix gamma;             // J2 of the reduced pair
  SpdMatrix sigma_star;        // assembled J2(nu, mu)
  OrderTransform transform;    // full-dimension transform
  Method sub_method = Method::closed_form;
  int sub_iterations = 0;
  PgdTrace sub_trace;
};

struct FastPath {
  OrderTransform transform;
  bool commuting = false;
  double corr_residual = 0.0;
};

struct OrderTransformSolution {
  OrderTransform transform;
  Method method = Method::closed_form;
  int iterations = 0;
  double solver_residual = 0.0;
  double corr_residual = 0.0;
  std::optional<SingularReduction> reduction;
  // Filled when PGD ran with cfg.record_trace set.
  PgdTrace trace;
};

struct GaussianProjections {
  ProjectionResult I;
  ProjectionResult J;
  std::optional<SingularReduction> reduction;
  PgdTrace trace;
};

/// Shared-correlation shortcut: applicable when every diagonal of O^T mu O
/// and O^T nu O is positive and D_hat C D_hat <= C, with
/// D_hat_ii = min(1, sqrt(mu_ii / nu_ii)).
std::optional<FastPath> fast_path_shared_correlation(
    const SpdMatrix& mu, const SpdMatrix& nu,
    const Tolerances& tol = default_tolerances());

/// Requires 1 <= rank(nu) < d. Solves the nonsingular problem on range(nu)
/// and keeps every other entry of O^T mu O.
SingularReduction reduce_singular_J(const SpdMatrix& nu, const SpdMatrix& mu,
                                    const GaussProjectOptions& opts = {});

/// Throws CertificationError if the final Loewner check fails.
OrderTransformSolution find_order_transform(
    const SpdMatrix& mu, const SpdMatrix& nu,
    const GaussProjectOptions& opts = {});

GaussianProjections project_gaussian(const SpdMatrix& mu, const SpdMatrix& nu,
                                     const GaussProjectOptions& opts = {});

ProjectionResult project_I(const SpdMatrix& mu, const SpdMatrix& nu,
                           const GaussProjectOptions& opts = {});
ProjectionResult project_J(const SpdMatrix& nu, const SpdMatrix& mu,
                           const GaussProjectOptions& opts = {});

enum class UniquenessClause { nu_nonsingular, rank_equal, loewner, none };

struct UniquenessVerdict {
  bool unique = true;
  UniquenessClause clause = UniquenessClause::none;
  std::string explanation;
};

/// Whether J2(nu, mu) is the unique projection. Throws rank_ambiguous when
/// an eigenvalue of nu or of the Gaussian projection lies within a factor
/// 10 of its rank tolerance.
UniquenessVerdict is_J_unique(const SpdMatrix& mu, const SpdMatrix& nu,
                              const GaussProjectOptions& opts = {});

enum class Dominance { I_equals_nu, J_equals_mu_equivalent, neither };

/// Tests nu <= (nu^{1/2} mu nu^{1/2})^{1/2}. That single condition is
/// equivalent to both I2(mu, nu) = nu and J2(nu, mu) = mu, so a positive
/// answer is reported as I_equals_nu.
Dominance dominance_check(const SpdMatrix& mu, const SpdMatrix& nu,
                          const Tolerances& tol = default_tolerances());

std::string_view dominance_name(Dominance d);
std::string_view clause_name(UniquenessClause c);

}  // namespace cxorder
