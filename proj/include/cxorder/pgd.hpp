#pragma once

// Projected gradient descent for J2(nu, mu) = argmin { bw2(nu, S) : S >= mu }
// and the two Frobenius projections onto the Loewner cones.

#include <vector>

#include "cxorder/linalg.hpp"
#include "cxorder/order_transform.hpp"

namespace cxorder {

struct PgdConfig {
  // Initial step; 0 selects 2 * lambda_min(nu)^{3/2} / lambda_max(nu)^{1/2}.
  double eta = 0.0;
  int max_iter = 10000;
  // Stop when |S_i - P(S_i - eta grad)|_F <= tol * (1 + |nu|_F).
  double tol = 1e-8;
  // Also stop when the objective drops by less than this (0 disables).
  double objective_tol = 0.0;
  // Gradients are taken at S + eps I when lambda_min(S) < eps, with
  // eps = reg_factor * tr(nu).
  double reg_factor = 1e-10;
  // Halve eta until the sufficient-decrease test passes.
  bool backtracking = true;
  bool record_trace = false;
};

struct PgdTraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  // max(0, -lambda_min(S_i - mu)) after the projection step.
  double cone_violation = 0.0;
  double eta = 0.0;
};

using PgdTrace = std::vector<PgdTraceEntry>;

enum class PgdStatus { converged, max_iter_exceeded };

struct PgdResult {
  SpdMatrix sigma;
  double objective = 0.0;
  int iterations = 0;
  double residual = 0.0;
  PgdStatus status = PgdStatus::converged;
  PgdTrace trace;
};

/// s + (mu - s)^+, the nearest point of {S >= mu} in Frobenius norm.
SpdMatrix frobenius_project_above(const SymMatrix& s, const SpdMatrix& mu,
                                  const Tolerances& tol = default_tolerances());

struct BelowProjection {
  SymMatrix matrix;
  // The result can have negative eigenvalues; flagged here.
  bool left_psd_cone = false;
  double min_eigenvalue = 0.0;
};

/// mu - (mu - nu)^+, the nearest point of {S <= nu} among symmetric
/// matrices.
BelowProjection frobenius_project_below(
    const SymMatrix& mu, const SpdMatrix& nu,
    const Tolerances& tol = default_tolerances());

/// Requires nu positive definite (singular_input otherwise). Throws
/// singular_iterate if the regularized gradient still cannot be formed.
/// Hitting max_iter is reported through `status`, not thrown.
PgdResult pgd_solve_J(const SpdMatrix& nu, const SpdMatrix& mu,
                      const PgdConfig& cfg = {},
                      const Tolerances& tol = default_tolerances());

/// I2(mu, nu) from a solved J2(nu, mu): O diagonalizes
/// nu^{-1/2} (nu^{1/2} J nu^{1/2})^{1/2} nu^{-1/2}. Throws
/// CertificationError when D O^T mu O D <= O^T nu O fails beyond
/// order_tol.
ProjectionResult recover_I_from_J(const SpdMatrix& mu, const SpdMatrix& nu,
                                  const SpdMatrix& sigma_j,
                                  const Tolerances& tol = default_tolerances());

}  // namespace cxorder
