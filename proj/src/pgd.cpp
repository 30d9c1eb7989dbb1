#include "cxorder/pgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cxorder/bures.hpp"
#include "cxorder/error.hpp"

namespace cxorder {
namespace {

struct Evaluation {
  double value = 0.0;
  SymMatrix gradient;
};

class Objective {
 public:
  Objective(const SpdMatrix& nu, double eps_reg, const Tolerances& tol)
      : nu_(nu), root_(spd_sqrt(nu, tol)), eps_reg_(eps_reg), tol_(tol) {}

  Evaluation operator()(const SpdMatrix& s) const {
    try {
      if (s.min_eigenvalue() >= eps_reg_) return eval(s);
      const Matrix shifted = s.mat() + Matrix::identity(s.dim()) * eps_reg_;
      return eval(SpdMatrix(shifted, tol_));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular_input) throw;
      throw Error(ErrorCode::singular_iterate,
                  "regularized iterate is still singular", e.residual());
    }
  }

 private:
  Evaluation eval(const SpdMatrix& s) const {
    Bw2Evaluation e = bw2_value_and_gradient(nu_, root_, s, tol_);
    return {e.value, std::move(e.gradient)};
  }

  const SpdMatrix& nu_;
  SpdMatrix root_;
  double eps_reg_;
  const Tolerances& tol_;
};

double default_eta(const SpdMatrix& nu) {
  const double lo = nu.min_eigenvalue();
  const double hi = nu.max_eigenvalue();
  return 2.0 * lo * std::sqrt(lo / hi);
}

double cone_violation(const SpdMatrix& s, const SpdMatrix& mu,
                      const Tolerances& tol) {
  return std::max(0.0, -min_eigenvalue(SymMatrix(s.mat() - mu.mat(), tol), tol));
}

}  // namespace

SpdMatrix frobenius_project_above(const SymMatrix& s, const SpdMatrix& mu,
                                  const Tolerances& tol) {
  if (s.dim() != mu.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "frobenius_project_above");
  }
  const SpdMatrix excess = positive_part(SymMatrix(mu.mat() - s.mat(), tol), tol);
  return SpdMatrix(s.mat() + excess.mat(), tol);
}

BelowProjection frobenius_project_below(const SymMatrix& mu,
                                        const SpdMatrix& nu,
                                        const Tolerances& tol) {
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "frobenius_project_below");
  }
  const SpdMatrix excess = positive_part(SymMatrix(mu.mat() - nu.mat(), tol), tol);
  BelowProjection out;
  out.matrix = SymMatrix(mu.mat() - excess.mat(), tol);
  out.min_eigenvalue = min_eigenvalue(out.matrix, tol);
  const double eig_tol =
      tol.eig * std::max(1.0, out.matrix.mat().frobenius_norm());
  out.left_psd_cone = out.min_eigenvalue < -eig_tol;
  return out;
}

PgdResult pgd_solve_J(const SpdMatrix& nu, const SpdMatrix& mu,
                      const PgdConfig& cfg, const Tolerances& tol) {
  if (nu.dim() != mu.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "pgd_solve_J");
  }
  if (!nu.is_pd()) {
    throw Error(ErrorCode::singular_input,
                "pgd_solve_J needs a positive definite nu; reduce first",
                nu.min_eigenvalue());
  }
  if (cfg.eta < 0.0 || cfg.max_iter < 0 || cfg.tol <= 0.0) {
    throw Error(ErrorCode::invalid_measure, "invalid PGD configuration");
  }

  const double eps_reg = cfg.reg_factor * nu.mat().trace();
  const Objective objective(nu, eps_reg, tol);
  const double stop = cfg.tol * (1.0 + nu.mat().frobenius_norm());
  double eta = cfg.eta > 0.0 ? cfg.eta : default_eta(nu);

  PgdResult out;
  SpdMatrix sigma = frobenius_project_above(nu, mu, tol);
  Evaluation cur = objective(sigma);
  if (cfg.record_trace) {
    out.trace.push_back({0, cur.value, cur.gradient.mat().frobenius_norm(),
                         cone_violation(sigma, mu, tol), eta});
  }

  out.status = PgdStatus::max_iter_exceeded;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    SpdMatrix next;
    Evaluation next_eval;
    double step_norm = 0.0;
    for (;;) {
      next = frobenius_project_above(
          SymMatrix(sigma.mat() - cur.gradient.mat() * eta, tol), mu, tol);
      const Matrix step = next.mat() - sigma.mat();
      step_norm = step.frobenius_norm();
      next_eval = objective(next);
      if (!cfg.backtracking || step_norm <= stop) break;
      // Sufficient decrease for a projected step; the round-off allowance
      // keeps a converged iterate from shrinking eta forever.
      const double model = cur.value + frobenius_dot(cur.gradient.mat(), step) +
                           step_norm * step_norm / (2.0 * eta);
      const double slack =
          64.0 * std::numeric_limits<double>::epsilon() *
          (nu.mat().trace() + sigma.mat().trace());
      if (next_eval.value <= model + slack) break;
      eta *= 0.5;
      if (eta < std::numeric_limits<double>::min()) {
        throw Error(ErrorCode::singular_iterate, "step size underflow");
      }
    }

    const double decrease = cur.value - next_eval.value;
    sigma = std::move(next);
    cur = std::move(next_eval);
    out.iterations = it;
    out.residual = step_norm;
    if (cfg.record_trace) {
      out.trace.push_back({it, cur.value, cur.gradient.mat().frobenius_norm(),
                           cone_violation(sigma, mu, tol), eta});
    }
    if (step_norm <= stop ||
        (cfg.objective_tol > 0.0 && std::abs(decrease) <= cfg.objective_tol)) {
      out.status = PgdStatus::converged;
      break;
    }
  }
  if (cfg.max_iter == 0) out.status = PgdStatus::converged;

  out.objective = cur.value;
  out.sigma = std::move(sigma);
  return out;
}

ProjectionResult recover_I_from_J(const SpdMatrix& mu, const SpdMatrix& nu,
                                  const SpdMatrix& sigma_j,
                                  const Tolerances& tol) {
  if (!nu.is_pd()) {
    throw Error(ErrorCode::singular_input,
                "recover_I_from_J needs a positive definite nu",
                nu.min_eigenvalue());
  }
  const SharedCorrelation sc = shared_correlation_transform(nu, sigma_j, tol);
  OrderTransform t = build_order_transform(sc.O, mu, nu, nullptr, tol);
  if (!t.certified()) {
    throw CertificationError("D O^T mu O D <= O^T nu O fails", std::move(t));
  }
  ProjectionResult r;
  r.cov = assemble_I(t, mu, tol);
  r.distance2 = projection_distance2(t, mu, nu);
  r.method = Method::pgd;
  r.diagnostics.order_margin = t.order_margin;
  r.diagnostics.corr_residual = sc.residual;
  r.transform = std::move(t);
  return r;
}

}  // namespace cxorder
