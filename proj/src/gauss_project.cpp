#include "cxorder/gauss_project.hpp"

#include <algorithm>
#include <cmath>

#include "cxorder/error.hpp"

namespace cxorder {
namespace {

constexpr double kMinPgdTol = 1e-14;

Matrix rotated(const Matrix& O, const Matrix& s) {
  Matrix a = congruence_t(O, s);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

bool commutes(const SpdMatrix& a, const SpdMatrix& b) {
  const Matrix ab = a.mat() * b.mat();
  const Matrix ba = b.mat() * a.mat();
  const double scale =
      1.0 + a.mat().frobenius_norm() * b.mat().frobenius_norm();
  return frobenius_distance(ab, ba) <= 1e-10 * scale;
}

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "covariance dimensions differ");
  }
}

// Refuse to read a rank off eigenvalues sitting next to the threshold.
void check_rank_band(const SpdMatrix& s, const char* name) {
  const double tol = s.rank_tol();
  for (double v : s.eigenvalues()) {
    if (v > tol / 10.0 && v <= tol * 10.0) {
      throw Error(ErrorCode::rank_ambiguous,
                  std::string("eigenvalue of ") + name +
                      " is too close to the rank tolerance",
                  v);
    }
  }
}

bool nu_below_root(const SpdMatrix& mu, const SpdMatrix& nu,
                   const Tolerances& tol) {
  const SpdMatrix root =
      spd_sqrt(sandwich(spd_sqrt(nu, tol), mu, tol), tol);
  return loewner_leq(nu, root, order_tolerance(nu), tol);
}

}  // namespace

std::optional<FastPath> fast_path_shared_correlation(const SpdMatrix& mu,
                                                     const SpdMatrix& nu,
                                                     const Tolerances& tol) {
  require_same_dim(mu, nu);
  const bool nu_first = nu.is_pd() || !mu.is_pd();
  const SpdMatrix& s1 = nu_first ? nu : mu;
  const SpdMatrix& s2 = nu_first ? mu : nu;

  SharedCorrelation sc;
  try {
    sc = shared_correlation_transform(s1, s2, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::corr_residual_exceeded) throw;
    return std::nullopt;
  }

  const std::size_t d = mu.dim();
  const Matrix a = rotated(sc.O.mat(), mu.mat());
  const Matrix b = rotated(sc.O.mat(), nu.mat());
  Vector d_hat(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (a(i, i) <= 8.0 * mu.rank_tol() || b(i, i) <= 8.0 * nu.rank_tol()) {
      return std::nullopt;
    }
    d_hat[i] = std::min(1.0, std::sqrt(a(i, i) / b(i, i)));
  }

  // C - D_hat C D_hat
  Matrix gap = sc.C.mat();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) gap(i, j) *= 1.0 - d_hat[i] * d_hat[j];
  if (min_eigenvalue(SymMatrix(gap, tol), tol) < -tol.corr) return std::nullopt;

  FastPath out;
  out.transform = build_order_transform(sc.O, mu, nu, nullptr, tol);
  if (!out.transform.certified()) return std::nullopt;
  out.transform.D_hat = std::move(d_hat);
  out.transform.C = sc.C;
  out.commuting = commutes(mu, nu);
  out.corr_residual = sc.residual;
  return out;
}

SingularReduction reduce_singular_J(const SpdMatrix& nu, const SpdMatrix& mu,
                                    const GaussProjectOptions& opts) {
  require_same_dim(mu, nu);
  const Tolerances& tol = opts.tol;
  const std::size_t d = nu.dim();
  const std::size_t r = nu.rank();
  if (r == 0 || r == d) {
    throw Error(ErrorCode::singular_input,
                "reduce_singular_J needs 1 <= rank(nu) < d");
  }

  SingularReduction red;
  red.rank = r;
  red.O_nu = OrthogonalMatrix(nu.eigenvectors(), tol);
  const Matrix& o1 = red.O_nu.mat();
  const Matrix a = rotated(o1, mu.mat());

  const Vector lam(nu.eigenvalues().begin(), nu.eigenvalues().begin() + r);
  red.reduced_nu = SpdMatrix::from_spectrum(lam, Matrix::identity(r), tol);
  red.reduced_mu = SpdMatrix(a.block(0, 0, r, r), tol);

  const OrderTransformSolution sub =
      find_order_transform(red.reduced_mu, red.reduced_nu, opts);
  red.sub_method = sub.method;
  red.sub_iterations = sub.iterations;
  red.sub_trace = sub.trace;
  red.gamma = assemble_J(sub.transform, red.reduced_mu, red.reduced_nu, tol);

  Matrix star = a;
  star.set_block(0, 0, red.gamma.mat());
  red.sigma_star = positive_part(SymMatrix(congruence(o1, star), tol), tol);

  Matrix lift = Matrix::identity(d);
  lift.set_block(0, 0, sub.transform.O.mat());
  const OrthogonalMatrix O(o1 * lift, tol);
  std::vector<char> nu_positive(d, 0);
  std::fill(nu_positive.begin(), nu_positive.begin() + r, 1);
  red.transform = build_order_transform(O, mu, nu, &nu_positive, tol);
  return red;
}

OrderTransformSolution find_order_transform(const SpdMatrix& mu,
                                            const SpdMatrix& nu,
                                            const GaussProjectOptions& opts) {
  require_same_dim(mu, nu);
  const Tolerances& tol = opts.tol;
  const std::size_t d = nu.dim();
  OrderTransformSolution sol;

  if (opts.method != SolveMethod::pgd) {
    if (auto fast = fast_path_shared_correlation(mu, nu, tol)) {
      sol.transform = std::move(fast->transform);
      sol.method = fast->commuting ? Method::commuting : Method::fast_path;
      sol.corr_residual = fast->corr_residual;
      return sol;
    }
  }

  if (nu.rank() == 0) {
    // Nothing is dominated by a point mass except itself: I = 0, J = mu.
    const std::vector<char> none(d, 0);
    sol.transform = build_order_transform(
        OrthogonalMatrix(mu.eigenvectors(), tol), mu, nu, &none, tol);
    sol.method = Method::singular_reduction;
  } else if (nu.rank() < d) {
    SingularReduction red = reduce_singular_J(nu, mu, opts);
    sol.transform = red.transform;
    sol.method = Method::singular_reduction;
    sol.iterations = red.sub_iterations;
    sol.trace = red.sub_trace;
    sol.reduction = std::move(red);
  } else {
    if (opts.method == SolveMethod::closed_form) {
      throw Error(ErrorCode::certification_failed,
                  "closed form not applicable: D_hat C D_hat <= C fails");
    }
    // The step-size stop can leave the iterate far enough from the optimum
    // (small eta) that certification fails; tighten and rerun when it does.
    PgdConfig cfg = opts.pgd;
    PgdResult pgd;
    SharedCorrelation sc;
    for (;;) {
      pgd = pgd_solve_J(nu, mu, cfg, tol);
      sc = shared_correlation_transform(nu, pgd.sigma, tol);
      sol.transform = build_order_transform(sc.O, mu, nu, nullptr, tol);
      if (sol.transform.certified() || cfg.tol <= kMinPgdTol ||
          pgd.status != PgdStatus::converged) {
        break;
      }
      cfg.tol = std::max(cfg.tol * 1e-2, kMinPgdTol);
    }
    sol.method = Method::pgd;
    sol.iterations = pgd.iterations;
    sol.solver_residual = pgd.residual;
    sol.corr_residual = sc.residual;
    sol.trace = std::move(pgd.trace);
  }

  if (!sol.transform.certified()) {
    throw CertificationError(
        "D O^T mu O D <= O^T nu O fails beyond order_tol",
        std::move(sol.transform));
  }
  return sol;
}

GaussianProjections project_gaussian(const SpdMatrix& mu, const SpdMatrix& nu,
                                     const GaussProjectOptions& opts) {
  OrderTransformSolution sol = find_order_transform(mu, nu, opts);
  GaussianProjections out;
  ProjectionDiagnostics diag;
  diag.iterations = sol.iterations;
  diag.solver_residual = sol.solver_residual;
  diag.order_margin = sol.transform.order_margin;
  diag.corr_residual = sol.corr_residual;
  const double dist2 = projection_distance2(sol.transform, mu, nu);

  out.I.cov = assemble_I(sol.transform, mu, opts.tol);
  out.J.cov = assemble_J(sol.transform, mu, nu, opts.tol);
  for (ProjectionResult* r : {&out.I, &out.J}) {
    r->distance2 = dist2;
    r->method = sol.method;
    r->diagnostics = diag;
    r->transform = sol.transform;
  }
  out.reduction = std::move(sol.reduction);
  out.trace = std::move(sol.trace);
  return out;
}

ProjectionResult project_I(const SpdMatrix& mu, const SpdMatrix& nu,
                           const GaussProjectOptions& opts) {
  return project_gaussian(mu, nu, opts).I;
}

ProjectionResult project_J(const SpdMatrix& nu, const SpdMatrix& mu,
                           const GaussProjectOptions& opts) {
  return project_gaussian(mu, nu, opts).J;
}

UniquenessVerdict is_J_unique(const SpdMatrix& mu, const SpdMatrix& nu,
                              const GaussProjectOptions& opts) {
  require_same_dim(mu, nu);
  UniquenessVerdict v;
  if (nu.is_pd()) {
    v.unique = true;
    v.clause = UniquenessClause::nu_nonsingular;
    v.explanation = "nu is positive definite";
    return v;
  }
  check_rank_band(nu, "nu");
  SpdMatrix star = nu.rank() == 0 ? mu : reduce_singular_J(nu, mu, opts).sigma_star;
  check_rank_band(star, "the Gaussian projection");

  if (star.rank() == nu.rank()) {
    v.unique = true;
    v.clause = UniquenessClause::rank_equal;
    v.explanation = "rank of the Gaussian projection equals rank(nu) = " +
                    std::to_string(nu.rank());
  } else if (nu_below_root(mu, nu, opts.tol)) {
    v.unique = true;
    v.clause = UniquenessClause::loewner;
    v.explanation = "nu <= (nu^1/2 mu nu^1/2)^1/2";
  } else {
    v.unique = false;
    v.clause = UniquenessClause::none;
    v.explanation = "rank of the Gaussian projection is " +
                    std::to_string(star.rank()) + " but rank(nu) is " +
                    std::to_string(nu.rank()) +
                    ", and nu <= (nu^1/2 mu nu^1/2)^1/2 fails";
  }
  return v;
}

Dominance dominance_check(const SpdMatrix& mu, const SpdMatrix& nu,
                          const Tolerances& tol) {
  require_same_dim(mu, nu);
  return nu_below_root(mu, nu, tol) ? Dominance::I_equals_nu
                                    : Dominance::neither;
}

std::string_view dominance_name(Dominance d) {
  switch (d) {
    case Dominance::I_equals_nu: return "I_equals_nu";
    case Dominance::J_equals_mu_equivalent: return "J_equals_mu_equivalent";
    case Dominance::neither: return "neither";
  }
  return "unknown";
}

std::string_view clause_name(UniquenessClause c) {
  switch (c) {
    case UniquenessClause::nu_nonsingular: return "nu_nonsingular";
    case UniquenessClause::rank_equal: return "rank_equal";
    case UniquenessClause::loewner: return "loewner";
    case UniquenessClause::none: return "none";
  }
  return "unknown";
}

}  // namespace cxorder
