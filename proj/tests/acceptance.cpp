// Acceptance gate: each numbered criterion runs its full instance count at
// the stated tolerance and prints one PASS/FAIL line. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "cxorder/bures.hpp"
#include "cxorder/discrete_wot.hpp"
#include "cxorder/gauss_project.hpp"
#include "cxorder/one_dim.hpp"
#include "cxorder/pgd.hpp"
#include "eigen_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace cxorder;
using namespace cxorder::testing;

struct Outcome {
  bool pass = true;
  std::string detail;
  double worst = 0.0;  // largest error seen, for the report line

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
  void track(double err) { worst = std::max(worst, err); }
};

double lambda_min(const Matrix& m) { return oracle_min_eig(to_eigen(m)); }
SpdMatrix diag(Vector v) { return SpdMatrix(Matrix::diagonal(v)); }

Outcome criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const SpdMatrix nu = diag({2, 0});
  const SpdMatrix mus[] = {SpdMatrix(Matrix::identity(2)), SpdMatrix(Matrix{{1, 1}, {1, 1}})};
  const Matrix want[] = {Matrix{{2, 0}, {0, 1}}, Matrix{{2, 1}, {1, 1}}};
  for (int k = 0; k < 2; ++k) {
    const double closed = max_abs_diff(project_J(nu, mus[k]).cov.mat(), want[k]);
    GaussProjectOptions pgd;
    pgd.method = SolveMethod::pgd;
    const SingularReduction red = reduce_singular_J(nu, mus[k], pgd);
    const double viapgd = max_abs_diff(red.sigma_star.mat(), want[k]);
    o.track(closed);
    o.require(closed <= 1e-8, "closed-form Sigma_J off by " + std::to_string(closed));
    o.require(viapgd <= 1e-5, "PGD Sigma_J off by " + std::to_string(viapgd));
    o.require(red.sub_method == Method::pgd, "reduced problem not solved by PGD");
    o.require(!is_J_unique(mus[k], nu).unique, "uniqueness verdict should be false");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 1.0, "runtime " + std::to_string(secs) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(1002);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const auto a = random_spectrum(rng, d), b = random_spectrum(rng, d);
    const Matrix q = random_orthogonal(rng, d);
    const SpdMatrix mu(congruence(q, Matrix::diagonal(a)));
    const SpdMatrix nu(congruence(q, Matrix::diagonal(b)));
    Vector lo(d), hi(d);
    double plus = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(a[i], b[i]);
      hi[i] = std::max(a[i], b[i]);
      const double s = std::max(0.0, std::sqrt(a[i]) - std::sqrt(b[i]));
      plus += s * s;
    }
    const GaussianProjections p = project_gaussian(mu, nu);
    const double ei = max_abs_diff(p.I.cov.mat(), congruence(q, Matrix::diagonal(lo)));
    const double ej = max_abs_diff(p.J.cov.mat(), congruence(q, Matrix::diagonal(hi)));
    const double ed = std::abs(oracle_bw2(mu.mat(), p.I.cov.mat()) - plus);
    o.track(std::max({ei, ej, ed}));
    o.require(ei <= 1e-9 && ej <= 1e-9, "eigen-wise min/max mismatch");
    o.require(ed <= 1e-9, "plus-part distance mismatch");
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(1003);
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const SpdMatrix mu = random_pd(rng, d), nu = random_pd(rng, d);
    const GaussianProjections p = project_gaussian(mu, nu);
    const double tr = std::abs(p.I.cov.mat().trace() + p.J.cov.mat().trace() -
                               mu.mat().trace() - nu.mat().trace());
    const double fb = std::abs(oracle_bw2(mu.mat(), p.I.cov.mat()) -
                               oracle_bw2(nu.mat(), p.J.cov.mat()));
    o.track(std::max(tr, fb));
    o.require(tr <= 1e-8, "trace identity error " + std::to_string(tr));
    o.require(fb <= 1e-8, "distance equality error " + std::to_string(fb));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(1004);
  int found = 0;
  PgdConfig cfg;
  cfg.record_trace = true;
  while (found < 100) {
    const std::size_t d = random_dim(rng, 2, 6);
    const SpdMatrix mu = random_pd(rng, d), nu = random_pd(rng, d);
    const auto fast = fast_path_shared_correlation(mu, nu);
    if (!fast) continue;
    ++found;
    const double closed = projection_distance2(fast->transform, mu, nu);
    const PgdResult r = pgd_solve_J(nu, mu, cfg);
    const double rel = std::abs(r.objective - closed) / (1.0 + closed);
    o.track(rel);
    o.require(r.iterations <= 10000 && r.status == PgdStatus::converged,
              "PGD did not converge within 10000 iterations");
    o.require(rel <= 1e-5, "objective gap " + std::to_string(rel));
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      o.require(r.trace[k].objective <= r.trace[k - 1].objective + 1e-9,
                "objective increased at iteration " + std::to_string(k));
    }
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(1005);
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const SpdMatrix fixed = random_pd(rng, d), s = random_pd(rng, d);
    const Matrix g = gaussian_matrix(rng, d, d);
    const Matrix delta = 0.5 * (g + g.transpose());
    const double fd = (bw2(fixed, SpdMatrix(s.mat() + h * delta)) -
                       bw2(fixed, SpdMatrix(s.mat() - h * delta))) / (2.0 * h);
    const double an = frobenius_dot(bw2_gradient(fixed, s).mat(), delta);
    const double err = std::abs(fd - an) / (1.0 + std::abs(an));
    o.track(err);
    o.require(err <= 1e-4, "gradient mismatch " + std::to_string(err));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(1006);
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const SpdMatrix a = random_pd(rng, d);
    const SpdMatrix b(a.mat() + random_psd_rank(rng, d, random_dim(rng, 0, d)).mat());
    const double m = lambda_min(spd_sqrt(b).mat() - spd_sqrt(a).mat());
    o.track(std::max(0.0, -m));
    o.require(m >= -1e-8, "sqrt monotonicity violated");
  }
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const SpdMatrix nu = random_pd(rng, d), s1 = random_pd(rng, d), s2 = random_pd(rng, d);
    const double excess = bw2(nu, SpdMatrix(0.5 * (s1.mat() + s2.mat()))) -
                          0.5 * (bw2(nu, s1) + bw2(nu, s2));
    o.track(std::max(0.0, excess));
    o.require(excess <= 1e-8, "bw2 midpoint convexity violated");
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(1007);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = random_dim(rng, 1, 5);
    const Matrix g = gaussian_matrix(rng, d, d);
    const SymMatrix s(g + g.transpose());
    const SpdMatrix mu = random_pd(rng, d);
    const SpdMatrix p = frobenius_project_above(s, mu);
    o.require(lambda_min(p.mat() - mu.mat()) >= -1e-10, "projection above not >= mu");
    const double best = frobenius_distance(s.mat(), p.mat());
    for (int k = 0; k < 1000; ++k) {
      const Matrix f = (k % 2 ? mu.mat() : p.mat()) +
                       std::abs(n(rng)) * random_psd_rank(rng, d, random_dim(rng, 1, d)).mat();
      const double excess = best - frobenius_distance(s.mat(), f);
      o.track(std::max(0.0, excess));
      o.require(excess <= 1e-9, "a feasible point beats the projection");
    }
  }
  bool flagged = false;
  for (int t = 0; t < 1000; ++t) {
    const SpdMatrix mu = random_pd(rng, 2, 0.01, 10.0), nu = random_pd(rng, 2, 0.01, 10.0);
    const BelowProjection b = frobenius_project_below(mu, nu);
    o.require(lambda_min(nu.mat() - b.matrix.mat()) >= -1e-10, "projection below not <= nu");
    flagged = flagged || b.left_psd_cone;
  }
  o.require(flagged, "no instance left the PSD cone");
  return o;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(1008);
  for (int t = 0; t < 200; ++t) {
    const DiscreteMeasure mu = random_measure_1d(rng, 8), nu = random_measure_1d(rng, 8);
    const Projection1d p = project_1d(mu, nu);
    const WotResult w = solve_wot(mu, nu);
    const double dist = std::sqrt(w2_squared_1d(barycentric_pushforward(w.coupling), p.I));
    const double mom = std::abs(p.I.second_moment() + p.J.second_moment() -
                                mu.second_moment() - nu.second_moment());
    const double lhs = w2_squared_1d(mu, p.J), rhs = w2_squared_1d(nu, p.I);
    const double sym = std::max(std::abs(lhs - p.distance2), std::abs(rhs - p.distance2));
    o.track(dist);
    o.require(w.status == WotStatus::converged, "Frank-Wolfe gap not reached");
    o.require(dist <= 1e-6, "WOT vs formula W2 = " + std::to_string(dist));
    o.require(mom <= 1e-12, "second-moment identity error " + std::to_string(mom));
    o.require(sym <= 1e-12, "distance symmetry error " + std::to_string(sym));
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  Rng rng(1009);
  auto w = [](const Matrix& a, const Matrix& b) { return std::sqrt(oracle_bw2(a, b)); };
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = random_dim(rng, 1, 5);
    const SpdMatrix mu = random_pd(rng, d), mu2 = random_pd(rng, d);
    const SpdMatrix nu = random_pd(rng, d), nu2 = random_pd(rng, d);
    const Matrix i11 = project_I(mu, nu).cov.mat(), i21 = project_I(mu2, nu).cov.mat();
    const Matrix i12 = project_I(mu, nu2).cov.mat(), i22 = project_I(mu2, nu2).cov.mat();
    const Matrix j11 = project_J(nu, mu).cov.mat(), j22 = project_J(nu2, mu2).cov.mat();

    const double lip = w(i11, i21) - w(mu.mat(), mu2.mat());
    const double hold = oracle_bw2(i11, i12) -
                        (w(mu.mat(), i11) + w(mu.mat(), i12)) * w(nu.mat(), nu2.mat());
    const double bound = w(mu.mat(), mu2.mat()) + w(nu.mat(), nu2.mat());
    const double di = std::abs(w(mu.mat(), i11) - w(mu2.mat(), i22)) - bound;
    const double dj = std::abs(w(nu.mat(), j11) - w(nu2.mat(), j22)) - bound;
    o.track(std::max({lip, hold, di, dj, 0.0}));
    o.require(lip <= 1e-7, "non-expansiveness in mu violated");
    o.require(hold <= 1e-7, "Holder bound in nu violated");
    o.require(di <= 1e-7, "I-distance Lipschitz bound violated");
    o.require(dj <= 1e-7, "J-distance Lipschitz bound violated");
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  Rng rng(1010);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = random_dim(rng, 1, 6);
    const SpdMatrix nu = random_pd(rng, d);
    const SpdMatrix mu(nu.mat() + random_psd_rank(rng, d, random_dim(rng, 0, d)).mat());
    o.require(dominance_check(mu, nu) == Dominance::I_equals_nu, "classifier missed nu <= mu");
    const double err = max_abs_diff(project_I(mu, nu).cov.mat(), nu.mat());
    o.track(err);
    o.require(err <= 1e-8, "project_I differs from nu by " + std::to_string(err));
  }
  Rng rng2(1011);
  const SpdMatrix nu = random_pd(rng2, 3);
  o.require(dominance_check(SpdMatrix(Matrix(3, 3)), nu) == Dominance::neither,
            "mu = 0 < nu not classified as neither");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"singular-covariance examples", criterion1},
      {"commuting closed form", criterion2},
      {"trace identity and distance equality", criterion3},
      {"PGD vs closed form, monotone trace", criterion4},
      {"bw2 gradient vs finite differences", criterion5},
      {"monotone sqrt and bw2 convexity", criterion6},
      {"Frobenius cone projections", criterion7},
      {"1-d formula vs discrete WOT", criterion8},
      {"regularity bounds", criterion9},
      {"dominance classifier", criterion10},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d %s: %s (max error %.3g)%s%s\n", k, o.pass ? "PASS" : "FAIL",
                name, o.worst, o.pass ? "" : " - ", o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
