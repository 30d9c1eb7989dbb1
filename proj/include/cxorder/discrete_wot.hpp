#pragma once

// Barycentric weak optimal transport between finitely supported measures:
//   min over couplings pi of  sum_i w_i |x_i - m(pi_{x_i})|^2,
// whose optimal barycentric map pushes mu forward to I2(mu, nu).

#include <cstdint>
#include <vector>

#include "cxorder/measure.hpp"

namespace cxorder {

class Coupling {
 public:
  static constexpr double kMarginalTol = 1e-9;

  Coupling() = default;
  /// Throws dimension_mismatch on shape errors and invalid_measure when pi
  /// has a negative entry or a marginal is off by more than marginal_tol.
  Coupling(Matrix pi, DiscreteMeasure mu, DiscreteMeasure nu,
           double marginal_tol = kMarginalTol);

  const Matrix& pi() const noexcept { return pi_; }
  const DiscreteMeasure& mu() const noexcept { return mu_; }
  const DiscreteMeasure& nu() const noexcept { return nu_; }

  /// Row i is m(pi_{x_i}) = sum_j pi_ij y_j / w_i.
  Matrix conditional_barycenters() const;
  /// sum_ij pi_ij (x_i - m(mu)) (y_j - m(nu))^T.
  Matrix cross_covariance() const;
  double marginal_residual() const;

 private:
  Matrix pi_;
  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
};

double wot_objective(const Coupling& pi);

/// Network simplex for the transportation problem with fixed marginals.
/// The basis is kept between solves, so a sequence of costs is solved
/// from a warm start. The first basis is the northwest-corner vertex.
class TransportSimplex {
 public:
  struct Cell {
    std::uint32_t i;
    std::uint32_t j;
    double flow;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  TransportSimplex(Vector supply, Vector demand);

  /// Moves to an optimal vertex for `cost` (n x m). Throws lp_infeasible
  /// if the pivot limit is reached.
  void solve(const Matrix& cost);

  /// Basic cells; n + m - 1 of them, some possibly with zero flow.
  const std::vector<Cell>& basis() const noexcept { return basis_; }
  Matrix plan() const;
  double objective(const Matrix& cost) const;
  long pivots() const noexcept { return pivots_; }

 private:
  std::size_t n_;
  std::size_t m_;
  Vector supply_;
  Vector demand_;
  std::vector<Cell> basis_;
  long pivots_ = 0;

  void northwest_corner();
};

/// Optimal vertex of the transportation polytope for a linear cost.
Matrix lp_oracle(const Matrix& cost, const DiscreteMeasure& mu,
                 const DiscreteMeasure& nu);

struct WotConfig {
  // Stop when the Frank-Wolfe gap is below fw_tol * (1 + f(product coupling)).
  // The barycentric map is then within sqrt(gap) of the optimum in W2.
  double fw_tol = 1e-12;
  int max_iter = 100000;
  bool away_steps = true;
  std::size_t budget = 1000000;  // max n * m
};

enum class WotStatus { converged, gap_not_reached };

struct WotResult {
  Coupling coupling;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  WotStatus status = WotStatus::converged;
};

/// Frank-Wolfe with exact line search and optional away steps. Throws
/// budget_exceeded when n * m exceeds cfg.budget; a gap above tolerance
/// after max_iter is reported through `status`.
WotResult solve_wot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const WotConfig& cfg = {});

/// Atoms m(pi_{x_i}) with weights w_i.
DiscreteMeasure barycentric_pushforward(const Coupling& pi);

/// eta <=cx nu for 1-d measures via integrated quantiles.
bool check_convex_order_1d(const DiscreteMeasure& eta,
                           const DiscreteMeasure& nu, double tol = 1e-10);

/// Exact W2^2 between discrete measures by the transportation LP.
double exact_w2_squared(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace cxorder
