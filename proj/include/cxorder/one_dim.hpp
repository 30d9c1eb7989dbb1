#pragma once

// Exact convex-order projections of finitely supported measures on R,
// from the greatest convex minorant of G(u) = int_0^u (F_mu^-1 - F_nu^-1).

#include "cxorder/measure.hpp"

namespace cxorder {

/// Left-continuous step function: values[k] on (breaks[k], breaks[k+1]],
/// with breaks[0] = 0 and breaks.back() = 1.
struct QuantileFunction {
  Vector breaks;
  Vector values;

  double operator()(double u) const;
  std::size_t pieces() const noexcept { return values.size(); }
};

/// Continuous piecewise-linear function on [0, 1] given by its nodes.
struct GFunction {
  Vector nodes;
  Vector values;

  double operator()(double u) const;
  /// Slope of piece k, i.e. on (nodes[k], nodes[k+1]).
  double slope(std::size_t k) const;
};

/// Throws dimension_mismatch for a measure that is not 1-d.
QuantileFunction quantile_of(const DiscreteMeasure& m);

/// Both quantile functions refined to the union of their breakpoints.
/// Breakpoints closer than 1e-14 are identified.
struct CommonPartition {
  Vector breaks;
  Vector mu_values;
  Vector nu_values;
};
CommonPartition common_partition(const QuantileFunction& a,
                                 const QuantileFunction& b);

GFunction g_function(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Greatest convex minorant, computed as the lower hull of the nodes.
GFunction lower_convex_hull(const GFunction& g);

struct Projection1d {
  DiscreteMeasure I;   // I(mu, nu), dominated by nu
  DiscreteMeasure J;   // J(nu, mu), dominating mu
  QuantileFunction quantile_I;
  QuantileFunction quantile_J;
  GFunction G;
  GFunction hull;
  // int_0^1 (G' - co(G)')^2, the common squared distance.
  double distance2 = 0.0;
};

Projection1d project_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Quantile-coupling W2^2.
double w2_squared_quantiles(const QuantileFunction& a,
                            const QuantileFunction& b);
double w2_squared_1d(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// int_0^u F^-1 >= int_0^u F_nu^-1 at every breakpoint, with equality at
/// u = 1, all within tol.
bool convex_order_leq_quantiles(const QuantileFunction& eta,
                                const QuantileFunction& nu, double tol);

}  // namespace cxorder
