#include "cxorder/one_dim.hpp"

#include <algorithm>
#include <cmath>

#include "cxorder/error.hpp"

namespace cxorder {
namespace {

constexpr double kBreakTol = 1e-14;
constexpr double kValueMergeTol = 1e-12;

void require_1d(const DiscreteMeasure& m) {
  if (m.dim() != 1) {
    throw Error(ErrorCode::dimension_mismatch, "expected a 1-d measure");
  }
}

std::size_t piece_of(const Vector& breaks, double u) {
  // First k with u <= breaks[k + 1].
  auto it = std::lower_bound(breaks.begin() + 1, breaks.end(), u);
  if (it == breaks.end()) --it;
  return static_cast<std::size_t>(it - breaks.begin()) - 1;
}

// Atoms of a step quantile function; equal neighbouring values merge.
DiscreteMeasure measure_of(const Vector& breaks, const Vector& values) {
  Vector pts;
  Vector wts;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = breaks[k + 1] - breaks[k];
    if (w <= 0.0) continue;
    if (!pts.empty() &&
        std::abs(values[k] - pts.back()) <= kValueMergeTol * (1.0 + std::abs(pts.back()))) {
      wts.back() += w;
      continue;
    }
    pts.push_back(values[k]);
    wts.push_back(w);
  }
  return DiscreteMeasure::from_1d(pts, wts);
}

}  // namespace

double QuantileFunction::operator()(double u) const {
  return values[piece_of(breaks, std::clamp(u, 0.0, 1.0))];
}

double GFunction::operator()(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  const std::size_t k = piece_of(nodes, u);
  const double w = nodes[k + 1] - nodes[k];
  if (w <= 0.0) return values[k];
  const double t = (u - nodes[k]) / w;
  return values[k] + t * (values[k + 1] - values[k]);
}

double GFunction::slope(std::size_t k) const {
  return (values[k + 1] - values[k]) / (nodes[k + 1] - nodes[k]);
}

QuantileFunction quantile_of(const DiscreteMeasure& m) {
  require_1d(m);
  QuantileFunction q;
  q.breaks.reserve(m.size() + 1);
  q.breaks.push_back(0.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    cum += m.weight(i);
    q.breaks.push_back(cum);
    q.values.push_back(m.points()(i, 0));
  }
  q.breaks.back() = 1.0;
  return q;
}

CommonPartition common_partition(const QuantileFunction& a,
                                 const QuantileFunction& b) {
  Vector all;
  all.reserve(a.breaks.size() + b.breaks.size());
  all.insert(all.end(), a.breaks.begin(), a.breaks.end());
  all.insert(all.end(), b.breaks.begin(), b.breaks.end());
  std::sort(all.begin(), all.end());

  CommonPartition p;
  p.breaks.push_back(0.0);
  for (double u : all) {
    if (u - p.breaks.back() > kBreakTol && 1.0 - u > kBreakTol) p.breaks.push_back(u);
  }
  p.breaks.push_back(1.0);
  for (std::size_t k = 0; k + 1 < p.breaks.size(); ++k) {
    const double mid = 0.5 * (p.breaks[k] + p.breaks[k + 1]);
    p.mu_values.push_back(a(mid));
    p.nu_values.push_back(b(mid));
  }
  return p;
}

GFunction g_function(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const CommonPartition p = common_partition(quantile_of(mu), quantile_of(nu));
  GFunction g;
  g.nodes = p.breaks;
  g.values.assign(p.breaks.size(), 0.0);
  for (std::size_t k = 0; k + 1 < p.breaks.size(); ++k) {
    const double w = p.breaks[k + 1] - p.breaks[k];
    g.values[k + 1] = g.values[k] + w * (p.mu_values[k] - p.nu_values[k]);
  }
  return g;
}

GFunction lower_convex_hull(const GFunction& g) {
  // Andrew's monotone chain, lower half; nodes are already sorted.
  std::vector<std::size_t> hull;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (g.nodes[a] - g.nodes[o]) * (g.values[b] - g.values[o]) -
           (g.values[a] - g.values[o]) * (g.nodes[b] - g.nodes[o]);
  };
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(i);
  }
  GFunction out;
  for (std::size_t i : hull) {
    out.nodes.push_back(g.nodes[i]);
    out.values.push_back(g.values[i]);
  }
  return out;
}

Projection1d project_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_1d(mu);
  require_1d(nu);
  const CommonPartition p = common_partition(quantile_of(mu), quantile_of(nu));

  Projection1d out;
  out.G.nodes = p.breaks;
  out.G.values.assign(p.breaks.size(), 0.0);
  for (std::size_t k = 0; k + 1 < p.breaks.size(); ++k) {
    const double w = p.breaks[k + 1] - p.breaks[k];
    out.G.values[k + 1] = out.G.values[k] + w * (p.mu_values[k] - p.nu_values[k]);
  }
  out.hull = lower_convex_hull(out.G);

  // Left derivative of the hull on each piece of the common partition.
  const std::size_t pieces = p.mu_values.size();
  Vector slope(pieces);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double right = p.breaks[k + 1];
    while (seg + 2 < out.hull.nodes.size() && out.hull.nodes[seg + 1] < right) ++seg;
    slope[k] = out.hull.slope(seg);
  }

  out.quantile_I.breaks = p.breaks;
  out.quantile_J.breaks = p.breaks;
  for (std::size_t k = 0; k < pieces; ++k) {
    out.quantile_I.values.push_back(p.mu_values[k] - slope[k]);
    out.quantile_J.values.push_back(p.nu_values[k] + slope[k]);
    const double gap = (p.mu_values[k] - p.nu_values[k]) - slope[k];
    out.distance2 += (p.breaks[k + 1] - p.breaks[k]) * gap * gap;
  }
  // Where the hull touches G the two sides cancel only up to round-off;
  // restore the monotonicity that holds exactly.
  for (Vector* v : {&out.quantile_I.values, &out.quantile_J.values})
    for (std::size_t k = 1; k < v->size(); ++k)
      (*v)[k] = std::max((*v)[k], (*v)[k - 1]);
  out.I = measure_of(out.quantile_I.breaks, out.quantile_I.values);
  out.J = measure_of(out.quantile_J.breaks, out.quantile_J.values);
  return out;
}

double w2_squared_quantiles(const QuantileFunction& a,
                            const QuantileFunction& b) {
  const CommonPartition p = common_partition(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < p.mu_values.size(); ++k) {
    const double diff = p.mu_values[k] - p.nu_values[k];
    s += (p.breaks[k + 1] - p.breaks[k]) * diff * diff;
  }
  return s;
}

double w2_squared_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return w2_squared_quantiles(quantile_of(a), quantile_of(b));
}

bool convex_order_leq_quantiles(const QuantileFunction& eta,
                                const QuantileFunction& nu, double tol) {
  const CommonPartition p = common_partition(eta, nu);
  double diff = 0.0;  // int_0^u (F_eta^-1 - F_nu^-1)
  for (std::size_t k = 0; k < p.mu_values.size(); ++k) {
    diff += (p.breaks[k + 1] - p.breaks[k]) * (p.mu_values[k] - p.nu_values[k]);
    if (diff < -tol) return false;
  }
  return std::abs(diff) <= tol;
}

}  // namespace cxorder
