#include "cxorder/discrete_wot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cxorder/error.hpp"
#include "cxorder/kernels.hpp"
#include "cxorder/one_dim.hpp"

namespace cxorder {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Consecutive zero-length pivots before switching to Bland's rule.
constexpr int kDegenerateLimit = 50;

void require_same_dim(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "measures live in different dimensions");
  }
}

Matrix squared_distance_cost(const DiscreteMeasure& a,
                             const DiscreteMeasure& b) {
  Matrix c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c(i, j) = kernels::squared_distance(a.point(i), b.point(j));
  return c;
}

}  // namespace

// ---------------------------------------------------------------- Coupling

Coupling::Coupling(Matrix pi, DiscreteMeasure mu, DiscreteMeasure nu,
                   double marginal_tol)
    : pi_(std::move(pi)), mu_(std::move(mu)), nu_(std::move(nu)) {
  require_same_dim(mu_, nu_);
  if (pi_.rows() != mu_.size() || pi_.cols() != nu_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "coupling shape");
  }
  for (double v : pi_.data()) {
    if (v < 0.0) throw Error(ErrorCode::invalid_measure, "negative coupling entry", v);
  }
  const double r = marginal_residual();
  if (r > marginal_tol) {
    throw Error(ErrorCode::invalid_measure, "coupling marginals are off", r);
  }
}

Matrix Coupling::conditional_barycenters() const {
  Matrix b = pi_ * nu_.points();
  for (std::size_t i = 0; i < b.rows(); ++i) kernels::scale(1.0 / mu_.weight(i), b.row(i));
  return b;
}

Matrix Coupling::cross_covariance() const {
  const std::size_t d = mu_.dim();
  const Vector mx = mu_.barycenter();
  const Vector my = nu_.barycenter();
  Matrix theta(d, d);
  for (std::size_t i = 0; i < pi_.rows(); ++i)
    for (std::size_t j = 0; j < pi_.cols(); ++j) {
      const double p = pi_(i, j);
      if (p == 0.0) continue;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          theta(a, b) += p * (mu_.point(i)[a] - mx[a]) * (nu_.point(j)[b] - my[b]);
    }
  return theta;
}

double Coupling::marginal_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < pi_.rows(); ++i) {
    double s = 0.0;
    for (double v : pi_.row(i)) s += v;
    r = std::max(r, std::abs(s - mu_.weight(i)));
  }
  for (std::size_t j = 0; j < pi_.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < pi_.rows(); ++i) s += pi_(i, j);
    r = std::max(r, std::abs(s - nu_.weight(j)));
  }
  return r;
}

double wot_objective(const Coupling& pi) {
  const Matrix b = pi.conditional_barycenters();
  double f = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i)
    f += pi.mu().weight(i) * kernels::squared_distance(pi.mu().point(i), b.row(i));
  return f;
}

// --------------------------------------------------------- TransportSimplex

TransportSimplex::TransportSimplex(Vector supply, Vector demand)
    : n_(supply.size()),
      m_(demand.size()),
      supply_(std::move(supply)),
      demand_(std::move(demand)) {
  if (n_ == 0 || m_ == 0) {
    throw Error(ErrorCode::empty_measure, "transportation problem is empty");
  }
  northwest_corner();
}

void TransportSimplex::northwest_corner() {
  basis_.clear();
  basis_.reserve(n_ + m_ - 1);
  std::size_t i = 0;
  std::size_t j = 0;
  double s = supply_[0];
  double r = demand_[0];
  for (;;) {
    const double f = std::min(s, r);
    basis_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                      std::max(f, 0.0)});
    s -= f;
    r -= f;
    if (i + 1 == n_ && j + 1 == m_) break;
    const bool next_row = j + 1 == m_ || (i + 1 < n_ && s <= r);
    if (next_row) {
      ++i;
      s = supply_[i];
    } else {
      ++j;
      r = demand_[j];
    }
  }
}

void TransportSimplex::solve(const Matrix& cost) {
  if (cost.rows() != n_ || cost.cols() != m_) {
    throw Error(ErrorCode::dimension_mismatch, "cost matrix shape");
  }
  const std::size_t nodes = n_ + m_;
  const double tol = 64.0 * kEps * (1.0 + cost.max_abs());
  const long pivot_limit = 1000L * static_cast<long>(nodes) * static_cast<long>(nodes);

  Vector u(n_), v(m_);
  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<long> parent_edge(nodes);
  std::vector<std::size_t> parent(nodes), depth(nodes), queue;
  queue.reserve(nodes);
  int degenerate_run = 0;
  long local_pivots = 0;

  for (;;) {
    // Spanning tree of basic cells; rows are nodes [0, n), columns [n, n+m).
    for (auto& a : adj) a.clear();
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj[basis_[k].i].push_back(k);
      adj[n_ + basis_[k].j].push_back(k);
    }
    std::fill(parent_edge.begin(), parent_edge.end(), -2);
    parent_edge[0] = -1;
    depth[0] = 0;
    u[0] = 0.0;
    queue.assign(1, 0);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t x = queue[h];
      for (std::size_t k : adj[x]) {
        const Cell& c = basis_[k];
        const std::size_t y = x < n_ ? n_ + c.j : c.i;
        if (parent_edge[y] != -2) continue;
        parent_edge[y] = static_cast<long>(k);
        parent[y] = x;
        depth[y] = depth[x] + 1;
        if (y >= n_) {
          v[c.j] = cost(c.i, c.j) - u[c.i];
        } else {
          u[c.i] = cost(c.i, c.j) - v[c.j];
        }
        queue.push_back(y);
      }
    }
    if (queue.size() != nodes) {
      throw Error(ErrorCode::lp_infeasible, "basis is not a spanning tree");
    }

    // Pricing: reduced cost c_ij - u_i - v_j.
    const bool bland = degenerate_run >= kDegenerateLimit;
    std::size_t ei = 0, ej = 0;
    double best = -tol;
    bool found = false;
    for (std::size_t i = 0; i < n_ && !(bland && found); ++i) {
      if (bland) {
        for (std::size_t j = 0; j < m_; ++j) {
          if (cost(i, j) - v[j] - u[i] < -tol) {
            ei = i;
            ej = j;
            found = true;
            break;
          }
        }
      } else {
        std::size_t j = 0;
        const double rc = kernels::sub_min(cost.row(i), v, &j) - u[i];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          found = true;
        }
      }
    }
    if (!found) return;

    // Cycle: entering cell, then the tree path from column ej back to row ei.
    std::vector<std::size_t> from_col, from_row;
    std::size_t a = n_ + ej;
    std::size_t b = ei;
    while (depth[a] > depth[b]) {
      from_col.push_back(static_cast<std::size_t>(parent_edge[a]));
      a = parent[a];
    }
    while (depth[b] > depth[a]) {
      from_row.push_back(static_cast<std::size_t>(parent_edge[b]));
      b = parent[b];
    }
    while (a != b) {
      from_col.push_back(static_cast<std::size_t>(parent_edge[a]));
      a = parent[a];
      from_row.push_back(static_cast<std::size_t>(parent_edge[b]));
      b = parent[b];
    }
    std::vector<std::size_t> path = std::move(from_col);
    path.insert(path.end(), from_row.rbegin(), from_row.rend());

    // Cells at even path positions lose flow.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.front();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const Cell& c = basis_[path[p]];
      const Cell& l = basis_[leave];
      const bool smaller = c.flow < theta ||
                           (c.flow == theta && (c.i * m_ + c.j) < (l.i * m_ + l.j));
      if (smaller) {
        theta = c.flow;
        leave = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      Cell& c = basis_[path[p]];
      c.flow = p % 2 == 0 ? std::max(c.flow - theta, 0.0) : c.flow + theta;
    }
    basis_[leave] = {static_cast<std::uint32_t>(ei), static_cast<std::uint32_t>(ej),
                     theta};

    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    ++pivots_;
    if (++local_pivots > pivot_limit) {
      throw Error(ErrorCode::lp_infeasible, "transportation simplex pivot limit");
    }
  }
}

Matrix TransportSimplex::plan() const {
  Matrix p(n_, m_);
  for (const Cell& c : basis_) p(c.i, c.j) += c.flow;
  return p;
}

double TransportSimplex::objective(const Matrix& cost) const {
  double s = 0.0;
  for (const Cell& c : basis_) s += c.flow * cost(c.i, c.j);
  return s;
}

Matrix lp_oracle(const Matrix& cost, const DiscreteMeasure& mu,
                 const DiscreteMeasure& nu) {
  TransportSimplex lp(mu.weights(), nu.weights());
  lp.solve(cost);
  return lp.plan();
}

// ------------------------------------------------------------- Frank-Wolfe

namespace {

struct Vertex {
  std::vector<TransportSimplex::Cell> cells;  // nonzero flows, sorted
  Matrix stat;                                // S Y, n x d
  double alpha = 0.0;
};

Matrix statistic(const std::vector<TransportSimplex::Cell>& cells,
                 const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  Matrix r(mu.size(), mu.dim());
  for (const auto& c : cells) kernels::axpy(c.flow, nu.point(c.j), r.row(c.i));
  return r;
}

std::vector<TransportSimplex::Cell> nonzero_cells(const TransportSimplex& lp) {
  std::vector<TransportSimplex::Cell> cells;
  for (const auto& c : lp.basis())
    if (c.flow > 0.0) cells.push_back(c);
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return cells;
}

// Residuals E_i = x_i - R_i / w_i and f = sum_i w_i |E_i|^2.
double residuals(const Matrix& r, const DiscreteMeasure& mu, Matrix& e) {
  double f = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto ei = e.row(i);
    const auto xi = mu.point(i);
    const auto ri = r.row(i);
    const double inv = 1.0 / mu.weight(i);
    for (std::size_t k = 0; k < ei.size(); ++k) ei[k] = xi[k] - ri[k] * inv;
    f += mu.weight(i) * kernels::dot(ei, ei);
  }
  return f;
}

// <grad f, S> for a vertex with statistic S Y, given E:  -2 sum_i E_i . (SY)_i.
double pairing(const Matrix& e, const Matrix& stat) {
  return -2.0 * frobenius_dot(e, stat);
}

}  // namespace

WotResult solve_wot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const WotConfig& cfg) {
  require_same_dim(mu, nu);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (static_cast<double>(n) * static_cast<double>(m) > static_cast<double>(cfg.budget)) {
    throw Error(ErrorCode::budget_exceeded,
                "n * m = " + std::to_string(n * m) + " exceeds the budget of " +
                    std::to_string(cfg.budget));
  }
  const std::size_t d = mu.dim();
  const Matrix& y = nu.points();

  // Product coupling as the reference point for the stopping scale.
  Matrix r(n, d);
  const Vector mean_nu = nu.barycenter();
  for (std::size_t i = 0; i < n; ++i) kernels::axpy(mu.weight(i), mean_nu, r.row(i));
  Matrix e(n, d);
  const double f_product = residuals(r, mu, e);
  const double target = cfg.fw_tol * (1.0 + f_product);

  TransportSimplex lp(mu.weights(), nu.weights());
  Matrix grad(n, m);
  auto gradient = [&](const Matrix& res) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        grad(i, j) = -2.0 * kernels::dot(res.row(i), y.row(j));
  };

  // Away steps need the active vertices; plain steps only need the plan,
  // and tracking vertices there would cost O(|active|) per iteration.
  std::vector<Vertex> active;
  Matrix plan(n, m);
  const bool track = cfg.away_steps;
  gradient(e);
  lp.solve(grad);
  {
    Vertex v0;
    v0.cells = nonzero_cells(lp);
    v0.stat = statistic(v0.cells, mu, nu);
    v0.alpha = 1.0;
    r = v0.stat;
    if (track) {
      active.push_back(std::move(v0));
    } else {
      for (const auto& c : v0.cells) plan(c.i, c.j) = c.flow;
    }
  }

  WotResult out;
  out.status = WotStatus::gap_not_reached;
  residuals(r, mu, e);
  double gap = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    gradient(e);
    lp.solve(grad);
    Vertex s;
    s.cells = nonzero_cells(lp);
    s.stat = statistic(s.cells, mu, nu);

    const double at_x = pairing(e, r);
    gap = at_x - pairing(e, s.stat);
    out.iterations = it;
    if (gap <= target) {
      out.status = WotStatus::converged;
      break;
    }

    std::size_t away = 0;
    double away_gap = -std::numeric_limits<double>::infinity();
    if (cfg.away_steps && active.size() > 1) {
      for (std::size_t k = 0; k < active.size(); ++k) {
        const double g = pairing(e, active[k].stat) - at_x;
        if (g > away_gap) {
          away_gap = g;
          away = k;
        }
      }
    }

    const bool fw_step = !(cfg.away_steps && active.size() > 1) || gap >= away_gap;
    Matrix dir = fw_step ? s.stat - r : r - active[away].stat;
    const double gamma_max =
        fw_step ? 1.0 : active[away].alpha / (1.0 - active[away].alpha);

    // Exact minimizer of the quadratic along dir.
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += kernels::dot(e.row(i), dir.row(i));
      den += kernels::dot(dir.row(i), dir.row(i)) / mu.weight(i);
    }
    if (den <= 0.0) {
      out.status = WotStatus::converged;
      break;
    }
    const double gamma = std::clamp(num / den, 0.0, gamma_max);

    if (!track) {
      for (double& x : plan.data()) x *= 1.0 - gamma;
      for (const auto& c : s.cells) plan(c.i, c.j) += gamma * c.flow;
    } else if (fw_step) {
      for (auto& v : active) v.alpha *= 1.0 - gamma;
      auto same = std::find_if(active.begin(), active.end(),
                               [&](const Vertex& v) { return v.cells == s.cells; });
      if (gamma >= 1.0) {
        active.clear();
        s.alpha = 1.0;
        active.push_back(std::move(s));
      } else if (same != active.end()) {
        same->alpha += gamma;
      } else {
        s.alpha = gamma;
        active.push_back(std::move(s));
      }
    } else {
      for (auto& v : active) v.alpha *= 1.0 + gamma;
      active[away].alpha -= gamma;
      if (gamma >= gamma_max) active[away].alpha = 0.0;
    }
    std::erase_if(active, [](const Vertex& v) { return v.alpha <= 0.0; });

    kernels::axpy(gamma, dir.data(), r.data());
    if (it % 64 == 0) {
      // Resynchronize with the convex combination to shed drift.
      if (track) {
        r = Matrix(n, d);
        for (const auto& v : active) kernels::axpy(v.alpha, v.stat.data(), r.data());
      } else {
        r = plan * y;
      }
    }
    residuals(r, mu, e);
  }

  Matrix pi = track ? Matrix(n, m) : std::move(plan);
  double total = 0.0;
  for (const auto& v : active) total += v.alpha;
  for (const auto& v : active)
    for (const auto& c : v.cells) pi(c.i, c.j) += v.alpha / total * c.flow;

  out.coupling = Coupling(std::move(pi), mu, nu);
  out.value = wot_objective(out.coupling);
  out.gap = gap;
  return out;
}

DiscreteMeasure barycentric_pushforward(const Coupling& pi) {
  return DiscreteMeasure(pi.conditional_barycenters(), pi.mu().weights());
}

bool check_convex_order_1d(const DiscreteMeasure& eta, const DiscreteMeasure& nu,
                           double tol) {
  return convex_order_leq_quantiles(quantile_of(eta), quantile_of(nu), tol);
}

double exact_w2_squared(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require_same_dim(a, b);
  const Matrix cost = squared_distance_cost(a, b);
  TransportSimplex lp(a.weights(), b.weights());
  lp.solve(cost);
  return std::max(lp.objective(cost), 0.0);
}

}  // namespace cxorder
