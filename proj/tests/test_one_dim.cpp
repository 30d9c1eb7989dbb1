#include <gtest/gtest.h>

#include <cmath>

#include "cxorder/discrete_wot.hpp"
#include "cxorder/error.hpp"
#include "cxorder/one_dim.hpp"
#include "test_support.hpp"

namespace {

using namespace cxorder;
using namespace cxorder::testing;

DiscreteMeasure m1(Vector pts, Vector w) { return DiscreteMeasure::from_1d(pts, w); }
DiscreteMeasure delta(double x) { return m1({x}, {1.0}); }

void expect_same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         double tol = 1e-12) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.point(i)[0], b.point(i)[0], tol);
    EXPECT_NEAR(a.weight(i), b.weight(i), tol);
  }
}

TEST(Quantile, Examples) {
  const QuantileFunction q0 = quantile_of(delta(0.0));
  EXPECT_EQ(q0.breaks, (Vector{0, 1}));
  EXPECT_EQ(q0.values, (Vector{0}));

  const QuantileFunction q1 = quantile_of(m1({1, -1}, {0.5, 0.5}));
  EXPECT_EQ(q1.breaks, (Vector{0, 0.5, 1}));
  EXPECT_EQ(q1.values, (Vector{-1, 1}));
  EXPECT_EQ(q1(0.5), -1.0);  // left-continuous
  EXPECT_EQ(q1(0.50001), 1.0);

  const QuantileFunction q2 = quantile_of(m1({0, 2}, {0.25, 0.75}));
  EXPECT_EQ(q2.breaks, (Vector{0, 0.25, 1}));
  EXPECT_EQ(q2.values, (Vector{0, 2}));
}

TEST(Quantile, RejectsMultivariate) {
  const DiscreteMeasure m(Matrix{{0, 0}, {1, 1}}, Vector{0.5, 0.5});
  try {
    quantile_of(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(CommonPartition, MergesNearlyEqualBreaks) {
  const QuantileFunction a{{0, 0.5, 1}, {0, 1}};
  const QuantileFunction b{{0, 0.5 + 1e-16, 0.75, 1}, {2, 3, 4}};
  const CommonPartition p = common_partition(a, b);
  EXPECT_EQ(p.breaks.size(), 4u);
  EXPECT_EQ(p.mu_values, (Vector{0, 1, 1}));
  EXPECT_EQ(p.nu_values, (Vector{2, 3, 4}));
}

TEST(GFunction, Examples) {
  const DiscreteMeasure sym = m1({-1, 1}, {0.5, 0.5});
  const GFunction zero = g_function(sym, sym);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);

  // G(u) = -u on [0, 1/2], u - 1 on [1/2, 1].
  const GFunction v = g_function(sym, delta(0.0));
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    EXPECT_NEAR(v(u), u <= 0.5 ? -u : u - 1.0, 1e-15);
  }
  EXPECT_NEAR(v.slope(0), -1.0, 1e-15);

  const GFunction tent = g_function(delta(0.0), sym);
  for (double u : {0.1, 0.5, 0.8}) EXPECT_NEAR(tent(u), std::min(u, 1.0 - u), 1e-15);
}

TEST(GFunction, EndpointIsMeanDifference) {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const DiscreteMeasure mu = random_measure_1d(rng, 8);
    const DiscreteMeasure nu = random_measure_1d(rng, 8);
    const GFunction g = g_function(mu, nu);
    EXPECT_EQ(g.nodes.front(), 0.0);
    EXPECT_EQ(g.values.front(), 0.0);
    EXPECT_NEAR(g.values.back(), mu.barycenter()[0] - nu.barycenter()[0], 1e-14 * 8);
  }
}

TEST(ConvexHull, Examples) {
  const GFunction convex{{0, 0.5, 1}, {0, -0.5, 0}};
  const GFunction h = lower_convex_hull(convex);
  EXPECT_EQ(h.nodes, convex.nodes);
  EXPECT_EQ(h.values, convex.values);

  const GFunction tent{{0, 0.5, 1}, {0, 0.5, 0}};
  const GFunction c = lower_convex_hull(tent);
  for (double u : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(c(u), 0.0, 1e-15);
}

TEST(ConvexHull, GreatestConvexMinorantOnRandomInput) {
  Rng rng(62);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = random_dim(rng, 2, 30);
    GFunction g;
    for (std::size_t i = 0; i < n; ++i) {
      g.nodes.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
      g.values.push_back(i == 0 ? 0.0 : x(rng));
    }
    const GFunction h = lower_convex_hull(g);
    for (std::size_t k = 1; k + 1 < h.nodes.size(); ++k) {
      EXPECT_LE(h.slope(k - 1), h.slope(k) + 1e-12);
    }
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LE(h(g.nodes[i]), g.values[i] + 1e-12);
    }
    // Hull vertices lie on G.
    for (std::size_t k = 0; k < h.nodes.size(); ++k) {
      EXPECT_NEAR(h.values[k], g(h.nodes[k]), 1e-12);
    }
  }
}

TEST(Project1d, Examples) {
  const DiscreteMeasure sym = m1({-1, 1}, {0.5, 0.5});
  const Projection1d a = project_1d(sym, delta(0.0));
  expect_same_measure(a.I, delta(0.0));
  expect_same_measure(a.J, sym);

  const Projection1d b = project_1d(delta(0.0), sym);
  expect_same_measure(b.I, delta(0.0));
  expect_same_measure(b.J, sym);

  const DiscreteMeasure two = m1({0, 2}, {0.5, 0.5});
  const DiscreteMeasure at1 = delta(1.0);
  // Centered version of the (0,2) example: nu at the mean of mu.
  const Projection1d c = project_1d(two, at1);
  expect_same_measure(c.I, at1);
  expect_same_measure(c.J, two);
  EXPECT_NEAR(w2_squared_1d(two, c.I), 1.0, 1e-14);
  EXPECT_NEAR(w2_squared_1d(at1, c.J), 1.0, 1e-14);

  const Projection1d same = project_1d(two, two);
  expect_same_measure(same.I, two);
  expect_same_measure(same.J, two);
  EXPECT_EQ(same.distance2, 0.0);
}

TEST(Project1d, UncenteredExample) {
  // mu = (delta_0 + delta_2)/2, nu = delta_0: I = delta_0, and W2^2 = 2 on
  // both sides of the distance equality.
  const DiscreteMeasure mu = m1({0, 2}, {0.5, 0.5});
  const Projection1d p = project_1d(mu, delta(0.0));
  expect_same_measure(p.I, delta(0.0));
  expect_same_measure(p.J, mu);
  EXPECT_NEAR(w2_squared_1d(mu, p.I), 2.0, 1e-14);
  EXPECT_NEAR(w2_squared_1d(delta(0.0), p.J), 2.0, 1e-14);
}

TEST(Project1d, PropertiesOnRandomPairs) {
  Rng rng(63);
  for (int trial = 0; trial < 300; ++trial) {
    const DiscreteMeasure mu = random_measure_1d(rng, 8);
    const DiscreteMeasure nu = random_measure_1d(rng, 8);
    const Projection1d p = project_1d(mu, nu);
    const double scale = 1.0 + mu.second_moment() + nu.second_moment();
    for (const QuantileFunction* q : {&p.quantile_I, &p.quantile_J}) {
      for (std::size_t k = 1; k < q->values.size(); ++k) {
        EXPECT_LE(q->values[k - 1], q->values[k]);
      }
    }
    EXPECT_NEAR(p.I.barycenter()[0], nu.barycenter()[0], 1e-12 * scale);
    EXPECT_NEAR(p.J.barycenter()[0], mu.barycenter()[0], 1e-12 * scale);
    EXPECT_NEAR(p.I.second_moment() + p.J.second_moment(),
                mu.second_moment() + nu.second_moment(), 1e-12 * scale);
    EXPECT_NEAR(w2_squared_1d(mu, p.J), p.distance2, 1e-12 * scale);
    EXPECT_NEAR(w2_squared_1d(nu, p.I), p.distance2, 1e-12 * scale);
    EXPECT_NEAR(w2_squared_1d(mu, p.I), w2_squared_1d(nu, p.J), 1e-12 * scale);
    EXPECT_TRUE(check_convex_order_1d(p.I, nu, 1e-10 * scale));
    EXPECT_TRUE(check_convex_order_1d(mu, p.J, 1e-10 * scale));
  }
}

TEST(Project1d, OrderedPairsAreFixed) {
  Rng rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const DiscreteMeasure nu = random_measure_1d(rng, 6);
    const DiscreteMeasure mu = delta(nu.barycenter()[0]);  // mu <=cx nu
    const Projection1d p = project_1d(mu, nu);
    EXPECT_NEAR(w2_squared_1d(p.I, mu), 0.0, 1e-20);
    EXPECT_NEAR(w2_squared_1d(p.J, nu), 0.0, 1e-20);
  }
}

TEST(W2Quantiles, HandValues) {
  EXPECT_NEAR(w2_squared_1d(delta(0.0), m1({-1, 1}, {0.5, 0.5})), 1.0, 1e-15);
  EXPECT_NEAR(w2_squared_1d(m1({0, 1}, {0.5, 0.5}), m1({2, 3}, {0.5, 0.5})), 4.0, 1e-15);
}

TEST(ConvexOrder, Examples) {
  const DiscreteMeasure sym = m1({-1, 1}, {0.5, 0.5});
  EXPECT_TRUE(check_convex_order_1d(delta(0.0), sym));
  EXPECT_FALSE(check_convex_order_1d(sym, delta(0.0)));
  EXPECT_TRUE(check_convex_order_1d(sym, sym));
  // Different means are never ordered.
  EXPECT_FALSE(check_convex_order_1d(delta(0.1), sym));
}

}  // namespace
