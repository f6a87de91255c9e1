#include <doctest.h>

#include <cmath>

#include "symcov/atlas.hpp"

using namespace symcov;

namespace {
constexpr double deg = kTwoPi / 360.0;
}

TEST_CASE("circle atlas matches the 3-chart layout") {
  Atlas A = builtin_atlas("circle");
  REQUIRE(A.charts.size() == 3);
  CHECK(A.charts[0].lo[0] == doctest::Approx(0.0));
  CHECK(A.charts[0].hi[0] == doctest::Approx(150 * deg));
  CHECK(A.charts[1].lo[0] == doctest::Approx(120 * deg));
  CHECK(A.charts[1].hi[0] == doctest::Approx(270 * deg));
  CHECK(A.charts[2].lo[0] == doctest::Approx(240 * deg));
  CHECK(A.charts[2].hi[0] == doctest::Approx(390 * deg));
  // overlaps (0,1), (1,2), (2,0) and nothing else
  CHECK(A.charts_overlap(0, 1));
  CHECK(A.charts_overlap(1, 2));
  CHECK(A.charts_overlap(2, 0));
  CHECK(A.overlaps().size() == 6);  // three pairs, both orientations
  CHECK(A.triples().empty());
  // the (2,0) transition is the -2pi shift
  const Overlap* o = A.find_overlap(2, 0);
  REQUIRE(o != nullptr);
  CHECK(o->shift[0] == doctest::Approx(-kTwoPi));
}

TEST_CASE("builtin atlas parameter validation") {
  AtlasParams p;
  p.charts = 2;
  CHECK_THROWS_AS(builtin_atlas("circle", p), std::invalid_argument);
  CHECK_THROWS_AS(builtin_atlas("nonsense"), std::invalid_argument);
  AtlasParams q;
  q.pad = 0.7;
  CHECK_THROWS_AS(builtin_atlas("circle", q), std::invalid_argument);
}

TEST_CASE("plane is a single chart with no generators") {
  Atlas P = builtin_atlas("plane");
  CHECK(P.charts.size() == 1);
  CHECK(P.generators.empty());
}

TEST_CASE("torus 3x3 has 9 boxes, two generators and genuine triple overlaps") {
  Atlas T = builtin_atlas("torus");
  CHECK(T.charts.size() == 9);
  CHECK(T.generators.size() == 2);
  CHECK(!T.triples().empty());
}

TEST_CASE("canonicalize picks the lowest containing chart") {
  Atlas A = builtin_atlas("circle");
  // declared -2pi transition puts chart-2 points back into chart 0
  auto p = A.canonicalize({2, {6.40}});
  CHECK(p.chart == 0);
  CHECK(p.coords[0] == doctest::Approx(6.40 - kTwoPi));

  auto q = A.canonicalize({0, {0.5}});
  CHECK(q.chart == 0);
  CHECK(q.coords[0] == doctest::Approx(0.5));

  Atlas C = builtin_atlas("cylinder");
  auto r = C.canonicalize({1, {3.0, -2.0}});
  CHECK(r.chart == 1);  // 3.0 rad lies only in chart 1
  CHECK(r.coords[1] == doctest::Approx(-2.0));

  Atlas N = builtin_atlas("annulus");
  CHECK_THROWS_AS(N.canonicalize({0, {0.5, 10.0}}), std::domain_error);
}

TEST_CASE("transitions are mutually inverse on overlaps") {
  for (const char* name : {"circle", "cylinder", "torus", "annulus"}) {
    Atlas A = builtin_atlas(name);
    for (const auto& o : A.overlaps()) {
      const Vec y = o.sample_point();
      const Vec back = A.transition(o.b, o.a, A.transition(o.a, o.b, y));
      CHECK(vdist(back, y) < 1e-12);
    }
  }
}

TEST_CASE("subdivide the circle generator loop") {
  Atlas A = builtin_atlas("circle");
  auto path = A.subdivide([](double t) { return Vec{kTwoPi * t}; }, 64);
  CHECK(path.closed);
  CHECK(path.chart_sequence() == std::vector<int>{0, 1, 2, 0});

  // constant curve: single segment in the canonical chart
  auto c = A.subdivide([](double) { return Vec{0.5}; }, 8);
  CHECK(c.segments.size() == 1);
  CHECK(c.front_chart() == 0);
  CHECK(c.closed);
}

TEST_CASE("subdivide is stable under refinement") {
  Atlas A = builtin_atlas("circle");
  auto a = A.subdivide([](double t) { return Vec{kTwoPi * t}; }, 64);
  auto b = A.subdivide([](double t) { return Vec{kTwoPi * t}; }, 128);
  CHECK(a.reduced_chart_sequence() == b.reduced_chart_sequence());
}

TEST_CASE("torus loop crosses only the theta1 cut") {
  Atlas T = builtin_atlas("torus");
  auto path = T.subdivide([](double t) { return Vec{kTwoPi * t, 0.0}; }, 96);
  CHECK(path.closed);
  for (int c : path.chart_sequence()) CHECK(c < 3);  // bottom chart row only
  CHECK(path.chart_sequence() == std::vector<int>{0, 1, 2, 0});
}

TEST_CASE("subdivide rejects unresolvably coarse sampling") {
  Atlas A = builtin_atlas("circle");
  // two samples on opposite sides of the circle share no chart
  CHECK_THROWS_AS(A.subdivide([](double t) { return Vec{kTwoPi * t}; }, 2), std::domain_error);
}

TEST_CASE("segment endpoints agree across transitions") {
  Atlas A = builtin_atlas("annulus");
  auto path = A.subdivide([](double t) { return Vec{kTwoPi * t, 1.5}; }, 128);
  for (size_t i = 0; i + 1 < path.segments.size(); ++i) {
    const auto& s0 = path.segments[i];
    const auto& s1 = path.segments[i + 1];
    const Vec mapped = A.transition(s0.chart, s1.chart, s0.samples.back());
    CHECK(vdist(mapped, s1.samples.front()) < tol::path);
  }
}

TEST_CASE("product loop homotopy endpoints and branches") {
  // genuine loops: equal values at t = 0 and t = 1
  auto lam = [](double t) { return Vec{std::cos(kTwoPi * t), std::sin(kTwoPi * t)}; };
  auto mu = [](double t) { return Vec{std::sin(kTwoPi * t), 0.5 * std::sin(2 * kTwoPi * t)}; };

  // s = 0: the product loop itself
  for (double t : {0.0, 0.3, 0.77, 1.0}) {
    auto [x, y] = product_loop_homotopy(lam, mu, 0.0, t);
    CHECK(vdist(x, lam(t)) < 1e-15);
    CHECK(vdist(y, mu(t)) < 1e-15);
  }
  // s = 1, t = 0.25: the X factor rests at the base point
  {
    auto [x, y] = product_loop_homotopy(lam, mu, 1.0, 0.25);
    CHECK(vdist(x, lam(0.0)) < 1e-15);
    CHECK(vdist(y, mu(0.5)) < 1e-15);
  }
  // s = 1, t = 0.75: the Y factor rests at the base point
  {
    auto [x, y] = product_loop_homotopy(lam, mu, 1.0, 0.75);
    CHECK(vdist(x, lam(0.5)) < 1e-15);
    CHECK(vdist(y, mu(0.0)) < 1e-15);
  }
  // the whole s = 1 line is the concatenation ({x} x mu) * (lambda x {y})
  for (double t : {0.0, 0.1, 0.49, 0.5, 0.51, 0.9, 1.0}) {
    auto [x, y] = product_loop_homotopy(lam, mu, 1.0, t);
    if (t < 0.5) {
      CHECK(vdist(x, lam(0.0)) < 1e-15);
      CHECK(vdist(y, mu(2 * t)) < 1e-15);
    } else {
      CHECK(vdist(x, lam(2 * t - 1)) < 1e-15);
      CHECK(vdist(y, mu(0.0)) < 1e-15);
    }
  }

  CHECK_THROWS_AS(product_loop_homotopy(lam, mu, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(product_loop_homotopy(lam, mu, 0.5, 1.5), std::invalid_argument);

  // numerical continuity: steps in (s,t) move the image by a bounded amount
  double max_jump = 0;
  const int n = 60;
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      const double s0 = static_cast<double>(i) / (n - 1), t0 = static_cast<double>(j) / (n - 1);
      auto a = product_loop_homotopy(lam, mu, s0, t0);
      auto b = product_loop_homotopy(lam, mu, s0, t0 + 1.0 / (n - 1));
      auto c = product_loop_homotopy(lam, mu, s0 + 1.0 / (n - 1), t0);
      max_jump = std::max({max_jump, vdist(a.first, b.first), vdist(a.second, b.second),
                           vdist(a.first, c.first), vdist(a.second, c.second)});
    }
  // both curves have |velocity| <= 2*pi; grid modulus ~ 4*2pi/n with margin
  CHECK(max_jump < 4.0 * kTwoPi / (n - 1) + 1e-9);
}

TEST_CASE("loop powers and concatenation carry classes") {
  Atlas A = builtin_atlas("circle");
  const Loop& gen = A.generators[0];
  auto sq = A.loop_power(gen, 2);
  CHECK(sq.pi1_class == std::vector<long long>{2});
  CHECK(vdist(sq.curve(1.0), Vec{2 * kTwoPi}) < 1e-12);
  auto rev = A.loop_power(gen, -1);
  CHECK(vdist(rev.curve(1.0), Vec{-kTwoPi}) < 1e-12);
  auto cat = A.loop_concat(gen, rev);
  CHECK(cat.pi1_class == std::vector<long long>{0});
  CHECK(vdist(cat.curve(1.0), cat.curve(0.0)) < 1e-12);
}
