#include <doctest.h>

#include <random>

#include "symcov/covering.hpp"

using namespace symcov;

namespace {
Covering circle_cover() { return canonical_covering(builtin_atlas("circle")); }
}  // namespace

TEST_CASE("projection forgets deck labels") {
  Covering cov = circle_cover();
  const auto x = cov.make_point(0, cov.deck.make({5}), {0.3});
  const auto p = cov.project(x);
  CHECK(p.chart == 0);
  CHECK(p.coords[0] == doctest::Approx(0.3));

  // deck-equivalent representations project equally
  const auto y = cov.rechart(cov.make_point(2, cov.deck.make({0}), {6.40}), 0);
  CHECK(cov.project(y).chart == 0);
  CHECK(cov.project(y).coords[0] == doctest::Approx(6.40 - kTwoPi));

  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    const auto d = cov.deck.make({static_cast<long long>(rng() % 9) - 4});
    const auto q = cov.make_point(1, cov.deck.make({1}), {2.5});
    CHECK(vdist(cov.project(cov.deck_act(d, q)).coords, cov.project(q).coords) < 1e-15);
  }
}

TEST_CASE("deck action is a free left action") {
  Covering cov = circle_cover();
  const auto x = cov.make_point(0, cov.deck.make({0}), {0.7});
  CHECK(cov.same_point(cov.deck_act(cov.deck.identity(), x), x));
  const auto moved = cov.deck_act(cov.deck.make({1}), x);
  CHECK(moved.deck == cov.deck.make({1}));
  CHECK(!cov.same_point(moved, x));  // free: no fixed points for d != e

  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    const auto d1 = cov.deck.make({static_cast<long long>(rng() % 7) - 3});
    const auto d2 = cov.deck.make({static_cast<long long>(rng() % 7) - 3});
    const auto lhs = cov.deck_act(cov.deck.compose(d1, d2), x);
    const auto rhs = cov.deck_act(d1, cov.deck_act(d2, x));
    CHECK(cov.same_point(lhs, rhs));
    CHECK(lhs.deck == rhs.deck);
  }
}

TEST_CASE("path lifting on the circle") {
  Covering cov = circle_cover();
  const Atlas& A = cov.atlas;
  const auto start = cov.make_point(0, cov.deck.make({0}), {0.0});

  const auto gen = A.subdivide(A.generators[0]);
  const auto lifted = lift_path(cov, gen, start);
  CHECK(lifted.endpoint.chart == 0);
  CHECK(lifted.endpoint.deck == cov.deck.make({1}));
  CHECK(lifted.endpoint.coords[0] == doctest::Approx(0.0));

  // constant path lifts to a constant
  const auto cpath = A.subdivide([](double) { return Vec{0.4}; }, 8);
  const auto cstart = cov.make_point(0, cov.deck.make({2}), {0.4});
  const auto clift = lift_path(cov, cpath, cstart);
  CHECK(clift.endpoint.deck == cov.deck.make({2}));
  CHECK(clift.endpoint.coords[0] == doctest::Approx(0.4));
}

TEST_CASE("reverse traversal accumulates the inverse deck element") {
  Covering cov = circle_cover();
  const Atlas& A = cov.atlas;
  const auto start = cov.make_point(0, cov.deck.make({0}), {0.0});
  const auto rev = A.subdivide(A.loop_power(A.generators[0], -1));
  CHECK(cov.canonical(lift_path(cov, rev, start).endpoint).deck == cov.deck.make({-1}));
  CHECK(loop_deck_element(cov, rev, start) == cov.deck.make({-1}));
}

TEST_CASE("loop deck element equals holonomy") {
  Covering cov = circle_cover();
  const Atlas& A = cov.atlas;
  const auto base = cov.base;
  for (long long n : {1LL, 2LL, -1LL, 3LL}) {
    const auto loop = A.subdivide(A.loop_power(A.generators[0], n));
    CHECK(loop_deck_element(cov, loop, base) == holonomy(A, cov.cocycle, loop));
  }
  // a small null-homotopic loop inside one chart
  const auto small = A.subdivide([](double t) { return Vec{0.5 + 0.2 * std::sin(kTwoPi * t)}; },
                                 64);
  CHECK(loop_deck_element(cov, small, cov.make_point(0, cov.deck.identity(), {0.5})) ==
        cov.deck.identity());

  Covering tor = canonical_covering(builtin_atlas("torus"));
  const auto loop2 = tor.atlas.subdivide(tor.atlas.generators[1]);
  CHECK(loop_deck_element(tor, loop2, tor.base) == tor.deck.make({0, 1}));
}

TEST_CASE("lifts agreeing at one point agree everywhere") {
  Covering cov = circle_cover();
  const Atlas& A = cov.atlas;
  const auto start = cov.make_point(0, cov.deck.make({0}), {0.0});
  auto curve = [](double t) { return Vec{kTwoPi * t * 1.37}; };
  const auto a = lift_path(cov, A.subdivide(curve, 97), start);
  const auto b = lift_path(cov, A.subdivide(curve, 256), start);
  CHECK(a.endpoint.deck == b.endpoint.deck);
  CHECK(cov.atlas.model_distance(a.endpoint.coords, b.endpoint.coords) < tol::path);
}

TEST_CASE("lift start must sit in the fibre over the path start") {
  Covering cov = circle_cover();
  const auto path = cov.atlas.subdivide(cov.atlas.generators[0]);
  CHECK_THROWS_AS(lift_path(cov, path, cov.make_point(0, cov.deck.identity(), {0.5})),
                  std::invalid_argument);
}

TEST_CASE("deck transitivity on fibres within a window") {
  Covering cov = circle_cover();
  for (long long d1 = -3; d1 <= 3; ++d1)
    for (long long d2 = -3; d2 <= 3; ++d2) {
      const auto x = cov.make_point(1, cov.deck.make({d1}), {2.2});
      const auto y = cov.make_point(1, cov.deck.make({d2}), {2.2});
      const auto d = deck_between(cov, x, y);
      CHECK(cov.same_point(cov.deck_act(d, x), y));
    }
}

TEST_CASE("non-simply-connected predicate") {
  Covering cov = circle_cover();
  CHECK(cov.simply_connected_cover());
  CechCocycle1 t = CechCocycle1::trivial(cov.deck);
  const auto triv = covering_from_cocycle(cov.atlas, cov.deck, t);
  CHECK(!triv.simply_connected_cover());
}

TEST_CASE("intermediate cover of the cylinder by 3Z") {
  Covering cov = canonical_covering(builtin_atlas("cylinder"));
  const auto H3 = build_intermediate_cover(cov, {cov.deck.make({3})});
  CHECK(H3.finite_index);
  REQUIRE(H3.coset_reps.size() == 3);
  CHECK(H3.coset_reps[0] == cov.deck.make({0}));
  CHECK(H3.coset_reps[2] == cov.deck.make({2}));
  CHECK(H3.in_subgroup(cov.deck.make({-6})));
  CHECK(!H3.in_subgroup(cov.deck.make({4})));
  CHECK(H3.coset_rep(cov.deck.make({7})) == cov.deck.make({1}));
  CHECK(H3.subgroup_part(cov.deck.make({7})) == cov.deck.make({6}));

  // q o r = p: projecting through Z forgets exactly the deck label
  std::mt19937_64 rng(4);
  for (int it = 0; it < 20; ++it) {
    const auto x = cov.make_point(1, cov.deck.make({static_cast<long long>(rng() % 9) - 4}),
                                  {2.5, 0.3});
    const auto z = H3.r_project(x);
    const auto y = H3.q_project(z);
    CHECK(vdist(y.coords, cov.project(x).coords) < 1e-15);
  }

  // the trivialization identity j_{a,[d0]}(h, k_a([d0],y)) = i_a(h*d0, y)
  const auto z = H3.r_project(cov.make_point(0, cov.deck.make({7}), {0.5, 1.0}));
  const auto xj = H3.j_trivialization(cov.deck.make({6}), z);
  CHECK(xj.deck == cov.deck.make({7}));

  // induced cocycle values lie in H and satisfy the trivialization identity:
  // re-expressing j_{a,[d0]}(h, z) in chart b matches j_{b,[d0']}(h ghat, z')
  for (const auto& o : cov.atlas.overlaps()) {
    for (const auto& d0 : H3.coset_reps) {
      const auto d0b = H3.coset_rep(cov.deck.compose(d0, cov.cocycle.at(o.a, o.b)));
      const auto g = H3.ghat(o.a, d0, o.b, d0b);
      REQUIRE(g.has_value());
      CHECK(H3.in_subgroup(*g));
      const auto h = cov.deck.make({-3});
      const Vec ya = o.sample_point();
      const auto xa = H3.j_trivialization(h, {o.a, d0, ya});
      const auto via_b =
          H3.j_trivialization(cov.deck.compose(h, *g), {o.b, d0b, vadd(ya, o.shift)});
      CHECK(cov.same_point(cov.rechart(xa, o.b), via_b));
      CHECK(cov.rechart(xa, o.b).deck == via_b.deck);
    }
  }
}

TEST_CASE("degenerate subgroups") {
  Covering cov = circle_cover();
  // H = D: one coset
  const auto full = build_intermediate_cover(cov, {cov.deck.make({1})});
  CHECK(full.coset_reps.size() == 1);
  // H = {e}: Z = X, cosets are the labels themselves (within the window)
  const auto triv = build_intermediate_cover(cov, {}, 2);
  CHECK(!triv.finite_index);
  CHECK(triv.coset_reps.size() == 5);
  CHECK(triv.coset_rep(cov.deck.make({-2})) == cov.deck.make({-2}));
}

TEST_CASE("rank-2 subgroup machinery") {
  Covering tor = canonical_covering(builtin_atlas("torus"));
  const auto ic = build_intermediate_cover(tor, {tor.deck.make({3, 0}), tor.deck.make({0, 1})});
  REQUIRE(ic.axis_indices().has_value());
  CHECK(*ic.axis_indices() == std::vector<long long>{3, 1});
  CHECK(ic.coset_reps.size() == 3);
  CHECK(ic.in_subgroup(tor.deck.make({-3, 5})));
  CHECK(!ic.in_subgroup(tor.deck.make({2, 0})));

  // a skew subgroup is not axis-aligned
  const auto skew = build_intermediate_cover(tor, {tor.deck.make({1, 1})}, 2);
  CHECK(!skew.axis_indices().has_value());
  CHECK(skew.in_subgroup(tor.deck.make({4, 4})));
  CHECK(!skew.in_subgroup(tor.deck.make({1, 2})));
}

TEST_CASE("cotangent maps") {
  Atlas A = builtin_atlas("circle");
  Covering cov = canonical_covering(A);

  // identity extension
  const CotangentPoint x{{0, {0.5}}, {1.7}};
  const auto ix = cotangent_map(A, identity_diffeo(1), x);
  CHECK(ix.base.chart == 0);
  CHECK(ix.covector[0] == doctest::Approx(1.7));

  // *p on T*R -> T*S1: ((7.0), 2.5) -> ((7.0 - 2pi), 2.5)
  const auto down = cotangent_project(cov, {7.0}, {2.5});
  CHECK(down.base.chart == 0);
  CHECK(down.base.coords[0] == doctest::Approx(7.0 - kTwoPi));
  CHECK(down.covector[0] == doctest::Approx(2.5));

  // reflections flip covector components ((f^-1)*p with J = -1)
  Mat rj(1, 1);
  rj(0, 0) = -1.0;
  Diffeo refl{[](const Vec& y) { return Vec{-y[0]}; }, [](const Vec& y) { return Vec{-y[0]}; },
              rj};
  const auto rx = cotangent_map(A, refl, x);
  CHECK(rx.covector[0] == doctest::Approx(-1.7));

  // *(fg) = (*f)(*g) numerically
  Diffeo rot{[](const Vec& y) { return Vec{y[0] + 1.1}; },
             [](const Vec& y) { return Vec{y[0] - 1.1}; }, Mat::identity(1)};
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, kTwoPi), pd(-2, 2);
  for (int it = 0; it < 25; ++it) {
    const CotangentPoint q{A.canonicalize({0, {u(rng) * 0.2}}), {pd(rng)}};
    const auto fg = cotangent_map(A, compose_diffeo(rot, refl), q);
    const auto f_g = cotangent_map(A, rot, cotangent_map(A, refl, q));
    CHECK(A.model_distance(fg.base.coords, f_g.base.coords) < 1e-12);
    CHECK(vdist(fg.covector, f_g.covector) < 1e-12);
  }
}

TEST_CASE("canonical form pullback and local symplectomorphism") {
  // (*p)* theta = Theta: pairings agree at matched points/vectors, and the
  // finite-difference exterior derivative of the pairing difference vanishes.
  Covering cov = canonical_covering(builtin_atlas("circle"));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(-8.0, 8.0), pd(-2, 2);
  double pairing = 0;
  for (int it = 0; it < 100; ++it) {
    const double t = th(rng), p = pd(rng);
    const Vec vb{pd(rng)};
    const Vec vc{pd(rng)};
    const auto down = cotangent_project(cov, {t}, {p});
    const CotangentPoint up{{0, {t}}, {p}};
    pairing = std::max(pairing, std::fabs(canonical_one_form_pairing(down, vb, vc) -
                                          canonical_one_form_pairing(up, vb, vc)));
  }
  CHECK(pairing < 1e-10);

  // (*p)*(d theta_can) = d Theta_can: take the actual projection map on
  // (theta-tilde, p), differentiate it by finite differences, and compare the
  // pulled-back symplectic pairing with the upstairs one.
  auto omega_pair = [](const Vec& v, const Vec& w) { return v[1] * w[0] - v[0] * w[1]; };
  auto starp = [&](const Vec& u) {  // T*R -> T*S^1 in chart coordinates
    const auto down = cotangent_project(cov, {u[0]}, {u[1]});
    return Vec{down.base.coords[0], down.covector[0]};
  };
  double sympl = 0;
  const double h = 1e-5;
  for (int it = 0; it < 50; ++it) {
    Vec u{th(rng), pd(rng)};
    // keep the stencil away from the canonical-chart switch points
    {
      double w = std::fmod(u[0], kTwoPi);
      if (w < 0) w += kTwoPi;
      for (double cut : {0.0, 150.0 * kTwoPi / 360.0, 270.0 * kTwoPi / 360.0, kTwoPi})
        if (std::fabs(w - cut) < 1e-3) u[0] += 0.05;
    }
    Mat J(2, 2);
    for (int c = 0; c < 2; ++c) {
      Vec up = u, um = u;
      up[static_cast<size_t>(c)] += h;
      um[static_cast<size_t>(c)] -= h;
      const Vec fp = starp(up), fm = starp(um);
      for (int r = 0; r < 2; ++r)
        J(r, c) = (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2 * h);
    }
    const Vec v{pd(rng), pd(rng)}, w{pd(rng), pd(rng)};
    sympl = std::max(sympl, std::fabs(omega_pair(J.apply(v), J.apply(w)) - omega_pair(v, w)));
  }
  CHECK(sympl < 1e-6);
}
