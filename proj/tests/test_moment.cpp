#include <doctest.h>

#include <cmath>
#include <random>

#include "symcov/moment.hpp"
#include "symcov/scenario.hpp"

using namespace symcov;

TEST_CASE("rotation moment is the fibre momentum") {
  Scenario s = builtin_scenario("cylinder_rotation");
  MomentBuildReport rep;
  const auto J = s.make_moment(&rep);
  CHECK(rep.defining_residual < 1e-6);
  CHECK(rep.glueing_residual < 1e-9);

  // single valued: all generator periods vanish
  CHECK(std::fabs(J.period(0).generator_values[0]) < 1e-9);

  // <J> = p + const: differences reproduce momentum differences
  const auto e = s.deck.identity();
  const double j0 = J.branch(0, e, {0.5, 0.0}, 0);
  CHECK(J.branch(0, e, {0.5, 1.7}, 0) - j0 == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(J.branch(0, e, {0.9, 0.0}, 0) - j0 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("boost moment is minus the unrolled angle") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();

  // c(1) = -2 pi
  CHECK(J.period(0).value(s.deck.make({1})) == doctest::Approx(-kTwoPi).epsilon(1e-9));

  // base branch differences: <J_{a,e}> = -theta + const
  const auto e = s.deck.identity();
  const double j0 = J.branch(0, e, {0.2, 0.0}, 0);
  CHECK(J.branch(0, e, {1.4, 0.0}, 0) - j0 == doctest::Approx(-1.2).epsilon(1e-9));
  CHECK(J.branch(0, e, {0.2, 2.0}, 0) - j0 == doctest::Approx(0.0).epsilon(1e-9));

  // branch evaluation: d = 1 shifts by -2 pi
  CHECK(J.branch(0, s.deck.make({1}), {0.2, 0.0}, 0) - J.branch(0, e, {0.2, 0.0}, 0) ==
        doctest::Approx(-kTwoPi).epsilon(1e-12));

  // sheet law cross-checked against -loop integral of the contraction form
  const OneForm beta = induced_contraction_form(*s.action, *s.omega, 0);
  const auto loop = s.atlas.subdivide(s.atlas.generators[0]);
  CHECK(J.period(0).value(s.deck.make({1})) ==
        doctest::Approx(-integrate_path(beta, loop)).epsilon(1e-9));
}

TEST_CASE("plane translations give the angular-momentum-free global map") {
  Scenario s = builtin_scenario("plane_translations");
  const auto J = s.make_moment();
  const auto e = s.deck.identity();
  // <J, A> at (x, y) - at (0,0): components (-y, x)
  const double j0_0 = J.branch(0, e, {0.0, 0.0}, 0);
  const double j1_0 = J.branch(0, e, {0.0, 0.0}, 1);
  CHECK(J.branch(0, e, {1.5, -0.7}, 0) - j0_0 == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(J.branch(0, e, {1.5, -0.7}, 1) - j1_0 == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("moment branch evaluation is basis-linear") {
  Scenario s = builtin_scenario("cylinder_screw");
  const auto J = s.make_moment();
  const auto e = s.deck.identity();
  const Vec y{0.7, 0.3};
  const double both = J.branch_pair(0, e, y, {1.0, 1.0});
  CHECK(both == doctest::Approx(J.branch(0, e, y, 0) + J.branch(0, e, y, 1)).epsilon(1e-12));
}

TEST_CASE("equivariance cocycles") {
  // boost: alpha == 0
  {
    Scenario s = builtin_scenario("cylinder_boost");
    const auto J = s.make_moment();
    GlobalMomentMap G{&J, {}};
    auto lift = s.make_lift();
    auto al = equivariance_cocycle(G, lift, s.sample_cover_points(6));
    const Vec a = al.alpha(GElem{0, {1.3}});
    CHECK(vmaxabs(a) < 1e-9);
    CHECK(vmaxabs(al.alpha(GElem{0, {0.0}})) < 1e-12);  // alpha(e) = 0
  }
  // plane translations: alpha((u,v)) = (-v, u), nonzero, with delta alpha = 0
  {
    Scenario s = builtin_scenario("plane_translations");
    const auto J = s.make_moment();
    GlobalMomentMap G{&J, {}};
    auto lift = s.make_lift();
    auto al = equivariance_cocycle(G, lift, s.sample_cover_points(6));
    const Vec a10 = al.alpha(GElem{0, {1.0, 0.0}});
    CHECK(a10[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a10[1] == doctest::Approx(1.0).epsilon(1e-9));
    const Vec a01 = al.alpha(GElem{0, {0.0, 1.0}});
    CHECK(a01[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(a01[1] == doctest::Approx(0.0).epsilon(1e-9));
    std::vector<std::pair<GElem, GElem>> pairs = {
        {GElem{0, {0.4, -1.2}}, GElem{0, {2.0, 0.3}}},
        {GElem{0, {1.0, 1.0}}, GElem{0, {-0.5, 0.25}}}};
    CHECK(al.cocycle_residual(pairs) < 1e-9);
  }
}

TEST_CASE("local transformation law") {
  Scenario s = builtin_scenario("cylinder_screw");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  auto lift = s.make_lift();
  auto al = equivariance_cocycle(G, lift, s.sample_cover_points(6));
  const auto samples = s.sample_cover_points(8);

  // g = e: the identity transforms trivially
  auto chk_e = local_transform_check(J, lift, al, GElem{0, {0.0, 0.0}}, samples);
  CHECK(chk_e.max_residual < 1e-9);
  CHECK(!chk_e.crossed_cut);

  // a boost-only g stays inside charts
  auto chk_b = local_transform_check(J, lift, al, GElem{0, {0.0, 1.4}}, samples);
  CHECK(chk_b.max_residual < 1e-8);
  CHECK(!chk_b.crossed_cut);

  // a full rotation crosses the cuts (psi_b = generator) and the branch index
  // shifts accordingly
  auto chk_r = local_transform_check(J, lift, al, GElem{0, {kTwoPi, 0.0}}, samples);
  CHECK(chk_r.max_residual < 1e-8);
  CHECK(chk_r.crossed_cut);
  int chart_out = -1;
  CHECK(lift.sheet_shift(GElem{0, {kTwoPi, 0.0}}, {0, {0.5, 0.0}}, &chart_out) ==
        s.deck.make({1}));
}

TEST_CASE("intermediate moment relation for H = 3Z") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  const auto ic = build_intermediate_cover(s.covering, {s.deck.make({3})});
  const auto rep = intermediate_moment_relation(J, ic, 50);
  CHECK(rep.built_from_scratch);
  CHECK(rep.max_residual < 1e-9);

  // degenerate subgroups check through the branch arithmetic
  const auto full = build_intermediate_cover(s.covering, {s.deck.make({1})});
  CHECK(intermediate_moment_relation(J, full, 10).max_residual < 1e-9);
  const auto triv = build_intermediate_cover(s.covering, {}, 2);
  CHECK(intermediate_moment_relation(J, triv, 10).max_residual < 1e-9);
}

TEST_CASE("moment regauge re-indexes branches") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  auto h = CechCochain0::identity(s.deck, static_cast<int>(s.atlas.charts.size()));
  h.values.back() = s.deck.make({1});
  const auto rg = regauge_local_moment_map(J, h);
  CHECK(rg.L_spread < 1e-9);

  // defining equation and glueing for the regauged map
  for (const auto& o : s.atlas.overlaps()) {
    const Vec ya = o.sample_point();
    const Vec yb = vadd(ya, o.shift);
    for (long long d = -1; d <= 1; ++d) {
      const Vec lhs = rg.moment.branch_vec(o.a, s.deck.make({d}), ya);
      const Vec rhs = rg.moment.branch_vec(
          o.b, s.deck.compose(s.deck.make({d}), rg.regauged_cocycle.at(o.a, o.b)), yb);
      CHECK(vdist(lhs, rhs) < 1e-9);
    }
  }
  // J'_{a,d} = J_{a, d k_a} + L with the reported L
  const Vec lhs = rg.moment.branch_vec(2, s.deck.make({1}), {5.0, 0.4});
  const Vec rhs = vadd(J.branch_vec(2, s.deck.compose(s.deck.make({1}), rg.k.at(2)), {5.0, 0.4}),
                       rg.L);
  CHECK(vdist(lhs, rhs) < 1e-9);
}

TEST_CASE("global map ambiguity is an X-constant linear map") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G1{&J, {}};
  // a second normalization: subtract the value at another cover point
  const auto x1 = s.covering.make_point(1, s.deck.make({1}), {2.5, 0.7});
  GlobalMomentMap G2{&J, vscale(-1.0, G1.eval(x1))};
  double spread = 0;
  std::optional<Vec> diff;
  for (const auto& x : s.sample_cover_points(10, 2)) {
    const Vec d = vsub(G1.eval(x), G2.eval(x));
    if (!diff)
      diff = d;
    else
      spread = std::max(spread, vdist(d, *diff));
  }
  CHECK(spread < 1e-9);
}

TEST_CASE("degenerate two-forms are rejected") {
  Atlas cyl = builtin_atlas("cylinder");
  Covering cov = canonical_covering(cyl);
  auto boost = catalog_action("boost", cyl);
  // vanishes along p = 0
  TwoForm degenerate{[](int, const Vec& y) { return y[1]; }, "p dtheta^dp"};
  CHECK_THROWS_AS(build_local_moment_map(boost, degenerate, cov), std::invalid_argument);
}

TEST_CASE("non-symplectic actions are rejected") {
  Atlas cyl = builtin_atlas("cylinder");
  Covering cov = canonical_covering(cyl);
  // fibre scaling is not area preserving, so its contraction form is not
  // closed
  GroupAction bad;
  bad.model.dim = 1;
  bad.model.finalize();
  bad.map_model = [](const GElem& g, const Vec& y) {
    return Vec{y[0], y[1] * std::exp(g.param[0])};
  };
  TwoForm omega = TwoForm::constant(-1.0);
  CHECK_THROWS_AS(build_local_moment_map(bad, omega, cov), std::domain_error);
}
