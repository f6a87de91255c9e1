#include <doctest.h>

#include <cmath>
#include <random>

#include "symcov/actions.hpp"

using namespace symcov;

namespace {
Covering circle_cover() { return canonical_covering(builtin_atlas("circle")); }
Covering cylinder_cover() { return canonical_covering(builtin_atlas("cylinder")); }
}  // namespace

TEST_CASE("catalog actions act as advertised") {
  Atlas circle = builtin_atlas("circle");
  Atlas cyl = builtin_atlas("cylinder");

  auto rot = catalog_action("rotation", circle);
  const auto p1 = rot.act(circle, GElem{0, {kTwoPi / 4}}, {0, {0.0}});
  CHECK(circle.model_distance(p1.coords, {kTwoPi / 4}) < 1e-12);

  auto boost = catalog_action("boost", cyl);
  const auto p2 = boost.act(cyl, GElem{0, {1.0}}, {0, {1.0, 0.0}});
  CHECK(vdist(p2.coords, {1.0, 1.0}) < 1e-12);

  auto ht = catalog_action("half_turn", circle);
  const auto p3 = ht.act(circle, GElem{1, {}}, {0, {0.3}});
  CHECK(circle.model_distance(p3.coords, {0.3 + kTwoPi / 2}) < 1e-12);

  auto refl = catalog_action("reflection", circle);
  const auto p4 = refl.act(circle, GElem{1, {}}, {0, {0.3}});
  CHECK(circle.model_distance(p4.coords, {-0.3}) < 1e-12);
}

TEST_CASE("action validation") {
  Atlas cyl = builtin_atlas("cylinder");
  TwoForm omega = TwoForm::constant(-1.0);
  for (const char* t : {"rotation", "boost", "screw"}) {
    auto a = catalog_action(t, cyl);
    const auto v = validate_action(cyl, a, &omega);
    CHECK(v.pass);
  }
}

TEST_CASE("obstruction detection") {
  Covering cov = circle_cover();
  auto rot = catalog_action("rotation", cov.atlas, /*circle_group=*/true);

  // the S^1 parameter loop sweeps the generator loop of the base
  const auto d = action_obstruction(
      rot, cov, [](double t) { return Vec{kTwoPi * t}; }, cov.atlas.base_point());
  CHECK(d == cov.deck.make({1}));

  // contractible parameter loops are unobstructed
  const auto e = action_obstruction(
      rot, cov, [](double t) { return Vec{0.8 * std::sin(kTwoPi * t)}; }, cov.atlas.base_point());
  CHECK(e == cov.deck.identity());

  // boosts never leave the fibre direction
  Covering cyl = cylinder_cover();
  auto boost = catalog_action("boost", cyl.atlas);
  const auto b = action_obstruction(
      boost, cyl, [](double t) { return Vec{std::sin(kTwoPi * t)}; }, cyl.atlas.base_point());
  CHECK(b == cyl.deck.identity());

  // path independence: two homotopic parameter paths produce the same element
  const auto w1 = action_obstruction(
      rot, cov, [](double t) { return Vec{kTwoPi * t}; }, cov.atlas.base_point());
  const auto w2 = action_obstruction(
      rot, cov,
      [](double t) { return Vec{kTwoPi * (t + 0.15 * std::sin(kTwoPi * t))}; },
      cov.atlas.base_point(), 512);
  CHECK(w1 == w2);
}

TEST_CASE("an obstructed action refuses to lift") {
  Covering cov = circle_cover();
  auto rot_s1 = catalog_action("rotation", cov.atlas, /*circle_group=*/true);
  CHECK_THROWS_AS(LiftedAction(rot_s1, cov), std::domain_error);
}

TEST_CASE("lifting the identity-component actions") {
  Covering cyl = cylinder_cover();
  auto boost = catalog_action("boost", cyl.atlas);
  LiftedAction lift(boost, cyl);

  // boost by 1 moves only the fibre coordinate
  const auto x = cyl.make_point(0, cyl.deck.make({2}), {0.5, 0.0});
  const auto y = lift.apply(GElem{0, {1.0}}, x);
  CHECK(y.chart == 0);
  CHECK(y.deck == cyl.deck.make({2}));
  CHECK(vdist(y.coords, {0.5, 1.0}) < tol::path);

  // (L2): e acts as the identity
  const auto z = lift.apply(GElem{0, {0.0}}, x);
  CHECK(cyl.same_point(z, x));

  // rotation by a full turn shifts the deck label
  auto rot = catalog_action("rotation", cyl.atlas);
  LiftedAction rlift(rot, cyl);
  const auto w = rlift.apply(GElem{0, {kTwoPi}}, x);
  CHECK(w.deck == cyl.deck.make({3}));
  CHECK(cyl.atlas.model_distance(w.coords, x.coords) < tol::path);
}

TEST_CASE("(L1): the lift projects onto the action") {
  Covering cyl = cylinder_cover();
  auto rot = catalog_action("rotation", cyl.atlas);
  LiftedAction lift(rot, cyl);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> par(-5, 5);
  for (int it = 0; it < 15; ++it) {
    const GElem g{0, {par(rng)}};
    const auto x = cyl.make_point(1, cyl.deck.make({static_cast<long long>(rng() % 5) - 2}),
                                  {2.5, par(rng) * 0.3});
    const auto up = cyl.project(lift.apply(g, x));
    const auto down = rot.act(cyl.atlas, g, cyl.project(x));
    CHECK(cyl.atlas.model_distance(up.coords, down.coords) < tol::path);
  }
}

TEST_CASE("lifted actions are canonical transformations") {
  // Phi_hat* Omega = Omega by finite differences in cover-model coordinates.
  Covering cyl = cylinder_cover();
  auto rot = catalog_action("rotation", cyl.atlas);
  LiftedAction lift(rot, cyl);
  const GElem g{0, {1.3}};
  auto map_model = [&](const Vec& u) { return cyl.to_model(lift.apply(g, cyl.from_model(u))); };
  const double h = 1e-5;
  double resid = 0;
  for (const Vec u : {Vec{0.4, 0.2}, Vec{2.8, -1.0}, Vec{5.9, 0.7}}) {
    Mat J(2, 2);
    for (int c = 0; c < 2; ++c) {
      Vec up = u, um = u;
      up[static_cast<size_t>(c)] += h;
      um[static_cast<size_t>(c)] -= h;
      const Vec fp = map_model(up), fm = map_model(um);
      for (int r = 0; r < 2; ++r)
        J(r, c) = (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2 * h);
    }
    resid = std::max(resid, std::fabs(J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0) - 1.0));
  }
  CHECK(resid < 1e-6);
}

TEST_CASE("half-turn extension data") {
  Covering cov = circle_cover();
  auto ht = catalog_action("half_turn", cov.atlas);
  LiftedAction lift(ht, cov, {std::nullopt, ComponentLift{"half_turn", 0}});
  const GElem sigma{1, {}};
  const GElem e{0, {}};

  CHECK(gamma_cocycle(lift, e, e) == cov.deck.identity());
  CHECK(gamma_cocycle(lift, sigma, sigma) == cov.deck.make({1}));
  CHECK(hom_equal(cov.deck, cov.deck, b_conjugation(lift, sigma), identity_hom(cov.deck)));
}

TEST_CASE("reflection extension data") {
  Covering cov = circle_cover();
  auto refl = catalog_action("reflection", cov.atlas);
  LiftedAction lift(refl, cov, {std::nullopt, ComponentLift{"reflection", 0}});
  const GElem sigma{1, {}};

  CHECK(gamma_cocycle(lift, sigma, sigma) == cov.deck.identity());
  const auto b = b_conjugation(lift, sigma);
  CHECK(hom_apply(cov.deck, cov.deck, b, cov.deck.make({1})) == cov.deck.make({-1}));
}

TEST_CASE("extension composition and inverses") {
  Covering cov = circle_cover();
  auto ht = catalog_action("half_turn", cov.atlas);
  LiftedAction lift(ht, cov, {std::nullopt, ComponentLift{"half_turn", 0}});
  auto ctx = make_extension_context(lift);
  const auto& D = cov.deck;
  const GElem sigma{1, {}};
  const GElem e{0, {}};

  // (e, sigma)(e, sigma) = (Gamma(sigma,sigma), e) = (1, e)
  const ExtensionElement u{D.identity(), sigma};
  const auto uu = extension_compose(ctx, u, u);
  CHECK(uu.deck == D.make({1}));
  CHECK(uu.g.comp == 0);

  // deck-only elements compose in D
  const ExtensionElement a{D.make({2}), e}, b{D.make({-5}), e};
  const auto ab = extension_compose(ctx, a, b);
  CHECK(ab.deck == D.make({-3}));

  // u * u^-1 = (e, e), and the two closed inverse formulas agree:
  // (gamma,g)^-1 = (b(g)^-1[gamma^-1 Gamma(g,g^-1)^-1], g^-1)
  //             = ([b(g^-1)gamma Gamma(g^-1,g)]^-1, g^-1)
  for (const auto& w : {u, a, extension_compose(ctx, a, u)}) {
    const auto wi = extension_inverse(ctx, w);
    const auto prod = extension_compose(ctx, w, wi);
    CHECK(prod.deck == D.identity());
    CHECK(prod.g.comp == 0);
    const auto gi = g_inverse(ht.model, w.g);
    const auto alt_deck = D.inverse(D.compose(
        hom_apply(D, D, ctx.b_comp[static_cast<size_t>(gi.comp)], w.deck),
        ctx.gamma_comp[static_cast<size_t>(gi.comp)][static_cast<size_t>(w.g.comp)]));
    CHECK(wi.deck == alt_deck);
  }

  // the extension acts on the cover compatibly with the covering projection
  const auto x = cov.make_point(1, D.make({1}), {2.7});
  const auto ux = extension_act(ctx, u, x);
  const auto down = cov.project(ux);
  const auto want = ht.act(cov.atlas, sigma, cov.project(x));
  CHECK(cov.atlas.model_distance(down.coords, want.coords) < tol::path);
}

TEST_CASE("alternate lifts differ by a coboundary") {
  Covering cov = circle_cover();
  auto ht = catalog_action("half_turn", cov.atlas);
  LiftedAction lift(ht, cov, {std::nullopt, ComponentLift{"half_turn", 0}});
  // sigma-hat' : x -> x + 3 pi, i.e. deck offset 1
  LiftedAction alt = with_alternate_component_lift(lift, 1, 1);
  const GElem sigma{1, {}};
  const GElem e{0, {}};

  CHECK(lift_difference(lift, alt, sigma) == cov.deck.make({1}));
  CHECK(lift_difference(lift, alt, e) == cov.deck.identity());

  // Gamma' = Gamma + delta(eta), evaluated on the component pairs
  auto ctx = make_extension_context(lift);
  auto ctx2 = make_extension_context(alt);
  DValuedCochains dc{&ctx};
  auto eta = [&](const GElem& g) { return lift_difference(lift, alt, g); };
  auto deta = dc.delta1(eta);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const GElem ga{a, {}}, gb{b, {}};
      const auto want = cov.deck.compose(
          ctx.gamma_comp[static_cast<size_t>(a)][static_cast<size_t>(b)], deta(ga, gb));
      CHECK(ctx2.gamma_comp[static_cast<size_t>(a)][static_cast<size_t>(b)] == want);
    }
  // sanity: the alternate lift really changed Gamma(sigma,sigma) to 3
  CHECK(ctx2.gamma_comp[1][1] == cov.deck.make({3}));
}

TEST_CASE("connected-group lifts preserve the group law") {
  Covering cyl = cylinder_cover();
  auto screw = catalog_action("screw", cyl.atlas);
  LiftedAction lift(screw, cyl);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> par(-3, 3);
  for (int it = 0; it < 10; ++it) {
    const GElem g{0, {par(rng), par(rng)}}, h{0, {par(rng), par(rng)}};
    const auto x = cyl.make_point(0, cyl.deck.make({0}), {0.5, 0.1});
    const auto lhs = cyl.canonical(lift.apply(g, lift.apply(h, x)));
    const auto rhs = cyl.canonical(lift.apply(g_compose(screw.model, g, h), x));
    CHECK(lhs.deck == rhs.deck);
    CHECK(lhs.chart == rhs.chart);
    CHECK(vdist(lhs.coords, rhs.coords) < 1e-9);
  }
}

TEST_CASE("lift inverses undo the lift") {
  Covering cov = circle_cover();
  auto ht = catalog_action("half_turn", cov.atlas);
  LiftedAction lift(ht, cov, {std::nullopt, ComponentLift{"half_turn", 0}});
  for (const auto& g : {GElem{1, {}}, GElem{0, {}}}) {
    const auto x = cov.make_point(1, cov.deck.make({2}), {2.6});
    const auto back = lift.apply_inverse(g, lift.apply(g, x));
    CHECK(cov.same_point(back, x));
    CHECK(cov.canonical(back).deck == cov.canonical(x).deck);
  }
  Covering cyl = cylinder_cover();
  auto rot = catalog_action("rotation", cyl.atlas);
  LiftedAction rlift(rot, cyl);
  const auto x = cyl.make_point(0, cyl.deck.make({-1}), {0.4, 0.9});
  const auto back = rlift.apply_inverse(GElem{0, {4.4}}, rlift.apply(GElem{0, {4.4}}, x));
  CHECK(cyl.same_point(back, x));
}

TEST_CASE("sheet shifts track cut crossings") {
  Covering cyl = cylinder_cover();
  auto rot = catalog_action("rotation", cyl.atlas);
  LiftedAction lift(rot, cyl);
  // a full turn crosses all three cuts once
  const auto psi = lift.sheet_shift(GElem{0, {kTwoPi}}, {0, {0.5, 0.0}});
  CHECK(psi == cyl.deck.make({1}));
  // a small rotation inside the chart does not
  const auto psi0 = lift.sheet_shift(GElem{0, {0.2}}, {0, {0.5, 0.0}});
  CHECK(psi0 == cyl.deck.identity());
}

TEST_CASE("group cohomology operators are nilpotent") {
  Covering cov = circle_cover();
  auto refl = catalog_action("reflection", cov.atlas);
  LiftedAction lift(refl, cov, {std::nullopt, ComponentLift{"reflection", 0}});
  auto ctx = make_extension_context(lift);
  const auto& D = cov.deck;
  DValuedCochains dc{&ctx};

  std::mt19937_64 rng(14);
  // component-constant random 1-cochain (the cocycles of interest descend to
  // the component group)
  std::vector<GroupElement> vals{D.make({static_cast<long long>(rng() % 7) - 3}),
                                 D.make({static_cast<long long>(rng() % 7) - 3})};
  auto a1 = [vals](const GElem& g) { return vals[static_cast<size_t>(g.comp)]; };
  auto dd = dc.delta2(dc.delta1(a1));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) CHECK(dd(GElem{a, {}}, GElem{b, {}}, GElem{c, {}}) == D.identity());

  const auto d0 = D.make({3});
  auto dd0 = dc.delta1(dc.delta0(d0));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(dd0(GElem{a, {}}, GElem{b, {}}) == D.identity());
}
