#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "symcov/scenario.hpp"
#include "symcov/states.hpp"

using namespace symcov;

TEST_CASE("boost level sets split into deck copies") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  GridSpec spec;
  spec.window = 3;
  spec.spacing = 0.2;
  const Vec level = G.eval(s.covering.base);  // theta-tilde = 0

  const auto S = compute_state_space(G, s.covering, level, 0, spec);
  REQUIRE(S.states.size() == 7);  // lines at 2 pi k, |k| <= 3

  // iota values are spaced exactly by the 2 pi period
  std::vector<double> iotas;
  for (const auto& st : S.states) iotas.push_back(st.iota[0]);
  std::sort(iotas.begin(), iotas.end());
  for (size_t i = 0; i + 1 < iotas.size(); ++i)
    CHECK(iotas[i + 1] - iotas[i] == doctest::Approx(kTwoPi).epsilon(1e-9));

  const auto Q = quotient_states(S);
  REQUIRE(Q.quotient.size() == 1);
  CHECK(Q.quotient[0].multiplicity == 7);
  CHECK(Q.quotient[0].window_truncated);  // countable fibre, window count only
  CHECK(Q.deck_infinite);
}

TEST_CASE("window scaling gives 2W+1 states") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  for (int W : {1, 2}) {
    GridSpec spec;
    spec.window = W;
    spec.spacing = 0.2;
    const auto S = compute_state_space(G, s.covering, G.eval(s.covering.base), 0, spec);
    CHECK(static_cast<int>(S.states.size()) == 2 * W + 1);
    const auto Q = quotient_states(S);
    REQUIRE(Q.quotient.size() == 1);
    CHECK(Q.quotient[0].multiplicity == 2 * W + 1);
  }
}

TEST_CASE("rotation level sets stay single") {
  Scenario s = builtin_scenario("cylinder_rotation");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  GridSpec spec;
  spec.window = 2;
  spec.spacing = 0.2;
  const Vec level{G.eval(s.covering.make_point(0, s.deck.identity(), {0.5, 0.4}))};

  const auto S = compute_state_space(G, s.covering, level, 0, spec);
  REQUIRE(S.states.size() == 1);
  const auto Q = quotient_states(S);
  REQUIRE(Q.quotient.size() == 1);
  CHECK(Q.quotient[0].multiplicity == 1);
  CHECK(Q.quotient[0].has_fixed_point);  // the deck shifts the band into itself

  // an unreachable level yields an empty state space
  const auto empty = compute_state_space(G, s.covering, {99.0}, 0, spec);
  CHECK(empty.states.empty());
}

TEST_CASE("plane translations never split") {
  Scenario s = builtin_scenario("plane_translations");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  GridSpec spec;
  spec.window = 1;
  spec.spacing = 0.2;
  const auto S = compute_state_space(G, s.covering, G.eval(s.covering.base), 0, spec);
  const auto Q = quotient_states(S);
  for (const auto& q : Q.quotient) CHECK(q.multiplicity == 1);
}

TEST_CASE("deck action permutes interior states") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  GridSpec spec;
  spec.window = 3;
  spec.spacing = 0.2;
  const auto S = compute_state_space(G, s.covering, G.eval(s.covering.base), 0, spec);
  REQUIRE(S.deck_image.size() == 2);  // one generator, both directions
  for (const auto& img : S.deck_image) {
    // restricted to states with images inside the window, the map is
    // injective into the state list
    std::vector<int> seen;
    for (int i = 0; i < static_cast<int>(S.states.size()); ++i) {
      const int t = img[static_cast<size_t>(i)];
      if (t < 0) continue;
      CHECK(std::find(seen.begin(), seen.end(), t) == seen.end());
      seen.push_back(t);
    }
    CHECK(!seen.empty());
  }
}

TEST_CASE("lifted action descends to states with semi-equivariant iota") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  auto lift = s.make_lift();
  auto al = equivariance_cocycle(G, lift, s.sample_cover_points(6));
  GridSpec spec;
  spec.window = 2;
  spec.spacing = 0.2;
  const auto S = compute_state_space(G, s.covering, G.eval(s.covering.base), 0, spec);

  const GElem g{0, {0.8}};
  const Vec ag = al.alpha(g);
  for (const auto& st : S.states) {
    // map a handful of cells through the lifted action; they must land in a
    // single state whose iota obeys iota' = Ad*(g) iota + alpha(g)
    int target = -2;
    for (size_t ci = 0; ci < st.cells.size(); ci += std::max<size_t>(1, st.cells.size() / 5)) {
      const auto x = S.grid.resolve(st.cells[ci]);
      REQUIRE(x.has_value());
      const auto gx = lift.apply(g, *x);
      const Vec u = s.covering.to_model(gx);
      std::vector<long long> m(u.size());
      bool on_grid = true;
      for (size_t i = 0; i < u.size(); ++i) {
        m[i] = std::llround(u[i] / S.grid.h[i]);
        on_grid = on_grid && S.grid.in_window(m);
      }
      if (!on_grid) continue;
      const int t = S.state_of_cell(m);
      if (t < 0) continue;
      if (target == -2) target = t;
      CHECK(t == target);
    }
    if (target >= 0) {
      const auto& image = S.states[static_cast<size_t>(target)];
      CHECK(vdist(image.iota, vadd(st.iota, ag)) < 1e-8);
    }
  }
}

TEST_CASE("hamiltonian flow conserves commuting moments") {
  Scenario s = builtin_scenario("cylinder_boost");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};

  // h = cos(theta): theta stays constant, so J = -theta-tilde is conserved
  auto h = [](const Vec& u) { return std::cos(u[0]); };
  GridSpec window;
  window.nonperiodic_halfwidth = 50.0;
  const auto fr = hamiltonian_flow(h, nullptr, *s.omega, s.covering, {0.7, 0.4}, 10.0, 1e-3,
                                   window);
  CHECK(!fr.truncated);
  CHECK(fr.energy_drift < 1e-8 * 10.0);
  double jdrift = 0;
  const Vec j0 = G.eval(s.covering.from_model(fr.trajectory.front()));
  for (const auto& u : fr.trajectory)
    jdrift = std::max(jdrift, vdist(G.eval(s.covering.from_model(u)), j0));
  CHECK(jdrift < 1e-7);

  // premise: {h, <J, A>} vanishes on the grid
  GridSpec spec;
  spec.window = 2;
  auto jf = [&](const Vec& u) { return G.eval(s.covering.from_model(u))[0]; };
  CHECK(poisson_bracket_sup(h, jf, *s.omega, s.covering, spec) < 1e-8);
}

TEST_CASE("free motion conserves the rotation moment") {
  Scenario s = builtin_scenario("cylinder_rotation");
  const auto J = s.make_moment();
  GlobalMomentMap G{&J, {}};
  auto h = [](const Vec& u) { return 0.5 * u[1] * u[1]; };
  const auto fr = hamiltonian_flow(h, nullptr, *s.omega, s.covering, {0.3, 1.1}, 10.0, 1e-3);
  double jdrift = 0;
  const Vec j0 = G.eval(s.covering.from_model(fr.trajectory.front()));
  for (const auto& u : fr.trajectory)
    jdrift = std::max(jdrift, vdist(G.eval(s.covering.from_model(u)), j0));
  CHECK(jdrift < 1e-6);
}

TEST_CASE("integrator is fourth order (Richardson)") {
  Scenario s = builtin_scenario("cylinder_boost");
  // pendulum: h = p^2/2 + cos(theta) is not exactly integrable by RK4
  auto h = [](const Vec& u) { return 0.5 * u[1] * u[1] + std::cos(u[0]); };
  auto endpoint = [&](double dt) {
    GridSpec wide;
    wide.nonperiodic_halfwidth = 50.0;
    return hamiltonian_flow(h, nullptr, *s.omega, s.covering, {0.9, 0.2}, 2.0, dt, wide)
        .trajectory.back();
  };
  const Vec a = endpoint(0.02), b = endpoint(0.01), c = endpoint(0.005);
  const double e1 = vdist(a, b), e2 = vdist(b, c);
  CHECK(e1 / e2 > 10.0);  // ~16 for a 4th-order scheme
  CHECK(e1 / e2 < 24.0);
}
