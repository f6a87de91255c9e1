"""Smoke tests for the python bindings."""

import math

import pytest

symcov = pytest.importorskip("symcov")


def test_deck_group_arithmetic():
    Z = symcov.DeckGroup.free_abelian(1)
    a = Z.make([2])
    b = Z.make([3])
    assert Z.compose(a, b) == Z.make([5])
    assert Z.element_order(Z.make([5])) is None
    Z4 = symcov.DeckGroup.cyclic(4)
    assert Z4.element_order(Z4.make([2])) == 2


def test_atlas_and_holonomy():
    atlas = symcov.builtin_atlas("circle")
    assert atlas.chart_count == 3
    pt = atlas.canonicalize(2, [6.40])
    assert pt.chart == 0
    assert abs(pt.coords[0] - (6.40 - 2 * math.pi)) < 1e-12
    assert atlas.subdivide_loop("gen0") == [0, 1, 2, 0]

    s = symcov.scenario("circle_universal")
    assert s.holonomy("gen0").payload == [1]
    assert s.holonomy("gen0", power=2).payload == [2]


def test_lift_and_potential():
    s = symcov.scenario("circle_universal")
    start = s.covering.make_point(0, s.deck.make([0]), [0.0])
    end = s.lift_loop("gen0", start)
    assert end.deck.payload == [1]
    assert abs(end.coords[0]) < 1e-9

    periods = s.form_periods("dtheta")
    assert abs(periods[0] - 2 * math.pi) < 1e-9
    v = s.potential_branch("dtheta", 0, [2], [1.0])
    assert abs(v - (1.0 + 4 * math.pi)) < 1e-9


def test_moment_and_splitting():
    s = symcov.scenario("cylinder_boost")
    periods = s.moment_periods()
    assert abs(periods[0][0] + 2 * math.pi) < 1e-9
    split = s.split_states(window=2, grid=0.2)
    assert split["state_count"] == 5
    assert split["multiplicities"] == [5]


def test_extension_table():
    s = symcov.scenario("circle_halfturn_extension")
    gamma = s.gamma_table()
    assert gamma[1][1].payload == [1]  # Gamma(sigma, sigma)


def test_expression_language():
    assert symcov.eval_expression("2*pi", {}) == pytest.approx(2 * math.pi)
    assert symcov.eval_expression("sin(theta)*p", {"theta": 0.5, "p": 2.0}) == pytest.approx(
        2.0 * math.sin(0.5)
    )
    # precedence: unary minus binds weaker than ^
    assert symcov.eval_expression("-theta^2", {"theta": 3.0}) == -9.0


def test_scenario_from_dict():
    cfg = {
        "schema": 1,
        "name": "py-demo",
        "manifold": {"type": "circle", "charts": 3},
        "forms": [{"name": "dtheta", "coeffs": ["1"]}],
        "checks": ["cocycle", "periods"],
    }
    s = symcov.scenario(cfg)
    report = s.run()
    assert report["pass"] is True
    assert [c["name"] for c in report["checks"]] == ["cocycle", "periods"]


def test_product_loop_homotopy():
    lam = lambda t: [math.cos(2 * math.pi * t), math.sin(2 * math.pi * t)]
    mu = lambda t: [2 * math.pi * t]
    x, y = symcov.product_loop_homotopy(lam, mu, 1.0, 0.25)
    assert x == pytest.approx(lam(0.0))
    assert y == pytest.approx(mu(0.5))
