"""Coverings, Cech cocycles, multi-valued potentials and local moment maps.

The compiled extension carries the whole API; this package re-exports it.
The extension lives inside the package for wheel installs and next to it on
PYTHONPATH for in-tree test runs.
"""

try:
    from ._core import (
        Atlas,
        CoverPoint,
        Covering,
        DeckGroup,
        GroupElement,
        ManifoldPoint,
        Scenario,
        builtin_atlas,
        builtin_scenario_names,
        eval_expression,
        parse_expression,
        product_loop_homotopy,
        scenario,
    )
except ImportError:
    from _core import (
        Atlas,
        CoverPoint,
        Covering,
        DeckGroup,
        GroupElement,
        ManifoldPoint,
        Scenario,
        builtin_atlas,
        builtin_scenario_names,
        eval_expression,
        parse_expression,
        product_loop_homotopy,
        scenario,
    )

__all__ = [
    "Atlas",
    "CoverPoint",
    "Covering",
    "DeckGroup",
    "GroupElement",
    "ManifoldPoint",
    "Scenario",
    "builtin_atlas",
    "builtin_scenario_names",
    "eval_expression",
    "parse_expression",
    "product_loop_homotopy",
    "scenario",
]
