"""Solvers for the weighted gerrymandering decision problem on graphs.

Given a graph whose vertices carry weight functions over a candidate list,
decide whether the vertex set can be split into k connected districts so that
a distinguished candidate wins strictly more districts than anyone else.
Four interchangeable solvers are provided (brute-force enumeration, a
deterministic FPT dynamic program over an interval digraph for paths, a
randomized algebraic variant of the same program, and an exact
polynomial-algebra solver), together with a hardness reduction from rainbow
matching on paths and a differential-testing harness.
"""

from .model import (
    DEFAULT_RULE,
    District,
    Instance,
    Partition,
    TieBreakRule,
    district_winner,
    evaluate_partition,
    gm_to_wgm,
    instance_from_json,
    instance_to_json,
    load_instance,
    make_partition,
    save_instance,
    validate_partition,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_RULE",
    "District",
    "Instance",
    "Partition",
    "TieBreakRule",
    "district_winner",
    "evaluate_partition",
    "gm_to_wgm",
    "instance_from_json",
    "instance_to_json",
    "load_instance",
    "make_partition",
    "save_instance",
    "validate_partition",
    "__version__",
]
