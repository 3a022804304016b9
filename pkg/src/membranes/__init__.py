"""Membrane-system workbench.

Parse membrane specifications, enumerate evolution steps under maximal
parallelism with weak or strong rule priorities (plus division, string
objects, and promoter/inhibitor extensions), and model check LTL, CTL,
and mu-calculus properties over the evolution-step transition graph.
"""

from membranes.core import (
    canonicalize,
    count_submultiset,
    num_objs_rec,
    render_configuration,
    soup_contains,
)
from membranes.engine import (
    Bounds,
    StepResult,
    applicable_instances,
    apply_dissolutions,
    apply_divisions,
    apply_instance,
    communicate,
    compute_irreducible,
    evolution_step,
    locally_enabled,
    membrane_max_parallel,
)
from membranes.lang import (
    Diagnostic,
    DiagnosticsError,
    MembError,
    SystemSpec,
    validate_spec,
)
from membranes.parser import parse_configuration, parse_formula, parse_spec
from membranes.graph import GraphSizeError, KripkeGraph, build_graph, eval_prop
from membranes.buchi import BuchiAutomaton, ltl_to_buchi
from membranes.checker import (
    Holds,
    LassoCounterexample,
    StateSetResult,
    check_formula,
    check_ltl,
    check_mu,
    ctl_to_mu,
    format_trace,
)
from membranes.strategies import (
    strong_priority_expression,
    weak_priority_expression,
)
from membranes.cli import repl, run_check_cli

__version__ = "0.1.0"

__all__ = [
    "Bounds", "BuchiAutomaton", "Diagnostic", "DiagnosticsError",
    "GraphSizeError", "Holds", "KripkeGraph", "LassoCounterexample",
    "MembError", "StateSetResult", "StepResult", "SystemSpec",
    "applicable_instances", "apply_dissolutions", "apply_divisions",
    "apply_instance", "build_graph", "canonicalize", "check_formula",
    "check_ltl", "check_mu", "communicate", "compute_irreducible",
    "count_submultiset", "ctl_to_mu", "eval_prop", "evolution_step",
    "format_trace", "locally_enabled", "ltl_to_buchi",
    "membrane_max_parallel", "num_objs_rec", "parse_configuration",
    "parse_formula", "parse_spec", "render_configuration", "repl",
    "run_check_cli", "soup_contains", "strong_priority_expression",
    "validate_spec", "weak_priority_expression",
]
