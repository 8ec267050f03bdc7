"""Synthesis of communicating processes from scenarios and requirements."""

from ._core import (
    ParseError,
    ResourceError,
    components,
    format_automaton,
    parse_automaton,
    reduction_sizes,
    sat_solve,
    synthesize,
    to_dot,
    validate,
    verify,
)

__all__ = [
    "ParseError",
    "ResourceError",
    "components",
    "format_automaton",
    "parse_automaton",
    "reduction_sizes",
    "sat_solve",
    "synthesize",
    "to_dot",
    "validate",
    "verify",
]
