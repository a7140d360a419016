"""Propositional-logic proof tutor: rule engine, proof graphs, guided
Parsons problems with mined subgoal chunks, scoring, and study analytics."""

from .formulas import Formula, FormulaSyntaxError, format_formula, parse_formula
from .rules import (
    REQUIRES_TARGET,
    Rule,
    apply_rule_forward,
    catalog,
    check_justification,
    get_rule,
)
from .semantics import entails

__all__ = [
    "Formula",
    "FormulaSyntaxError",
    "format_formula",
    "parse_formula",
    "Rule",
    "REQUIRES_TARGET",
    "apply_rule_forward",
    "catalog",
    "check_justification",
    "get_rule",
    "entails",
]

__version__ = "0.1.0"
