"""Truth-table semantics: evaluation, satisfiability of small formula sets,
and the entailment oracle used as ground truth for the rule catalog."""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping

from .formulas import AND, IFF, IMPLIES, OR, Bin, Formula, Not, Var, variables

# Truth tables are exponential in the variable count; 20 keeps the worst
# case around a million rows.
MAX_VARIABLES = 20


class VariableBudgetError(ValueError):
    """More distinct variables than the truth-table bound allows."""


Assignment = Mapping[str, bool]


def evaluate(f: Formula, assignment: Assignment) -> bool:
    """Truth value of f under a total assignment."""
    if isinstance(f, Var):
        return assignment[f.name]
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    left = evaluate(f.left, assignment)
    right = evaluate(f.right, assignment)
    if f.op == AND:
        return left and right
    if f.op == OR:
        return left or right
    if f.op == IMPLIES:
        return (not left) or right
    if f.op == IFF:
        return left == right
    raise AssertionError(f.op)


def _assignments(names):
    names = sorted(names)
    for values in product((False, True), repeat=len(names)):
        yield dict(zip(names, values))


def entails(premises: Iterable[Formula], conclusion: Formula) -> bool:
    """True iff every assignment satisfying all premises satisfies the
    conclusion.  Raises VariableBudgetError above MAX_VARIABLES."""
    premises = list(premises)
    names = variables(conclusion)
    for p in premises:
        names |= variables(p)
    if len(names) > MAX_VARIABLES:
        raise VariableBudgetError(
            f"{len(names)} variables exceed the {MAX_VARIABLES}-variable truth-table bound"
        )
    for assignment in _assignments(names):
        if all(evaluate(p, assignment) for p in premises):
            if not evaluate(conclusion, assignment):
                return False
    return True


def satisfiable(formulas: Iterable[Formula]) -> bool:
    """True iff some assignment makes every formula true."""
    formulas = list(formulas)
    names = frozenset().union(*(variables(f) for f in formulas)) if formulas else frozenset()
    if len(names) > MAX_VARIABLES:
        raise VariableBudgetError(
            f"{len(names)} variables exceed the {MAX_VARIABLES}-variable truth-table bound"
        )
    return any(
        all(evaluate(f, assignment) for f in formulas) for assignment in _assignments(names)
    )
