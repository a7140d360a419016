"""Inference-rule catalog: pattern application and justification checking.

Two-premise inference rules are premise-order insensitive.  Equivalence
rules rewrite at the top level of a formula only.  Addition cannot
enumerate its conclusions (any disjunct may be introduced), so its
forward form returns the REQUIRES_TARGET marker and it is validated
through check_justification against the declared target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .formulas import AND, IFF, IMPLIES, OR, Bin, Formula, Not

INFERENCE = "inference"
EQUIVALENCE = "equivalence"


@dataclass(frozen=True)
class Rule:
    id: str
    name: str
    arity: int
    kind: str
    # Verb slotted into "Apply {name} here to {action_phrase} {statement}."
    action_phrase: str


class UnknownRuleError(KeyError):
    pass


class ArityError(ValueError):
    pass


class _RequiresTarget:
    """Marker: the rule licenses infinitely many conclusions; check the
    declared target with check_justification instead."""

    def __repr__(self):
        return "REQUIRES_TARGET"


REQUIRES_TARGET = _RequiresTarget()


def _both_orders(a, b):
    return ((a, b), (b, a)) if a != b else ((a, b),)


def _apply_mp(a, b):
    out = set()
    for x, imp in _both_orders(a, b):
        if isinstance(imp, Bin) and imp.op == IMPLIES and imp.left == x:
            out.add(imp.right)
    return out


def _apply_mt(a, b):
    out = set()
    for imp, neg in _both_orders(a, b):
        if isinstance(imp, Bin) and imp.op == IMPLIES and neg == Not(imp.right):
            out.add(Not(imp.left))
    return out


def _apply_ds(a, b):
    out = set()
    for disj, neg in _both_orders(a, b):
        if isinstance(disj, Bin) and disj.op == OR:
            if neg == Not(disj.left):
                out.add(disj.right)
            if neg == Not(disj.right):
                out.add(disj.left)
    return out


def _apply_hs(a, b):
    out = set()
    for p, q in _both_orders(a, b):
        if (
            isinstance(p, Bin)
            and p.op == IMPLIES
            and isinstance(q, Bin)
            and q.op == IMPLIES
            and p.right == q.left
        ):
            out.add(Bin(IMPLIES, p.left, q.right))
    return out


def _apply_simp(f):
    if isinstance(f, Bin) and f.op == AND:
        return {f.left, f.right}
    return set()


def _apply_conj(a, b):
    return {Bin(AND, a, b), Bin(AND, b, a)}


def _apply_cd(a, b):
    out = set()
    for pair, disj in _both_orders(a, b):
        if (
            isinstance(pair, Bin)
            and pair.op == AND
            and isinstance(pair.left, Bin)
            and pair.left.op == IMPLIES
            and isinstance(pair.right, Bin)
            and pair.right.op == IMPLIES
            and isinstance(disj, Bin)
            and disj.op == OR
            and disj.left == pair.left.left
            and disj.right == pair.right.left
        ):
            out.add(Bin(OR, pair.left.right, pair.right.right))
    return out


def _apply_dn(f):
    out = {Not(Not(f))}
    if isinstance(f, Not) and isinstance(f.child, Not):
        out.add(f.child.child)
    return out


def _apply_dem(f):
    out = set()
    if isinstance(f, Not) and isinstance(f.child, Bin):
        inner = f.child
        if inner.op == AND:
            out.add(Bin(OR, Not(inner.left), Not(inner.right)))
        elif inner.op == OR:
            out.add(Bin(AND, Not(inner.left), Not(inner.right)))
    if isinstance(f, Bin) and isinstance(f.left, Not) and isinstance(f.right, Not):
        if f.op == OR:
            out.add(Not(Bin(AND, f.left.child, f.right.child)))
        elif f.op == AND:
            out.add(Not(Bin(OR, f.left.child, f.right.child)))
    return out


def _apply_com(f):
    if isinstance(f, Bin) and f.op in (AND, OR, IFF):
        return {Bin(f.op, f.right, f.left)}
    return set()


def _apply_impl(f):
    out = set()
    if isinstance(f, Bin) and f.op == IMPLIES:
        out.add(Bin(OR, Not(f.left), f.right))
    if isinstance(f, Bin) and f.op == OR:
        out.add(Bin(IMPLIES, Not(f.left), f.right))
        if isinstance(f.left, Not):
            out.add(Bin(IMPLIES, f.left.child, f.right))
    return out


_CATALOG = [
    (Rule("MP", "Modus Ponens", 2, INFERENCE, "derive"), _apply_mp),
    (Rule("MT", "Modus Tollens", 2, INFERENCE, "derive"), _apply_mt),
    (Rule("DS", "Disjunctive Syllogism", 2, INFERENCE, "derive"), _apply_ds),
    (Rule("HS", "Hypothetical Syllogism", 2, INFERENCE, "chain the conditionals into"), _apply_hs),
    (Rule("Simp", "Simplification", 1, INFERENCE, "isolate"), _apply_simp),
    (Rule("Conj", "Conjunction", 2, INFERENCE, "combine the parents into"), _apply_conj),
    (Rule("Add", "Addition", 1, INFERENCE, "introduce a disjunct and derive"), None),
    (Rule("CD", "Constructive Dilemma", 2, INFERENCE, "derive"), _apply_cd),
    (Rule("DeM", "De Morgan", 1, EQUIVALENCE, "rewrite as"), _apply_dem),
    (Rule("DN", "Double Negation", 1, EQUIVALENCE, "rewrite as"), _apply_dn),
    (Rule("Com", "Commutativity", 1, EQUIVALENCE, "rewrite as"), _apply_com),
    (Rule("Impl", "Implication", 1, EQUIVALENCE, "rewrite as"), _apply_impl),
]

RULES = {rule.id: rule for rule, _ in _CATALOG}
_APPLIERS = {rule.id: fn for rule, fn in _CATALOG}

# Rules whose conclusion set cannot be enumerated from the premises alone.
TARGET_DEPENDENT = frozenset(rule.id for rule, fn in _CATALOG if fn is None)


def get_rule(rule_id: str) -> Rule:
    try:
        return RULES[rule_id]
    except KeyError:
        raise UnknownRuleError(rule_id) from None


def catalog(ids: Sequence[str] | None = None) -> list[Rule]:
    """The rule catalog, optionally restricted to the given ids."""
    if ids is None:
        return [rule for rule, _ in _CATALOG]
    return [get_rule(i) for i in ids]


def _check_arity(rule, premises):
    if len(premises) != rule.arity:
        raise ArityError(f"{rule.id} takes {rule.arity} premise(s), got {len(premises)}")


def apply_rule_forward(rule: Rule, premises: Sequence[Formula]):
    """All conclusions the rule licenses from exactly these premises.

    Returns a frozenset (empty when the rule does not apply), or
    REQUIRES_TARGET for target-dependent rules such as Addition.
    """
    _check_arity(rule, premises)
    if rule.id in TARGET_DEPENDENT:
        return REQUIRES_TARGET
    fn = _APPLIERS[rule.id]
    return frozenset(fn(*premises))


def check_justification(conclusion: Formula, rule: Rule, premises: Sequence[Formula]) -> bool:
    """True iff the rule, applied to the premises, licenses exactly this
    conclusion."""
    _check_arity(rule, premises)
    if rule.id == "Add":
        (premise,) = premises
        return isinstance(conclusion, Bin) and conclusion.op == OR and (
            conclusion.left == premise or conclusion.right == premise
        )
    return conclusion in apply_rule_forward(rule, premises)


def rule_applies(rule: Rule, premises: Sequence[Formula]) -> bool:
    """Whether the rule licenses anything at all from these premises
    (used to split incorrect-rule from incorrect-statement attempts)."""
    _check_arity(rule, premises)
    if rule.id in TARGET_DEPENDENT:
        return True
    return bool(apply_rule_forward(rule, premises))


def catalog_json(ids: Sequence[str] | None = None) -> str:
    """Rule catalog as a JSON document (id, name, arity, kind)."""
    rows = [
        {"id": r.id, "name": r.name, "arity": r.arity, "kind": r.kind}
        for r in catalog(ids)
    ]
    return json.dumps(rows, ensure_ascii=False, indent=2)
