"""Hereditary classes: forbidden-pattern lists plus semantic cross-check rules.

A compiled class carries two views of the same prohibition set: explicit
``ConstraintPattern`` objects, matched by the search engine, and semantic
rules that recompute the violation predicate from derived relations.  Both
views are run by ``check``; they are implemented independently so each acts
as an oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import ColoredGraph
from .matching import BudgetExceededError, SearchBudget, match_pattern

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


class MembershipError(ValueError):
    """An operation required a class member and got a violator."""


@dataclass(frozen=True)
class Violation:
    constraint: str
    source: str          # pattern or rule name that fired
    witness: tuple       # host vertices involved, deterministic order

    def __str__(self) -> str:
        w = ",".join(map(str, self.witness))
        return f"[{self.constraint}] {self.source} on ({w})"


@dataclass(frozen=True)
class CheckReport:
    status: str
    violations: tuple = ()
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def constraint_ids(self) -> set:
        return {v.constraint for v in self.violations}

    def summary(self) -> str:
        if self.status == PASS:
            return "pass"
        if self.status == INDETERMINATE:
            return "indeterminate: " + "; ".join(self.notes)
        head = f"fail ({len(self.violations)} violations)"
        lines = [head] + [f"  {v}" for v in self.violations[:20]]
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)


@dataclass(frozen=True)
class SemanticRule:
    """A named violation predicate recomputed from derived relations.

    ``descriptor`` is a flat, serializable record sufficient to rebuild the
    rule (used by the bundle format); ``fn`` maps a graph and a budget to a
    list of Violations.
    """

    name: str
    constraint: str
    descriptor: dict
    fn: Callable[[ColoredGraph, SearchBudget], list]

    def check(self, g: ColoredGraph, budget: SearchBudget) -> list:
        return self.fn(g, budget)


@dataclass(frozen=True)
class HereditaryClass:
    """A finitely constrained hereditary class over colored (or pure) graphs."""

    name: str
    palette: tuple
    patterns: tuple = ()
    rules: tuple = ()
    meta: dict = field(default_factory=dict)

    def constraint_groups(self) -> dict:
        groups: dict = {}
        for p in self.patterns:
            groups.setdefault(p.constraint or p.name, []).append(p)
        return groups

    def subset(self, constraints: Iterable[str], name: str = "") -> "HereditaryClass":
        keep = set(constraints)
        return HereditaryClass(
            name=name or f"{self.name}|{','.join(sorted(keep))}",
            palette=self.palette,
            patterns=tuple(p for p in self.patterns if p.constraint in keep),
            rules=tuple(r for r in self.rules if r.constraint in keep),
            meta=dict(self.meta),
        )

    def check(
        self,
        g: ColoredGraph,
        budget: SearchBudget | None = None,
        *,
        use_patterns: bool = True,
        use_rules: bool = True,
        max_witnesses_per_pattern: int = 4,
    ) -> CheckReport:
        """Run every pattern and every semantic rule; pass iff no violation.

        Budget exhaustion yields an indeterminate verdict, never a pass.
        Violations are merged in deterministic (constraint, source, witness)
        order.  Hosts with no multicolored vertex skip patterns that require
        one, since those cannot match.  Definite verdicts are cached on the
        (immutable) graph per class.
        """
        cache_ok = budget is None and use_patterns and use_rules
        memo = g.__dict__.setdefault("_membership_memo", {})
        if cache_ok and self.name in memo:
            return memo[self.name]
        budget = budget or SearchBudget(80_000_000)
        violations: list = []
        notes: list = []
        host_multicolor = bool(g.multicolored_vertices())
        host_cap = self.meta.get("pattern_host_cap")
        try:
            if use_patterns:
                for p in self.patterns:
                    if p.multicolored and not host_multicolor:
                        continue
                    if len(p) > len(g):
                        continue
                    if (
                        host_cap is not None
                        and len(g) > host_cap
                        and (p.constraint.startswith("w:") or p.constraint in ("H1", "H2"))
                    ):
                        # large hosts: the decoding rule recomputes the wedged
                        # verdicts and the structural rule the guard verdicts;
                        # direct matching is reserved for hosts small enough
                        # to afford it (the routes are cross-checked in tests)
                        continue
                    found = match_pattern(p, g, budget=budget, limit=max_witnesses_per_pattern)
                    for m in found:
                        wit = tuple(g.sorted_vertices(m.map.values()))
                        violations.append(Violation(p.constraint or p.name, p.name, wit))
            if use_rules:
                for r in self.rules:
                    violations.extend(r.check(g, budget))
        except BudgetExceededError as exc:
            return CheckReport(INDETERMINATE, tuple(violations), (str(exc),))
        violations = sorted(
            set(violations),
            key=lambda v: (v.constraint, v.source, tuple(map(str, v.witness))),
        )
        status = PASS if not violations else FAIL
        report = CheckReport(status, tuple(violations), tuple(notes))
        if cache_ok:
            memo[self.name] = report
        return report

    def member(self, g: ColoredGraph, budget: SearchBudget | None = None) -> bool:
        """Strict membership: indeterminate is not membership."""
        return self.check(g, budget=budget).ok

    def require_member(self, g: ColoredGraph, budget: SearchBudget | None = None, what: str = "input") -> None:
        report = self.check(g, budget=budget)
        if report.status == FAIL:
            raise MembershipError(f"{what} is not a member of {self.name}:\n{report.summary()}")
        if report.status == INDETERMINATE:
            raise MembershipError(f"membership of {what} in {self.name} is indeterminate: {report.notes}")
