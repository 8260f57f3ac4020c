"""Brute-force evaluation: combine everything, then project.

This is the straight-line reference the tree machinery is checked
against.  All evidence is folded into one global mass function over the
union of the evidence scopes, in document order, and marginals fall out
by projection.  Cost grows with the product of the frames involved, so
this is only for small networks and for tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

from .dempster import TotalConflictError, combine, marginalize, extend_mass
from .frames import Scope
from .mass import MassFunction, vacuous
from .network import Network


@dataclass(frozen=True)
class GlobalResult:
    """The combined evidence and the bookkeeping of getting there.

    ``mass`` is ``None`` when the network declares no evidence at all.
    ``normalizations`` holds the constant ``K`` of each executed
    combination, in order; ``combinations`` counts them.
    """

    mass: MassFunction | None
    normalizations: tuple[float, ...]

    @property
    def combinations(self) -> int:
        return len(self.normalizations)

    @property
    def cumulative_normalization(self) -> float:
        return prod(self.normalizations) if self.normalizations else 1.0


def combine_all(masses: Sequence[MassFunction]) -> GlobalResult:
    """Left-fold a sequence of mass functions in the given order.

    Vacuous inputs are absorbed without an executed combination, same
    convention as the propagation engine.  On total conflict the raised
    error's ``prefix_index`` names the position whose inclusion first
    emptied the core.
    """
    acc: MassFunction | None = None
    normalizations: list[float] = []
    for i, m in enumerate(masses):
        if acc is None:
            acc = m
            continue
        if m.is_vacuous():
            acc = extend_mass(acc, acc.scope.union(m.scope))
            continue
        if acc.is_vacuous():
            acc = extend_mass(m, acc.scope.union(m.scope))
            continue
        try:
            step = combine(acc, m)
        except TotalConflictError as exc:
            raise TotalConflictError(exc.detail, prefix_index=i) from None
        acc = step.mass
        normalizations.append(step.normalization)
    return GlobalResult(acc, tuple(normalizations))


def global_belief(net: Network) -> GlobalResult:
    return combine_all([b.mass for b in net.beliefs])


def oracle_marginal(result: GlobalResult, scope: Scope) -> MassFunction:
    """Project the global mass onto ``scope``.

    Variables of ``scope`` outside the evidence carry no information,
    so the projection goes through the common part and is then extended
    vacuously; with no common part at all the answer is vacuous.
    """
    if result.mass is None:
        return vacuous(scope)
    common = scope.intersection(result.mass.scope)
    if common is None:
        return vacuous(scope)
    reduced = marginalize(result.mass, common)
    if common == scope:
        return reduced
    return extend_mass(reduced, scope)


def oracle_marginals(
    result: GlobalResult, scopes: Iterable[Scope]
) -> dict[Scope, MassFunction]:
    return {s: oracle_marginal(result, s) for s in scopes}
