"""Dempster's rule of combination and the moves around it.

Combination works on the union scope of its operands: each focal
element is cylinder-extended there, pairwise intersections collect the
product masses, mass landing on the empty set becomes conflict, and the
survivors are renormalized by ``K = 1 - conflict``.  A combination with
``K`` below ``CONFLICT_EPS`` has no consistent core at all and raises
:class:`TotalConflictError` rather than producing garbage.
"""
from __future__ import annotations

from dataclasses import dataclass

from .frames import Scope, ScopeError, extend_bits, project_bits
from .mass import MassFunction

#: Normalization constants below this are treated as total conflict.
CONFLICT_EPS = 1e-12


class TotalConflictError(ArithmeticError):
    """Two bodies of evidence rule each other out completely.

    ``node`` and ``phase`` are filled in by the propagation engine when
    the failing combination happened inside a sweep; ``prefix_index``
    is filled in by the brute-force evaluator to point at the prior
    whose inclusion first emptied the core.
    """

    def __init__(
        self,
        detail: str = "combination has an empty core (K = 0)",
        *,
        node=None,
        phase: str | None = None,
        prefix_index: int | None = None,
    ):
        super().__init__(detail)
        self.detail = detail
        self.node = node
        self.phase = phase
        self.prefix_index = prefix_index


@dataclass(frozen=True)
class CombinationResult:
    """Combined mass plus the normalization bookkeeping behind it."""

    mass: MassFunction
    normalization: float  # K, the surviving share of product mass
    conflict: float  # 1 - K, the share that hit the empty set


def combine(
    m1: MassFunction, m2: MassFunction, *, prune: float = 0.0
) -> CombinationResult:
    """Combine two mass functions by Dempster's rule.

    ``prune`` optionally drops renormalized focal masses at or below the
    given threshold and rescales the rest; it defaults to off so that
    every evaluation path sees bit-identical numbers.
    """
    target = m1.scope.union(m2.scope)
    focal1 = _lifted_focal(m1, target)
    focal2 = _lifted_focal(m2, target)

    accumulated: dict[int, float] = {}
    conflict = 0.0
    for bits1, mass1 in focal1:
        for bits2, mass2 in focal2:
            meet = bits1 & bits2
            product = mass1 * mass2
            if meet == 0:
                conflict += product
            else:
                accumulated[meet] = accumulated.get(meet, 0.0) + product

    normalization = 1.0 - conflict
    if normalization < CONFLICT_EPS or not accumulated:
        raise TotalConflictError()

    focal = {
        bits: value / normalization
        for bits, value in sorted(accumulated.items())
        if value > 0.0
    }
    if prune > 0.0:
        kept = {b: v for b, v in focal.items() if v > prune}
        if not kept:
            raise TotalConflictError("pruning removed every focal element")
        scale = sum(kept.values())
        focal = {b: v / scale for b, v in kept.items()}

    return CombinationResult(
        mass=MassFunction(target, focal),
        normalization=normalization,
        conflict=conflict,
    )


def _lifted_focal(m: MassFunction, target: Scope) -> list[tuple[int, float]]:
    if m.scope == target:
        return sorted(m.focal.items())
    return [
        (extend_bits(bits, m.scope, target), mass)
        for bits, mass in sorted(m.focal.items())
    ]


def marginalize(m: MassFunction, sub: Scope) -> MassFunction:
    """Project every focal element onto ``sub`` and merge the masses."""
    if not sub.is_subscope(m.scope):
        raise ScopeError(
            f"cannot marginalize {m.scope.names} onto non-subscope {sub.names}"
        )
    focal: dict[int, float] = {}
    for bits, mass in m.focal.items():
        shadow = project_bits(bits, m.scope, sub)
        focal[shadow] = focal.get(shadow, 0.0) + mass
    return MassFunction(sub, focal)


def extend_mass(m: MassFunction, sup: Scope) -> MassFunction:
    """Carry a mass function to a larger scope by cylinder extension.

    Extension is injective on focal elements, so masses move over
    unchanged and nothing merges.
    """
    if not m.scope.is_subscope(sup):
        raise ScopeError(
            f"cannot extend {m.scope.names} onto non-superscope {sup.names}"
        )
    return MassFunction(
        sup,
        {extend_bits(bits, m.scope, sup): mass for bits, mass in m.focal.items()},
    )
