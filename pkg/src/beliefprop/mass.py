"""Basic probability assignments (mass functions) over product frames.

A mass function distributes unit mass over non-empty subsets of a
scope's product frame.  Focal elements are kept as integer bitsets in
the scope's configuration order; the mapping itself is canonically
ordered by bitset value so equal functions serialize identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .frames import ConfigSet, Scope, ScopeError

#: Focal masses must add up to one within this tolerance.
MASS_SUM_TOL = 1e-9

#: Tolerance for treating two mass functions as the same, focal by focal.
FOCAL_MATCH_TOL = 1e-12


class InvalidMassError(ValueError):
    """A mass function violates the basic axioms.

    Carries the individual violations so callers can report all of them
    at once instead of the first one found.
    """

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class MassFunction:
    """Masses over focal subsets of one scope's product frame.

    The constructor canonicalizes the focal map (sorted by bitset) but
    does not enforce the axioms; use :func:`validate_mass` to check a
    candidate and report every violation.
    """

    scope: Scope
    focal: Mapping[int, float]

    def __post_init__(self) -> None:
        canonical = {int(k): float(v) for k, v in sorted(self.focal.items())}
        object.__setattr__(self, "focal", canonical)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.scope == other.scope and self.focal == other.focal

    @property
    def full_bits(self) -> int:
        return (1 << self.scope.size) - 1

    def is_vacuous(self) -> bool:
        return set(self.focal) == {self.full_bits}

    def _bits_of(self, a: "ConfigSet | int") -> int:
        if isinstance(a, ConfigSet):
            if a.scope != self.scope:
                raise ScopeError("config set scope does not match mass scope")
            return a.bits
        bits = int(a)
        if bits < 0 or bits > self.full_bits:
            raise ScopeError(f"bitset {bits:#x} outside the frame")
        return bits

    def mass(self, a: "ConfigSet | int") -> float:
        return self.focal.get(self._bits_of(a), 0.0)

    def belief(self, a: "ConfigSet | int") -> float:
        """Total mass committed to subsets of ``a``."""
        bits = self._bits_of(a)
        if bits == 0:
            raise ScopeError("belief of the empty set is not defined")
        outside = ~bits
        return sum(m for b, m in self.focal.items() if b & outside == 0)

    def focal_sets(self) -> tuple[tuple[ConfigSet, float], ...]:
        return tuple(
            (ConfigSet(self.scope, bits), m) for bits, m in self.focal.items()
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = ", ".join(f"{bits:#x}:{m:.4f}" for bits, m in self.focal.items())
        return f"MassFunction({self.scope.names}, {{{parts}}})"


def vacuous(scope: Scope) -> MassFunction:
    """The mass function that commits everything to the full frame."""
    return MassFunction(scope, {(1 << scope.size) - 1: 1.0})


def validate_mass(m: MassFunction) -> list[str]:
    """Diagnose a candidate mass function; an empty list means valid.

    Checks that no mass sits on the empty set, that every focal mass is
    positive, and that the masses sum to one within ``MASS_SUM_TOL``.
    """
    problems: list[str] = []
    if not m.focal:
        problems.append("no focal elements")
        return problems
    full = m.full_bits
    for bits, value in m.focal.items():
        if bits == 0:
            problems.append("mass assigned to the empty set")
        if bits > full or bits < 0:
            problems.append(f"focal bitset {bits:#x} outside the frame")
        if value <= 0.0:
            problems.append(f"non-positive mass {value!r} on focal {bits:#x}")
    total = sum(m.focal.values())
    if abs(total - 1.0) > MASS_SUM_TOL:
        problems.append(f"masses sum to {total!r}, expected 1")
    return problems


def require_valid(m: MassFunction, context: str = "") -> None:
    problems = validate_mass(m)
    if problems:
        prefix = f"{context}: " if context else ""
        raise InvalidMassError([prefix + p for p in problems])


def focal_close(a: MassFunction, b: MassFunction, tol: float = FOCAL_MATCH_TOL) -> bool:
    """True when two mass functions agree focal-by-focal within ``tol``."""
    if a.scope != b.scope:
        return False
    for bits in set(a.focal) | set(b.focal):
        if abs(a.focal.get(bits, 0.0) - b.focal.get(bits, 0.0)) > tol:
            return False
    return True


def mass_from_pairs(
    scope: Scope, pairs: Iterable[tuple[ConfigSet | int, float]]
) -> MassFunction:
    """Build a mass function from (set, mass) pairs, merging duplicates."""
    focal: dict[int, float] = {}
    for key, value in pairs:
        bits = key.bits if isinstance(key, ConfigSet) else int(key)
        if isinstance(key, ConfigSet) and key.scope != scope:
            raise ScopeError("focal set scope does not match mass scope")
        focal[bits] = focal.get(bits, 0.0) + float(value)
    return MassFunction(scope, focal)
