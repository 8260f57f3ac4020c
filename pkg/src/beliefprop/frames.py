"""Frames, scopes, and subsets of product frames.

A frame is the finite set of values a variable can take.  A scope is a
set of variables kept in canonical (lexicographic) order; its product
frame enumerates every joint assignment in mixed-radix order, with the
last scope variable varying fastest.  Subsets of a product frame are
stored as integer bitsets indexed by that enumeration, which makes
projection, cylinder extension, intersection and subset tests cheap
bit work even for frames with tens of thousands of configurations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

#: Default upper bound on the number of configurations a scope may have.
DEFAULT_FRAME_CAP = 65_536


class ScopeError(ValueError):
    """A scope was used where it does not fit (not a subscope, empty, ...)."""


class FrameCapError(ValueError):
    """A product frame would exceed the configured configuration cap."""


@dataclass(frozen=True)
class Variable:
    """A named variable together with its frame of value labels."""

    name: str
    frame: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame", tuple(self.frame))
        if not self.name or not isinstance(self.name, str):
            raise ScopeError("variable name must be a non-empty string")
        if not self.frame:
            raise ScopeError(f"variable {self.name!r} has an empty frame")
        if any(not isinstance(v, str) or v == "" for v in self.frame):
            raise ScopeError(f"variable {self.name!r} has blank value labels")
        if len(set(self.frame)) != len(self.frame):
            raise ScopeError(f"variable {self.name!r} repeats value labels")

    @property
    def cardinality(self) -> int:
        return len(self.frame)

    def label_index(self, label: str) -> int:
        try:
            return self.frame.index(label)
        except ValueError:
            raise ScopeError(
                f"value {label!r} not in frame of variable {self.name!r}"
            ) from None


@dataclass(frozen=True)
class Scope:
    """An ordered set of variables and the product frame they span.

    Variables are stored sorted by name so that scopes built from the
    same variables in any order compare equal.  Configuration indices
    follow mixed-radix order: the last variable in the sorted order is
    the fastest-varying digit.
    """

    variables: tuple[Variable, ...]

    def __init__(self, variables: Iterable[Variable], cap: int | None = None):
        ordered = tuple(sorted(variables, key=lambda v: v.name))
        if not ordered:
            raise ScopeError("a scope needs at least one variable")
        names = [v.name for v in ordered]
        if len(set(names)) != len(names):
            raise ScopeError(f"duplicate variable names in scope: {names}")
        size = 1
        for v in ordered:
            size *= v.cardinality
        limit = DEFAULT_FRAME_CAP if cap is None else cap
        if size > limit:
            raise FrameCapError(
                f"scope over {names} spans {size} configurations, "
                f"above the cap of {limit}"
            )
        object.__setattr__(self, "variables", ordered)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def size(self) -> int:
        """Number of configurations in the product frame."""
        size = 1
        for v in self.variables:
            size *= v.cardinality
        return size

    def __len__(self) -> int:
        return len(self.variables)

    def __contains__(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ScopeError(f"variable {name!r} not in scope {self.names}")

    # -- set algebra over scopes ------------------------------------------

    def union(self, other: "Scope", cap: int | None = None) -> "Scope":
        merged = {v.name: v for v in self.variables}
        for v in other.variables:
            seen = merged.get(v.name)
            if seen is not None and seen != v:
                raise ScopeError(
                    f"variable {v.name!r} declared with two different frames"
                )
            merged[v.name] = v
        return Scope(merged.values(), cap=cap)

    def intersection(self, other: "Scope") -> "Scope | None":
        """Shared variables as a scope, or None when disjoint."""
        names = set(other.names)
        shared = [v for v in self.variables if v.name in names]
        for v in shared:
            if other.variable(v.name) != v:
                raise ScopeError(
                    f"variable {v.name!r} declared with two different frames"
                )
        if not shared:
            return None
        return Scope(shared)

    def is_subscope(self, other: "Scope") -> bool:
        try:
            return all(other.variable(v.name) == v for v in self.variables)
        except ScopeError:
            return False

    # -- mixed-radix configuration coding ---------------------------------

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        weight = 1
        for v in reversed(self.variables):
            out.append(weight)
            weight *= v.cardinality
        return tuple(reversed(out))

    def encode(self, values: Sequence[int]) -> int:
        if len(values) != len(self.variables):
            raise ScopeError("value tuple does not match scope arity")
        index = 0
        for value, v, stride in zip(values, self.variables, self.strides):
            if not 0 <= value < v.cardinality:
                raise ScopeError(
                    f"value index {value} out of range for {v.name!r}"
                )
            index += value * stride
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ScopeError(f"configuration index {index} out of range")
        out = []
        for stride, v in zip(self.strides, self.variables):
            digit, index = divmod(index, stride)
            out.append(digit)
        return tuple(out)

    def index_of(self, assignment: Mapping[str, str]) -> int:
        """Index of the configuration given as a name -> label mapping."""
        extra = set(assignment) - set(self.names)
        if extra:
            raise ScopeError(f"unknown variables in configuration: {sorted(extra)}")
        values = []
        for v in self.variables:
            if v.name not in assignment:
                raise ScopeError(f"configuration missing variable {v.name!r}")
            values.append(v.label_index(assignment[v.name]))
        return self.encode(values)

    def labels(self, index: int) -> tuple[str, ...]:
        return tuple(
            v.frame[digit] for v, digit in zip(self.variables, self.decode(index))
        )

    def configurations(self) -> Iterator[tuple[str, ...]]:
        """All configurations as label tuples, in index order."""
        return itertools.product(*(v.frame for v in self.variables))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Scope({{{', '.join(self.names)}}})"


def scope_label(scope: Scope) -> str:
    """Human-readable form of a scope, e.g. ``{a,b}``."""
    return "{" + ",".join(scope.names) + "}"


@lru_cache(maxsize=None)
def _projection_table(sup: Scope, sub: Scope) -> tuple[int, ...]:
    """For each configuration index of ``sup``, its index under ``sub``."""
    if not sub.is_subscope(sup):
        raise ScopeError(f"{sub.names} is not a subscope of {sup.names}")
    positions = [sup.names.index(name) for name in sub.names]
    table = []
    for digits in itertools.product(*(range(v.cardinality) for v in sup.variables)):
        table.append(sub.encode(tuple(digits[p] for p in positions)))
    return tuple(table)


@lru_cache(maxsize=None)
def _extension_masks(sub: Scope, sup: Scope) -> tuple[int, ...]:
    """For each index of ``sub``, the bitset of ``sup`` indices above it."""
    proj = _projection_table(sup, sub)
    masks = [0] * sub.size
    for sup_index, sub_index in enumerate(proj):
        masks[sub_index] |= 1 << sup_index
    return tuple(masks)


def _iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class ConfigSet:
    """A subset of a scope's product frame, stored as an integer bitset."""

    scope: Scope
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.scope.size):
            raise ScopeError("bitset out of range for scope frame")

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, scope: Scope) -> "ConfigSet":
        return cls(scope, 0)

    @classmethod
    def full(cls, scope: Scope) -> "ConfigSet":
        return cls(scope, (1 << scope.size) - 1)

    @classmethod
    def of_indices(cls, scope: Scope, indices: Iterable[int]) -> "ConfigSet":
        bits = 0
        for i in indices:
            if not 0 <= i < scope.size:
                raise ScopeError(f"configuration index {i} out of range")
            bits |= 1 << i
        return cls(scope, bits)

    @classmethod
    def of_configs(
        cls, scope: Scope, configs: Iterable[Mapping[str, str]]
    ) -> "ConfigSet":
        return cls.of_indices(scope, (scope.index_of(c) for c in configs))

    # -- plain set behaviour ------------------------------------------------

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def indices(self) -> Iterator[int]:
        return _iter_bits(self.bits)

    def members(self) -> tuple[tuple[str, ...], ...]:
        """Member configurations as label tuples, in index order."""
        return tuple(self.scope.labels(i) for i in self.indices())

    def _check_same_scope(self, other: "ConfigSet") -> None:
        if self.scope != other.scope:
            raise ScopeError("config sets live on different scopes")

    def intersection(self, other: "ConfigSet") -> "ConfigSet":
        self._check_same_scope(other)
        return ConfigSet(self.scope, self.bits & other.bits)

    def union(self, other: "ConfigSet") -> "ConfigSet":
        self._check_same_scope(other)
        return ConfigSet(self.scope, self.bits | other.bits)

    def issubset(self, other: "ConfigSet") -> bool:
        self._check_same_scope(other)
        return self.bits & ~other.bits == 0

    # -- moving between scopes ----------------------------------------------

    def project(self, sub: Scope) -> "ConfigSet":
        """Drop all variables outside ``sub``, keeping reachable configs."""
        return ConfigSet(sub, project_bits(self.bits, self.scope, sub))

    def extend(self, sup: Scope) -> "ConfigSet":
        """Cylinder extension: all configurations of ``sup`` projecting in."""
        return ConfigSet(sup, extend_bits(self.bits, self.scope, sup))


def project_bits(bits: int, sup: Scope, sub: Scope) -> int:
    if sup == sub:
        return bits
    table = _projection_table(sup, sub)
    out = 0
    for i in _iter_bits(bits):
        out |= 1 << table[i]
    return out


def extend_bits(bits: int, sub: Scope, sup: Scope) -> int:
    if sub == sup:
        return bits
    masks = _extension_masks(sub, sup)
    out = 0
    for i in _iter_bits(bits):
        out |= masks[i]
    return out
