"""Two-sweep message passing on a rooted Markov tree.

Every node starts from a prior (the evidence declared on its scope,
vacuous if none).  The upward sweep folds child messages into the prior
left to right; the running values are kept as per-child prefixes and
the finished fold is the node's collected mass, whose projection onto
the separator is the message to the parent.  The downward sweep walks
children right to left keeping a suffix accumulator, so the message to
a child combines that child's prefix with everything to its right plus
the parent's downward message.  A node's marginal is its collected mass
folded with its downward message; the root's marginal is its collected
mass as it stands.

All intermediate values live in caches keyed by node (or by node and
child, for prefixes).  A run only recomputes what a :class:`DirtySet`
names, which is how incremental updates reuse work: the fresh run is
just a run with everything dirty.

Combinations are tallied per node and phase as they execute.  Folding
in a vacuous operand, or seeding an empty accumulator, costs nothing
and is not counted.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .dempster import TotalConflictError, combine, extend_mass, marginalize
from .frames import Scope, ScopeError, scope_label
from .mass import MassFunction, vacuous
from .markov import RootedTree
from .network import Network, network_tree

PHASES = ("setup", "up", "down")


class CombinationCounter:
    """Executed combinations, tallied by node and phase.

    ``setup`` covers folding several bodies of evidence declared on the
    same scope into one prior; it is reported separately and excluded
    from :attr:`total`, which is the cost of the sweeps themselves.
    """

    def __init__(self) -> None:
        self.tallies: dict[str, Counter[Scope]] = {p: Counter() for p in PHASES}

    def record(self, node: Scope, phase: str) -> None:
        self.tallies[phase][node] += 1

    def phase_total(self, phase: str) -> int:
        return sum(self.tallies[phase].values())

    @property
    def setup(self) -> int:
        return self.phase_total("setup")

    @property
    def up(self) -> int:
        return self.phase_total("up")

    @property
    def down(self) -> int:
        return self.phase_total("down")

    @property
    def total(self) -> int:
        return self.up + self.down

    def at(self, node: Scope) -> int:
        """Sweep combinations attributed to ``node``."""
        return self.tallies["up"][node] + self.tallies["down"][node]

    def merge(self, other: "CombinationCounter") -> None:
        for phase in PHASES:
            self.tallies[phase].update(other.tallies[phase])

    def copy(self) -> "CombinationCounter":
        out = CombinationCounter()
        out.merge(self)
        return out

    def by_node(self) -> dict[Scope, int]:
        nodes = set()
        for phase in ("up", "down"):
            nodes.update(self.tallies[phase])
        return {n: self.at(n) for n in nodes}


@dataclass(frozen=True)
class DirtySet:
    """What a run is allowed to recompute.

    ``up_edges`` are (child, parent) pairs whose upward message is
    stale, ``down_edges`` are (parent, child) pairs whose downward
    message is stale, ``collected`` names nodes whose collected mass is
    stale, and ``prefixes`` names (node, child) prefix cache entries to
    drop.  Everything not listed is kept and trusted.
    """

    up_edges: frozenset[tuple[Scope, Scope]] = frozenset()
    down_edges: frozenset[tuple[Scope, Scope]] = frozenset()
    collected: frozenset[Scope] = frozenset()
    prefixes: frozenset[tuple[Scope, Scope]] = frozenset()

    @property
    def is_empty(self) -> bool:
        return not (self.up_edges or self.down_edges or self.collected or self.prefixes)

    @property
    def message_count(self) -> int:
        return len(self.up_edges) + len(self.down_edges)

    def union(self, other: "DirtySet") -> "DirtySet":
        return DirtySet(
            self.up_edges | other.up_edges,
            self.down_edges | other.down_edges,
            self.collected | other.collected,
            self.prefixes | other.prefixes,
        )

    @classmethod
    def empty(cls) -> "DirtySet":
        return cls()

    @classmethod
    def everything(cls, rooted: RootedTree) -> "DirtySet":
        up = set()
        down = set()
        prefixes = set()
        for node, kids in rooted.children.items():
            for kid in kids:
                up.add((kid, node))
                down.add((node, kid))
                prefixes.add((node, kid))
        return cls(
            frozenset(up),
            frozenset(down),
            frozenset(rooted.nodes),
            frozenset(prefixes),
        )


class PropagationEngine:
    """Caches and sweeps for one rooted tree.

    The caches (``up_messages``, ``down_messages``, ``collected``,
    ``prefixes``, ``marginals``) survive across runs; :meth:`run`
    refreshes exactly the entries a dirty set names and leaves the rest
    untouched, which makes a run with an empty dirty set free.
    """

    def __init__(
        self, rooted: RootedTree, priors: Mapping[Scope, MassFunction] | None = None
    ):
        self.rooted = rooted
        self.priors: dict[Scope, MassFunction] = {}
        priors = priors or {}
        for node in rooted.nodes:
            prior = priors.get(node)
            if prior is None:
                prior = vacuous(node)
            elif prior.scope != node:
                raise ScopeError(
                    f"prior for {scope_label(node)} is on {scope_label(prior.scope)}"
                )
            self.priors[node] = prior
        self.up_messages: dict[Scope, MassFunction] = {}
        self.down_messages: dict[Scope, MassFunction] = {}
        self.collected: dict[Scope, MassFunction] = {}
        self.prefixes: dict[tuple[Scope, Scope], MassFunction] = {}
        self.marginals: dict[Scope, MassFunction] = {}

    # -- one run ------------------------------------------------------

    def run(
        self,
        dirty: DirtySet,
        prior_changed: Iterable[Scope] = (),
        counter: CombinationCounter | None = None,
    ) -> CombinationCounter:
        """Bring every cache entry named by ``dirty`` up to date.

        ``prior_changed`` lists nodes whose prior was replaced since
        the last run; their prefix caches are rebuilt wholesale rather
        than trusted, which keeps stacked changes sound.
        """
        counter = CombinationCounter() if counter is None else counter
        rooted = self.rooted
        root = rooted.root
        changed = set(prior_changed)

        for key in dirty.prefixes:
            self.prefixes.pop(key, None)

        stale_marginals = set(dirty.collected)

        for v in rooted.post_order():
            if v in dirty.collected:
                self._recollect(v, v in changed, counter)
            parent = rooted.parent.get(v)
            if parent is not None and (v, parent) in dirty.up_edges:
                self.up_messages[v] = _edge_message(self.collected[v], v, parent)

        for p in rooted.pre_order():
            kids = rooted.children[p]
            if not kids:
                continue
            # Messages waiting to enter the suffix accumulator.  They
            # are only folded once a child to the left actually needs
            # the accumulator, so clean children cost nothing.
            pending: list[MassFunction] = []
            if p != root:
                pending.append(self.down_messages[p])
            suffix: MassFunction | None = None
            for k in reversed(kids):
                if (p, k) in dirty.down_edges:
                    for message in pending:
                        suffix = self._fold(suffix, message, p, "down", counter)
                    pending.clear()
                    body = self._fold(self.prefixes[(p, k)], suffix, p, "down", counter)
                    self.down_messages[k] = _edge_message(body, p, k)
                    stale_marginals.add(k)
                pending.append(self.up_messages[k])

        for v in stale_marginals:
            if v == root:
                self.marginals[v] = self.collected[v]
            else:
                self.marginals[v] = self._fold(
                    self.collected[v],
                    self.down_messages[v],
                    rooted.parent[v],
                    "down",
                    counter,
                )
        return counter

    def _recollect(
        self, node: Scope, refold_all: bool, counter: CombinationCounter
    ) -> None:
        """Refresh ``collected[node]``, reusing cached prefixes.

        Prefixes are trusted left to right until the first missing
        entry; from there each child message is folded in and the new
        prefixes stored.  With ``refold_all`` the cache is ignored and
        rebuilt from the prior, which is required when the prior itself
        changed.
        """
        kids = self.rooted.children[node]
        acc = self.priors[node]
        for j, kid in enumerate(kids):
            if j > 0 and not refold_all and (node, kid) in self.prefixes:
                acc = self.prefixes[(node, kid)]
                continue
            if j > 0:
                acc = self._fold(acc, self.up_messages[kids[j - 1]], node, "up", counter)
            self.prefixes[(node, kid)] = acc
        if kids:
            acc = self._fold(acc, self.up_messages[kids[-1]], node, "up", counter)
        self.collected[node] = acc

    def _fold(
        self,
        acc: MassFunction | None,
        m: MassFunction | None,
        node: Scope,
        phase: str,
        counter: CombinationCounter,
    ) -> MassFunction | None:
        """Combine and count, skipping no-ops.

        An empty accumulator adopts the operand; a vacuous operand on
        either side is absorbed.  Neither case executes or counts a
        combination.
        """
        if m is None:
            return acc
        if acc is None:
            return m
        if m.is_vacuous():
            return acc
        if acc.is_vacuous():
            return m
        try:
            out = combine(acc, m).mass
        except TotalConflictError as exc:
            raise TotalConflictError(exc.detail, node=node, phase=phase) from None
        counter.record(node, phase)
        return out


def _edge_message(body: MassFunction, sender: Scope, receiver: Scope) -> MassFunction:
    """Project a combined mass down to the separator and lift it over.

    Neighbors with nothing in common exchange no information, so the
    message degenerates to the vacuous mass on the receiver.
    """
    separator = sender.intersection(receiver)
    if separator is None:
        return vacuous(receiver)
    reduced = marginalize(body, separator)
    if separator == receiver:
        return reduced
    return extend_mass(reduced, receiver)


# ---------------------------------------------------------------------------
# priors and the plain one-shot entry points


def assign_priors(
    rooted: RootedTree,
    masses: Iterable[MassFunction],
    counter: CombinationCounter | None = None,
) -> dict[Scope, MassFunction]:
    """Fold declared evidence into one prior per node.

    Several bodies of evidence on the same scope are combined in the
    order given; those combinations land in the counter's ``setup``
    tally.  Nodes with no evidence get the vacuous prior.
    """
    counter = CombinationCounter() if counter is None else counter
    priors: dict[Scope, MassFunction] = {n: vacuous(n) for n in rooted.nodes}
    for m in masses:
        node = m.scope
        if node not in priors:
            raise ScopeError(
                f"evidence on {scope_label(node)} matches no tree node"
            )
        current = priors[node]
        if current.is_vacuous():
            priors[node] = m
        elif m.is_vacuous():
            pass
        else:
            try:
                priors[node] = combine(current, m).mass
            except TotalConflictError as exc:
                raise TotalConflictError(exc.detail, node=node, phase="setup") from None
            counter.record(node, "setup")
    return priors


@dataclass(frozen=True)
class PropagationResult:
    """Marginals for every node plus the cost of getting them."""

    rooted: RootedTree
    marginals: Mapping[Scope, MassFunction]
    counter: CombinationCounter


def propagate(net: Network, root: Scope | None = None) -> PropagationResult:
    """One full cached propagation over a network document."""
    rooted = network_tree(net, root)
    counter = CombinationCounter()
    priors = assign_priors(rooted, (b.mass for b in net.beliefs), counter)
    engine = PropagationEngine(rooted, priors)
    engine.run(DirtySet.everything(rooted), rooted.nodes, counter)
    return PropagationResult(rooted, dict(engine.marginals), counter)


def propagate_naive(net: Network, root: Scope | None = None) -> PropagationResult:
    """Reference message passing with no shared intermediate results.

    Every message folds the sender's prior with all other incoming
    messages from scratch, and every marginal folds the node's prior
    with everything incoming.  Values match the cached engine; the
    combination count is what caching saves.
    """
    rooted = network_tree(net, root)
    counter = CombinationCounter()
    priors = assign_priors(rooted, (b.mass for b in net.beliefs), counter)
    tree = rooted.tree

    def neighbors(node: Scope) -> tuple[Scope, ...]:
        return tree.neighbors(node)

    messages: dict[tuple[Scope, Scope], MassFunction] = {}

    def message(sender: Scope, receiver: Scope) -> MassFunction:
        key = (sender, receiver)
        if key in messages:
            return messages[key]
        acc = priors[sender]
        for other in neighbors(sender):
            if other == receiver:
                continue
            acc = _naive_fold(acc, message(other, sender), sender, "up", counter)
        out = _edge_message(acc, sender, receiver)
        messages[key] = out
        return out

    marginals: dict[Scope, MassFunction] = {}
    for node in tree.nodes:
        acc = priors[node]
        for other in neighbors(node):
            acc = _naive_fold(acc, message(other, node), node, "down", counter)
        marginals[node] = acc
    return PropagationResult(rooted, marginals, counter)


def _naive_fold(
    acc: MassFunction,
    m: MassFunction,
    node: Scope,
    phase: str,
    counter: CombinationCounter,
) -> MassFunction:
    if m.is_vacuous():
        return acc
    if acc.is_vacuous():
        return m
    try:
        out = combine(acc, m).mass
    except TotalConflictError as exc:
        raise TotalConflictError(exc.detail, node=node, phase=phase) from None
    counter.record(node, phase)
    return out


def variable_marginal(
    result: PropagationResult, name: str
) -> MassFunction:
    """Belief about one variable, read off the smallest node holding it."""
    holders = [n for n in result.rooted.nodes if name in n.names]
    if not holders:
        raise ScopeError(f"no tree node mentions variable {name!r}")
    node = min(holders, key=lambda s: (len(s), s.names))
    target = Scope([node.variable(name)])
    return marginalize(result.marginals[node], target)
