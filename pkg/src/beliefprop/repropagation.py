"""Incremental re-propagation after evidence changes.

A change at one node only stales part of the message caches: upward
messages along the path from the changed node to the root, downward
messages into everything off that path, collected masses on the path,
and the prefix entries sitting to the right of the path at each step.
:func:`invalidation_for_change` spells that out as a
:class:`~beliefprop.propagation.DirtySet`, and
:class:`PropagationSession` accumulates such sets across edits so one
re-run settles them all, reusing every message the changes did not
touch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .dempster import TotalConflictError, combine
from .frames import Scope, ScopeError, scope_label
from .mass import MassFunction, focal_close, require_valid
from .markov import RootedTree
from .network import Network, network_tree
from .propagation import (
    CombinationCounter,
    DirtySet,
    PropagationEngine,
    PropagationResult,
    assign_priors,
)


def invalidation_for_change(rooted: RootedTree, node: Scope) -> DirtySet:
    """What a new prior at ``node`` stales, and nothing more.

    Exactly half of the stored messages survive any single change: the
    upward ones off the path and the downward ones into it.
    """
    if node not in rooted.tree.nodes:
        raise ScopeError(f"{scope_label(node)} is not a node of the tree")
    path = rooted.path_to_root(node)
    on_path = set(path)

    up = set()
    prefixes = set()
    for step in path:
        if step == rooted.root:
            continue
        parent = rooted.parent[step]
        up.add((step, parent))
        for sibling in rooted.right_siblings(step):
            prefixes.add((parent, sibling))

    down = set()
    for parent, kids in rooted.children.items():
        for kid in kids:
            if kid not in on_path:
                down.add((parent, kid))

    return DirtySet(
        frozenset(up), frozenset(down), frozenset(on_path), frozenset(prefixes)
    )


@dataclass(frozen=True)
class SessionCheckpoint:
    """Opaque copy of a session's full state, for rollback."""

    network: Network
    priors: dict[Scope, MassFunction]
    up_messages: dict[Scope, MassFunction]
    down_messages: dict[Scope, MassFunction]
    collected: dict[Scope, MassFunction]
    prefixes: dict[tuple[Scope, Scope], MassFunction]
    marginals: dict[Scope, MassFunction]
    pending: DirtySet
    pending_changed: frozenset[Scope]
    revision: int
    lifetime: CombinationCounter


class PropagationSession:
    """A network, its rooted tree, and live caches that follow edits.

    The session starts cold; :meth:`propagate` performs the full first
    sweep.  After that, :meth:`set_belief` records evidence changes and
    their invalidations, and :meth:`repropagate` settles all pending
    changes in one partial run.  ``revision`` ticks once per completed
    run, never for previews or rejected changes.
    """

    def __init__(self, net: Network, root: Scope | None = None):
        self.network = net
        self.rooted: RootedTree = network_tree(net, root)
        self.lifetime = CombinationCounter()
        priors = assign_priors(
            self.rooted, (b.mass for b in net.beliefs), self.lifetime
        )
        self.engine = PropagationEngine(self.rooted, priors)
        self.pending: DirtySet = DirtySet.empty()
        self.pending_changed: set[Scope] = set()
        self.revision = 0
        self.last_run: CombinationCounter | None = None

    # -- read side ----------------------------------------------------

    @property
    def marginals(self) -> Mapping[Scope, MassFunction]:
        return self.engine.marginals

    def result(self) -> PropagationResult:
        return PropagationResult(
            self.rooted, dict(self.engine.marginals), self.lifetime.copy()
        )

    # -- runs ---------------------------------------------------------

    def propagate(self) -> CombinationCounter:
        """Full sweep from the priors; resets nothing but the caches."""
        counter = self._guarded_run(
            DirtySet.everything(self.rooted), set(self.rooted.nodes)
        )
        self.pending = DirtySet.empty()
        self.pending_changed = set()
        return counter

    def repropagate(self) -> CombinationCounter:
        """Settle every pending change, reusing all clean caches.

        With nothing pending this is free: the run touches no cache and
        executes no combination, but still counts as a revision.
        """
        counter = self._guarded_run(self.pending, self.pending_changed)
        self.pending = DirtySet.empty()
        self.pending_changed = set()
        return counter

    def _guarded_run(self, dirty: DirtySet, changed: set[Scope]) -> CombinationCounter:
        engine = self.engine
        saved = (
            dict(engine.up_messages),
            dict(engine.down_messages),
            dict(engine.collected),
            dict(engine.prefixes),
            dict(engine.marginals),
        )
        counter = CombinationCounter()
        try:
            engine.run(dirty, changed, counter)
        except TotalConflictError:
            (
                engine.up_messages,
                engine.down_messages,
                engine.collected,
                engine.prefixes,
                engine.marginals,
            ) = saved
            raise
        self.lifetime.merge(counter)
        self.last_run = counter
        self.revision += 1
        return counter

    # -- edits --------------------------------------------------------

    def preview(self, belief_id: str, mass: MassFunction) -> DirtySet:
        """The invalidation :meth:`set_belief` would record, untouched."""
        decl = self.network.belief(belief_id)
        if mass.scope != decl.scope:
            raise ScopeError(
                f"belief {belief_id!r} is on {scope_label(decl.scope)}, "
                f"not {scope_label(mass.scope)}"
            )
        require_valid(mass, context=f"belief {belief_id}")
        if focal_close(mass, decl.mass):
            return DirtySet.empty()
        return invalidation_for_change(self.rooted, decl.scope)

    def preview_prior(self, node: Scope, mass: MassFunction) -> DirtySet:
        """The invalidation :meth:`set_prior` would record, untouched."""
        current = self.engine.priors.get(node)
        if current is None:
            raise KeyError(f"{scope_label(node)} is not a node of the tree")
        if mass.scope != node:
            raise ScopeError(
                f"prior for {scope_label(node)} must live on that scope, "
                f"not {scope_label(mass.scope)}"
            )
        require_valid(mass, context=f"prior on {scope_label(node)}")
        if focal_close(mass, current):
            return DirtySet.empty()
        return invalidation_for_change(self.rooted, node)

    def set_prior(self, node: Scope, mass: MassFunction) -> DirtySet:
        """Replace the prior carried by one tree node.

        Returns the dirty set of this change alone; the session unions
        it into the pending set so a later :meth:`repropagate` settles
        everything at once.  Re-setting a prior to the value it already
        holds (focal sets matching within the comparison tolerance)
        changes nothing and returns the empty set.
        """
        dirty = self.preview_prior(node, mass)
        if dirty.is_empty:
            return dirty
        self.engine.priors[node] = mass
        self.pending = self.pending.union(dirty)
        self.pending_changed.add(node)
        return dirty

    def set_belief(self, belief_id: str, mass: MassFunction) -> DirtySet:
        """Replace one body of evidence and queue its invalidation.

        The document keeps a belief per declaration while the tree
        carries one prior per node, so this refolds every declaration
        sharing the node's scope and hands the result to
        :meth:`set_prior`.
        """
        dirty = self.preview(belief_id, mass)
        if dirty.is_empty:
            return dirty
        node = self.network.belief(belief_id).scope
        self.network = self.network.replace_belief(belief_id, mass)
        return self.set_prior(node, self._prior_for(node))

    def _prior_for(self, node: Scope) -> MassFunction:
        masses = [b.mass for b in self.network.beliefs if b.scope == node]
        acc: MassFunction | None = None
        for m in masses:
            if acc is None or acc.is_vacuous():
                acc = m
            elif m.is_vacuous():
                continue
            else:
                try:
                    acc = combine(acc, m).mass
                except TotalConflictError as exc:
                    raise TotalConflictError(
                        exc.detail, node=node, phase="setup"
                    ) from None
                self.lifetime.record(node, "setup")
        if acc is None:
            raise ScopeError(f"no evidence declared on {scope_label(node)}")
        return acc

    # -- rollback -----------------------------------------------------

    def checkpoint(self) -> SessionCheckpoint:
        engine = self.engine
        return SessionCheckpoint(
            network=self.network,
            priors=dict(engine.priors),
            up_messages=dict(engine.up_messages),
            down_messages=dict(engine.down_messages),
            collected=dict(engine.collected),
            prefixes=dict(engine.prefixes),
            marginals=dict(engine.marginals),
            pending=self.pending,
            pending_changed=frozenset(self.pending_changed),
            revision=self.revision,
            lifetime=self.lifetime.copy(),
        )

    def restore(self, checkpoint: SessionCheckpoint) -> None:
        engine = self.engine
        self.network = checkpoint.network
        engine.priors = dict(checkpoint.priors)
        engine.up_messages = dict(checkpoint.up_messages)
        engine.down_messages = dict(checkpoint.down_messages)
        engine.collected = dict(checkpoint.collected)
        engine.prefixes = dict(checkpoint.prefixes)
        engine.marginals = dict(checkpoint.marginals)
        self.pending = checkpoint.pending
        self.pending_changed = set(checkpoint.pending_changed)
        self.revision = checkpoint.revision
        self.lifetime = checkpoint.lifetime.copy()
