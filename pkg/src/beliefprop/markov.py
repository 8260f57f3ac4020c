"""Hypergraphs, Markov trees, and how to build one from the other.

A Markov tree is a tree whose nodes are variable scopes such that for
any two nodes, every node on the path between them contains their
shared variables.  Local message passing computes exact marginals only
on such trees, so construction and verification both live here.

Verification is implemented twice on purpose: once as the literal
path/triple check (which yields a counterexample when it fails) and
once as the per-variable connected-subtree check.  The two are
logically equivalent and the test suite holds them to that.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .frames import Scope, scope_label


class NotATreeError(ValueError):
    """The claimed edge set is not a single connected acyclic graph."""


class HypergraphError(ValueError):
    """A hypergraph failed basic shape checks."""


@dataclass(frozen=True)
class Hypergraph:
    """A ground set of variables and the scopes (hyperedges) over them.

    Hyperedges keep their given order; construction code uses that
    order to make its output deterministic.  Every ground variable must
    appear in at least one hyperedge.
    """

    edges: tuple[Scope, ...]

    def __init__(self, edges: Iterable[Scope]):
        ordered: list[Scope] = []
        seen: set[tuple[str, ...]] = set()
        for edge in edges:
            if edge.names in seen:
                continue  # the same scope twice is still one hyperedge
            seen.add(edge.names)
            ordered.append(edge)
        if not ordered:
            raise HypergraphError("a hypergraph needs at least one hyperedge")
        object.__setattr__(self, "edges", tuple(ordered))

    @property
    def variables(self) -> tuple:
        table: dict[str, object] = {}
        for edge in self.edges:
            for v in edge.variables:
                known = table.get(v.name)
                if known is not None and known != v:
                    raise HypergraphError(
                        f"variable {v.name!r} declared with two different frames"
                    )
                table[v.name] = v
        return tuple(table[name] for name in sorted(table))


@dataclass(frozen=True)
class MarkovTree:
    """Scope-labelled tree: nodes in a fixed order plus undirected edges.

    The node order is load-bearing: it decides sibling order after
    rooting, which in turn pins every cache layout and counter value
    downstream.  ``synthetic`` flags nodes that carry no declared
    evidence of their own.
    """

    nodes: tuple[Scope, ...]
    edges: frozenset[frozenset[Scope]]
    synthetic: frozenset[Scope] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise NotATreeError("tree nodes must be distinct scopes")
        node_set = set(self.nodes)
        for edge in self.edges:
            if len(edge) != 2:
                raise NotATreeError("edges must join two distinct nodes")
            if not edge <= node_set:
                raise NotATreeError("edge endpoint is not a tree node")

    def neighbors(self, node: Scope) -> tuple[Scope, ...]:
        order = {scope: i for i, scope in enumerate(self.nodes)}
        near = [
            next(iter(edge - {node}))
            for edge in self.edges
            if node in edge
        ]
        return tuple(sorted(near, key=lambda s: order[s]))

    def is_tree(self) -> bool:
        return _connected_and_acyclic(self.nodes, self.edges)


def _connected_and_acyclic(
    nodes: Sequence[Scope], edges: frozenset[frozenset[Scope]]
) -> bool:
    if not nodes:
        return False
    if len(edges) != len(nodes) - 1:
        return False
    adjacency: dict[Scope, list[Scope]] = {n: [] for n in nodes}
    for edge in edges:
        a, b = tuple(edge)
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen = {nodes[0]}
    frontier = [nodes[0]]
    while frontier:
        current = frontier.pop()
        for nxt in adjacency[current]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == len(nodes)


def tree_path(tree: MarkovTree, start: Scope, goal: Scope) -> list[Scope]:
    """The unique node path from ``start`` to ``goal``, inclusive."""
    parent: dict[Scope, Scope | None] = {start: None}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        if current == goal:
            break
        for nxt in tree.neighbors(current):
            if nxt not in parent:
                parent[nxt] = current
                frontier.append(nxt)
    if goal not in parent:
        raise NotATreeError("no path between the given nodes")
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])  # type: ignore[arg-type]
    path.reverse()
    return path


def verify_markov(tree: MarkovTree) -> tuple[bool, tuple[Scope, Scope, Scope] | None]:
    """Check the Markov property by walking node pairs.

    Returns ``(True, None)`` when every node on the path between any
    two nodes contains their shared variables, and otherwise
    ``(False, (a, b, offender))`` with a concrete violating triple.
    Raises :class:`NotATreeError` when the edge set is not a tree at
    all, since the property is only meaningful on trees.
    """
    if not tree.is_tree():
        raise NotATreeError("not a connected acyclic graph")
    nodes = tree.nodes
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            shared = a.intersection(b)
            if shared is None:
                continue
            for inner in tree_path(tree, a, b)[1:-1]:
                if not shared.is_subscope(inner):
                    return False, (a, b, inner)
    return True, None


def running_intersection_holds(tree: MarkovTree) -> bool:
    """Equivalent check: each variable's nodes induce a connected subtree."""
    if not tree.is_tree():
        raise NotATreeError("not a connected acyclic graph")
    variables = {v.name for node in tree.nodes for v in node.variables}
    for name in variables:
        holding = [node for node in tree.nodes if name in node]
        if len(holding) <= 1:
            continue
        member = set(holding)
        seen = {holding[0]}
        frontier = [holding[0]]
        while frontier:
            current = frontier.pop()
            for nxt in tree.neighbors(current):
                if nxt in member and nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if len(seen) != len(holding):
            return False
    return True


def build_tree(hypergraph: Hypergraph) -> MarkovTree:
    """Grow a Markov tree whose nodes cover every hyperedge.

    Strategy: repeated variable elimination with a one-step look-ahead
    (eliminate the variable whose incident scopes have the smallest
    union, ties broken by name), which yields a chain of cluster
    scopes; clusters link to where their residual is absorbed, and each
    original hyperedge that is not itself a cluster hangs off the
    smallest cluster containing it.  Output always satisfies the Markov
    property; nodes beyond the original hyperedges are flagged
    synthetic.
    """
    original = list(hypergraph.edges)
    pool: list[Scope] = list(original)
    remaining = {v.name: v for edge in pool for v in edge.variables}

    clusters: list[Scope] = []
    residual_of: list[Scope | None] = []
    eliminated_at: dict[str, int] = {}

    while remaining:
        best_name = None
        best_union: Scope | None = None
        for name in sorted(remaining):
            incident = [s for s in pool if name in s]
            union = incident[0]
            for s in incident[1:]:
                union = union.union(s)
            if best_union is None or union.size < best_union.size:
                best_name, best_union = name, union
        assert best_name is not None and best_union is not None

        step = len(clusters)
        eliminated_at[best_name] = step
        clusters.append(best_union)
        pool = [s for s in pool if best_name not in s]
        rest = [v for v in best_union.variables if v.name != best_name]
        if rest:
            residual = Scope(rest)
            residual_of.append(residual)
            if all(residual.names != s.names for s in pool):
                pool.append(residual)
        else:
            residual_of.append(None)
        del remaining[best_name]

    edges: set[frozenset[Scope]] = set()
    component_roots: list[Scope] = []
    for step, residual in enumerate(residual_of):
        if residual is None:
            component_roots.append(clusters[step])
            continue
        absorb_step = min(eliminated_at[name] for name in residual.names)
        edges.add(frozenset({clusters[step], clusters[absorb_step]}))
    # Disconnected hypergraphs leave several cluster chains; chain their
    # roots together (their intersections are empty, so any linking works).
    for left, right in zip(component_roots, component_roots[1:]):
        edges.add(frozenset({left, right}))

    cluster_names = {c.names for c in clusters}
    ordered_nodes: list[Scope] = []
    for edge in original:
        ordered_nodes.append(edge)
    for cluster in clusters:
        if all(cluster.names != n.names for n in ordered_nodes):
            ordered_nodes.append(cluster)

    for edge in original:
        if edge.names in cluster_names:
            continue
        covering = [c for c in clusters if edge.is_subscope(c)]
        host = min(covering, key=lambda c: (len(c), c.names))
        edges.add(frozenset({edge, host}))

    synthetic = frozenset(
        node for node in ordered_nodes
        if all(node.names != e.names for e in original)
    )
    return MarkovTree(tuple(ordered_nodes), frozenset(edges), synthetic)


@dataclass(frozen=True)
class RootedTree:
    """A Markov tree with a chosen root and a fixed order of children."""

    tree: MarkovTree
    root: Scope
    parent: Mapping[Scope, Scope]
    children: Mapping[Scope, tuple[Scope, ...]]

    @property
    def nodes(self) -> tuple[Scope, ...]:
        return self.tree.nodes

    def left_siblings(self, node: Scope) -> tuple[Scope, ...]:
        parent = self.parent.get(node)
        if parent is None:
            return ()
        siblings = self.children[parent]
        return siblings[: siblings.index(node)]

    def right_siblings(self, node: Scope) -> tuple[Scope, ...]:
        parent = self.parent.get(node)
        if parent is None:
            return ()
        siblings = self.children[parent]
        return siblings[siblings.index(node) + 1 :]

    def post_order(self) -> list[Scope]:
        """Children strictly before parents (the upward sweep order)."""
        out: list[Scope] = []
        stack: list[tuple[Scope, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for child in reversed(self.children[node]):
                    stack.append((child, False))
        return out

    def pre_order(self) -> list[Scope]:
        """Parents strictly before children (the downward sweep order)."""
        out: list[Scope] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            for child in reversed(self.children[node]):
                stack.append(child)
        return out

    def path_to_root(self, node: Scope) -> list[Scope]:
        path = [node]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path


def default_root(tree: MarkovTree) -> Scope:
    """Largest scope wins; ties go to the lexicographically first names."""
    return min(tree.nodes, key=lambda s: (-len(s), s.names))


def root_at(
    tree: MarkovTree,
    root: Scope | None = None,
    child_order: Mapping[Scope, Sequence[Scope]] | None = None,
) -> RootedTree:
    """Orient a verified tree away from ``root``.

    Children default to the tree's node order; ``child_order`` may
    override the order per node (it must be a permutation of the
    computed children, which keeps every cache argument honest).
    """
    if root is None:
        root = default_root(tree)
    if root not in tree.nodes:
        raise NotATreeError(f"root {scope_label(root)} is not a tree node")
    if not tree.is_tree():
        raise NotATreeError("not a connected acyclic graph")

    parent: dict[Scope, Scope] = {}
    children: dict[Scope, tuple[Scope, ...]] = {}
    frontier = [root]
    seen = {root}
    while frontier:
        node = frontier.pop()
        kids = [n for n in tree.neighbors(node) if n not in seen]
        if child_order and node in child_order:
            override = tuple(child_order[node])
            if set(override) != set(kids) or len(override) != len(kids):
                raise NotATreeError(
                    f"child order for {scope_label(node)} is not a permutation"
                )
            kids = list(override)
        children[node] = tuple(kids)
        for kid in kids:
            parent[kid] = node
            seen.add(kid)
            frontier.append(kid)
    return RootedTree(tree=tree, root=root, parent=parent, children=children)
