"""The network document: variables, evidence, and an optional tree.

A network is described by a JSON document:

.. code-block:: json

    {
      "variables": [{"name": "a", "frame": ["0", "1"]}],
      "beliefs": [
        {"id": "m_a", "scope": ["a"],
         "focal": [{"set": [{"a": "1"}], "mass": 0.6},
                   {"set": "*", "mass": 0.4}]}
      ],
      "tree": {"nodes": [["a"], ["a", "b"], ["b"]],
               "edges": [[0, 1], [1, 2]]},
      "root": ["a", "b"]
    }

``tree`` and ``root`` are optional.  Focal sets are lists of
configurations given as name-to-label objects (matched by name, never
by position) or the shorthand ``"*"`` for the full frame.  Parsing
errors carry the document path of the offending field.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping

from .frames import Scope, ScopeError, Variable
from .markov import (
    Hypergraph,
    MarkovTree,
    NotATreeError,
    RootedTree,
    build_tree,
    root_at,
    verify_markov,
)
from .mass import MassFunction, require_valid, InvalidMassError

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class NetworkFormatError(ValueError):
    """A document failed structural validation.

    ``path`` points into the document (e.g. ``beliefs[0].focal[1]``);
    ``line`` is only set for JSON syntax errors.
    """

    def __init__(self, message: str, *, path: str = "", line: int | None = None):
        where = f" at {path}" if path else ""
        where += f" (line {line})" if line is not None else ""
        super().__init__(message + where)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class BeliefDecl:
    """One named body of evidence from the document."""

    id: str
    mass: MassFunction

    @property
    def scope(self) -> Scope:
        return self.mass.scope


@dataclass(frozen=True)
class Network:
    """A parsed network document."""

    variables: tuple[Variable, ...]
    beliefs: tuple[BeliefDecl, ...]
    tree: MarkovTree | None = None
    root: Scope | None = None
    cap: int | None = None

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ScopeError(f"unknown variable {name!r}")

    def scope_for(self, names: Iterable[str]) -> Scope:
        return Scope((self.variable(n) for n in names), cap=self.cap)

    def belief(self, belief_id: str) -> BeliefDecl:
        for b in self.beliefs:
            if b.id == belief_id:
                return b
        raise KeyError(f"no belief with id {belief_id!r}")

    def replace_belief(self, belief_id: str, mass: MassFunction) -> "Network":
        found = False
        updated = []
        for b in self.beliefs:
            if b.id == belief_id:
                updated.append(BeliefDecl(b.id, mass))
                found = True
            else:
                updated.append(b)
        if not found:
            raise KeyError(f"no belief with id {belief_id!r}")
        return replace(self, beliefs=tuple(updated))


# ---------------------------------------------------------------------------
# parsing


def parse_network(text: str, cap: int | None = None) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"not valid JSON: {exc.msg}", line=exc.lineno) from exc
    return network_from_doc(doc, cap=cap)


def network_from_doc(doc: Any, cap: int | None = None) -> Network:
    if not isinstance(doc, dict):
        raise NetworkFormatError("document root must be an object")
    unknown = set(doc) - {"variables", "beliefs", "tree", "root"}
    if unknown:
        raise NetworkFormatError(f"unknown top-level keys: {sorted(unknown)}")

    variables = _parse_variables(doc.get("variables"))
    table = {v.name: v for v in variables}
    beliefs = _parse_beliefs(doc.get("beliefs"), table, cap)
    tree = _parse_tree(doc.get("tree"), table, beliefs, cap)
    root = None
    if "root" in doc:
        root = _parse_scope(doc["root"], table, cap, path="root")
    return Network(
        variables=variables, beliefs=beliefs, tree=tree, root=root, cap=cap
    )


def _parse_variables(raw: Any) -> tuple[Variable, ...]:
    if not isinstance(raw, list) or not raw:
        raise NetworkFormatError(
            "variables must be a non-empty list", path="variables"
        )
    out: list[Variable] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        path = f"variables[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"name", "frame"}:
            raise NetworkFormatError(
                "variable entries need exactly the keys 'name' and 'frame'",
                path=path,
            )
        name = entry["name"]
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise NetworkFormatError(
                f"variable name {name!r} is not an identifier", path=path
            )
        if name in seen:
            raise NetworkFormatError(f"duplicate variable {name!r}", path=path)
        seen.add(name)
        frame = entry["frame"]
        if (
            not isinstance(frame, list)
            or not frame
            or any(not isinstance(x, str) for x in frame)
        ):
            raise NetworkFormatError(
                "frame must be a non-empty list of strings", path=path
            )
        try:
            out.append(Variable(name, tuple(frame)))
        except ScopeError as exc:
            raise NetworkFormatError(str(exc), path=path) from exc
    return tuple(out)


def _parse_scope(
    raw: Any, table: Mapping[str, Variable], cap: int | None, path: str
) -> Scope:
    if (
        not isinstance(raw, list)
        or not raw
        or any(not isinstance(n, str) for n in raw)
    ):
        raise NetworkFormatError(
            "scope must be a non-empty list of variable names", path=path
        )
    missing = [n for n in raw if n not in table]
    if missing:
        raise NetworkFormatError(f"unknown variables {missing}", path=path)
    if len(set(raw)) != len(raw):
        raise NetworkFormatError("scope repeats a variable", path=path)
    try:
        return Scope((table[n] for n in raw), cap=cap)
    except ScopeError as exc:
        raise NetworkFormatError(str(exc), path=path) from exc


def parse_focal(
    raw: Any, scope: Scope, path: str = "focal"
) -> MassFunction:
    """Parse a focal list against a known scope (shared with updates)."""
    if not isinstance(raw, list) or not raw:
        raise NetworkFormatError(
            "focal must be a non-empty list of {set, mass} entries", path=path
        )
    focal: dict[int, float] = {}
    for j, item in enumerate(raw):
        entry_path = f"{path}[{j}]"
        if not isinstance(item, dict) or set(item) != {"set", "mass"}:
            raise NetworkFormatError(
                "focal entries need exactly the keys 'set' and 'mass'",
                path=entry_path,
            )
        mass = item["mass"]
        if isinstance(mass, bool) or not isinstance(mass, (int, float)):
            raise NetworkFormatError(
                "mass must be a number", path=f"{entry_path}.mass"
            )
        bits = _parse_set(item["set"], scope, f"{entry_path}.set")
        if bits in focal:
            raise NetworkFormatError(
                "the same focal set appears twice", path=f"{entry_path}.set"
            )
        focal[bits] = float(mass)
    return MassFunction(scope, focal)


def _parse_set(raw: Any, scope: Scope, path: str) -> int:
    if raw == "*":
        return (1 << scope.size) - 1
    if not isinstance(raw, list) or not raw:
        raise NetworkFormatError(
            "a focal set is '*' or a non-empty list of configurations",
            path=path,
        )
    bits = 0
    for k, config in enumerate(raw):
        if not isinstance(config, dict) or any(
            not isinstance(v, str) for v in config.values()
        ):
            raise NetworkFormatError(
                "configurations are objects mapping variable names to labels",
                path=f"{path}[{k}]",
            )
        try:
            bits |= 1 << scope.index_of(config)
        except ScopeError as exc:
            raise NetworkFormatError(str(exc), path=f"{path}[{k}]") from exc
    return bits


def _parse_beliefs(
    raw: Any, table: Mapping[str, Variable], cap: int | None
) -> tuple[BeliefDecl, ...]:
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise NetworkFormatError("beliefs must be a list", path="beliefs")
    out: list[BeliefDecl] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        path = f"beliefs[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"id", "scope", "focal"}:
            raise NetworkFormatError(
                "belief entries need exactly the keys 'id', 'scope' and 'focal'",
                path=path,
            )
        belief_id = entry["id"]
        if not isinstance(belief_id, str) or not belief_id:
            raise NetworkFormatError("belief id must be a non-empty string", path=path)
        if belief_id in seen:
            raise NetworkFormatError(
                f"duplicate belief id {belief_id!r}", path=path
            )
        seen.add(belief_id)
        scope = _parse_scope(entry["scope"], table, cap, path=f"{path}.scope")
        mass = parse_focal(entry["focal"], scope, path=f"{path}.focal")
        try:
            require_valid(mass, context=f"belief {belief_id!r}")
        except InvalidMassError as exc:
            raise NetworkFormatError(str(exc), path=f"{path}.focal") from exc
        out.append(BeliefDecl(belief_id, mass))
    return tuple(out)


def _parse_tree(
    raw: Any,
    table: Mapping[str, Variable],
    beliefs: tuple[BeliefDecl, ...],
    cap: int | None,
) -> MarkovTree | None:
    if raw is None:
        return None
    if not isinstance(raw, dict) or set(raw) != {"nodes", "edges"}:
        raise NetworkFormatError(
            "tree needs exactly the keys 'nodes' and 'edges'", path="tree"
        )
    raw_nodes = raw["nodes"]
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise NetworkFormatError(
            "tree.nodes must be a non-empty list of scopes", path="tree.nodes"
        )
    nodes = [
        _parse_scope(entry, table, cap, path=f"tree.nodes[{i}]")
        for i, entry in enumerate(raw_nodes)
    ]
    if len(set(nodes)) != len(nodes):
        raise NetworkFormatError("tree nodes repeat a scope", path="tree.nodes")

    raw_edges = raw["edges"]
    if not isinstance(raw_edges, list):
        raise NetworkFormatError("tree.edges must be a list", path="tree.edges")
    edges: set[frozenset[Scope]] = set()
    for i, pair in enumerate(raw_edges):
        path = f"tree.edges[{i}]"
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or any(not isinstance(x, int) or isinstance(x, bool) for x in pair)
        ):
            raise NetworkFormatError(
                "edges are pairs of node indices", path=path
            )
        a, b = pair
        if not (0 <= a < len(nodes) and 0 <= b < len(nodes)) or a == b:
            raise NetworkFormatError(
                f"edge [{a}, {b}] does not join two distinct nodes", path=path
            )
        edges.add(frozenset({nodes[a], nodes[b]}))

    evidence_scopes = {b.scope.names for b in beliefs}
    synthetic = frozenset(n for n in nodes if n.names not in evidence_scopes)
    tree = MarkovTree(tuple(nodes), frozenset(edges), synthetic)
    if not tree.is_tree():
        raise NotATreeError("tree edges do not form a connected acyclic graph")
    ok, triple = verify_markov(tree)
    if not ok:
        a, b, inner = triple  # type: ignore[misc]
        raise NotATreeError(
            "not a Markov tree: the path between "
            f"{list(a.names)} and {list(b.names)} passes through "
            f"{list(inner.names)}, which drops shared variables"
        )

    node_names = {n.names for n in nodes}
    for b in beliefs:
        if b.scope.names not in node_names:
            raise NetworkFormatError(
                f"belief {b.id!r} has scope {list(b.scope.names)} "
                "but the tree has no node with that scope",
                path="tree.nodes",
            )
    covered = {name for n in nodes for name in n.names}
    missing = [v for v in table if v not in covered]
    if missing:
        raise NetworkFormatError(
            f"tree covers no node for variables {missing}", path="tree.nodes"
        )
    return tree


# ---------------------------------------------------------------------------
# serialization


def set_to_doc(scope: Scope, bits: int) -> Any:
    if bits == (1 << scope.size) - 1:
        return "*"
    out = []
    rest = bits
    while rest:
        low = rest & -rest
        index = low.bit_length() - 1
        labels = scope.labels(index)
        out.append({name: label for name, label in zip(scope.names, labels)})
        rest ^= low
    return out


def focal_to_doc(m: MassFunction) -> list[dict[str, Any]]:
    return [
        {"set": set_to_doc(m.scope, bits), "mass": value}
        for bits, value in m.focal.items()
    ]


def network_to_doc(net: Network) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "variables": [
            {"name": v.name, "frame": list(v.frame)} for v in net.variables
        ],
        "beliefs": [
            {
                "id": b.id,
                "scope": list(b.scope.names),
                "focal": focal_to_doc(b.mass),
            }
            for b in net.beliefs
        ],
    }
    if net.tree is not None:
        index = {node: i for i, node in enumerate(net.tree.nodes)}
        doc["tree"] = {
            "nodes": [list(n.names) for n in net.tree.nodes],
            "edges": sorted(
                sorted([index[a], index[b]]) for a, b in map(tuple, net.tree.edges)
            ),
        }
    if net.root is not None:
        doc["root"] = list(net.root.names)
    return doc


def render_network(net: Network) -> str:
    return json.dumps(network_to_doc(net), indent=2) + "\n"


# ---------------------------------------------------------------------------
# turning the document into something to propagate on


def network_hypergraph(net: Network) -> Hypergraph:
    """Evidence scopes plus a singleton for every uncovered variable."""
    edges: list[Scope] = [b.scope for b in net.beliefs]
    covered = {name for s in edges for name in s.names}
    for v in net.variables:
        if v.name not in covered:
            edges.append(Scope([v], cap=net.cap))
    return Hypergraph(edges)


def network_tree(net: Network, root: Scope | None = None) -> RootedTree:
    """The rooted Markov tree a document propagates on.

    An explicit tree from the document is honored as-is (it was already
    verified at parse time); otherwise one is built from the evidence
    scopes.  Either way nodes carrying no declared evidence are flagged
    synthetic.  ``root`` overrides the document root, which overrides
    the default choice of the largest scope.
    """
    if net.tree is not None:
        tree = net.tree
    else:
        tree = build_tree(network_hypergraph(net))
        evidence_scopes = {b.scope.names for b in net.beliefs}
        tree = replace(
            tree,
            synthetic=frozenset(
                n for n in tree.nodes if n.names not in evidence_scopes
            ),
        )
    chosen = root or net.root
    if chosen is not None and chosen not in tree.nodes:
        raise NotATreeError(
            f"requested root {list(chosen.names)} is not a node of the tree"
        )
    return root_at(tree, chosen)
