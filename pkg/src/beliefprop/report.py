"""Rendering results for people and for machines.

The machine format is canonical JSON: one line, keys in fixed order,
every mass printed with six decimals.  Two runs over the same document
produce byte-identical output, which makes it diffable and safe to
hash.  The human format is a plain text table of the same content.
"""
from __future__ import annotations

import json
from typing import Any, Iterable, Mapping

from .frames import Scope, scope_label
from .mass import MassFunction
from .markov import RootedTree
from .network import Network, set_to_doc
from .oracle import GlobalResult, oracle_marginal
from .propagation import (
    CombinationCounter,
    DirtySet,
    PropagationResult,
    variable_marginal,
)

# -- canonical JSON ---------------------------------------------------------


def canonical_json(value: Any) -> str:
    """Serialize with fixed key order and six-decimal floats."""
    out: list[str] = []
    _emit(value, out)
    return "".join(out) + "\n"


def _emit(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, float):
        out.append(format(value, ".6f"))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(item, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


# -- shared payload pieces --------------------------------------------------


def focal_payload(m: MassFunction) -> list[dict[str, Any]]:
    return [
        {"set": set_to_doc(m.scope, bits), "mass": mass, "belief": m.belief(bits)}
        for bits, mass in m.focal.items()
    ]


def marginal_payload(rooted: RootedTree, marginals: Mapping[Scope, MassFunction]) -> list[dict[str, Any]]:
    synthetic = rooted.tree.synthetic
    return [
        {
            "scope": list(node.names),
            "synthetic": node in synthetic,
            "focal": focal_payload(marginals[node]),
        }
        for node in rooted.nodes
    ]


def variable_payload(net: Network, result: PropagationResult) -> list[dict[str, Any]]:
    return [
        {
            "name": v.name,
            "focal": focal_payload(variable_marginal(result, v.name)),
        }
        for v in net.variables
    ]


def tree_payload(rooted: RootedTree) -> dict[str, Any]:
    nodes = rooted.nodes
    index = {node: i for i, node in enumerate(nodes)}
    return {
        "nodes": [
            {
                "scope": list(n.names),
                "synthetic": n in rooted.tree.synthetic,
                "parent": None if n == rooted.root else index[rooted.parent[n]],
                "children": [index[k] for k in rooted.children[n]],
            }
            for n in nodes
        ],
        "edges": sorted(
            sorted([index[a], index[b]]) for a, b in map(tuple, rooted.tree.edges)
        ),
        "root": index[rooted.root],
    }


def counter_payload(counter: CombinationCounter, rooted: RootedTree) -> dict[str, Any]:
    per_node = counter.by_node()
    return {
        "setup": counter.setup,
        "up": counter.up,
        "down": counter.down,
        "total": counter.total,
        "perNode": [
            {"scope": list(node.names), "count": per_node[node]}
            for node in rooted.nodes
            if node in per_node
        ],
    }


def _edge_list(edges: Iterable[tuple[Scope, Scope]]) -> list[list[list[str]]]:
    return sorted(
        [list(a.names), list(b.names)] for a, b in edges
    )


def dirty_payload(dirty: DirtySet) -> dict[str, Any]:
    return {
        "upMessages": _edge_list(dirty.up_edges),
        "downMessages": _edge_list(dirty.down_edges),
        "collected": sorted(list(n.names) for n in dirty.collected),
        "prefixes": _edge_list(dirty.prefixes),
        "messageCount": dirty.message_count,
    }


def validity_payload(rooted: RootedTree, pending: DirtySet) -> dict[str, Any]:
    """Every stored message and cache entry with its valid flag.

    Clean entries are the ones a re-propagation would reuse; the rest
    are exactly the pending dirty set.
    """
    edges: list[dict[str, Any]] = []
    for node in rooted.nodes:
        if node == rooted.root:
            continue
        parent = rooted.parent[node]
        edges.append(
            {
                "from": list(node.names),
                "to": list(parent.names),
                "direction": "up",
                "valid": (node, parent) not in pending.up_edges,
            }
        )
        edges.append(
            {
                "from": list(parent.names),
                "to": list(node.names),
                "direction": "down",
                "valid": (parent, node) not in pending.down_edges,
            }
        )
    nodes = [
        {
            "scope": list(node.names),
            "collectedValid": node not in pending.collected,
            "prefixes": [
                {
                    "child": list(kid.names),
                    "valid": (node, kid) not in pending.prefixes,
                }
                for kid in rooted.children[node]
            ],
        }
        for node in rooted.nodes
    ]
    return {
        "clean": pending.is_empty,
        "edges": edges,
        "nodes": nodes,
        "pending": dirty_payload(pending),
    }


def delta_payload(
    net: Network, old: PropagationResult, new: PropagationResult
) -> list[dict[str, Any]]:
    """Per-variable marginal movement between two runs."""
    out = []
    for v in net.variables:
        before = variable_marginal(old, v.name)
        after = variable_marginal(new, v.name)
        changes = []
        for bits in sorted(set(before.focal) | set(after.focal)):
            m0 = before.focal.get(bits, 0.0)
            m1 = after.focal.get(bits, 0.0)
            changes.append(
                {
                    "set": set_to_doc(after.scope, bits),
                    "from": m0,
                    "to": m1,
                    "delta": m1 - m0,
                    "fromBelief": before.belief(bits),
                    "toBelief": after.belief(bits),
                }
            )
        out.append({"name": v.name, "changes": changes})
    return out


def propagate_payload(net: Network, result: PropagationResult) -> dict[str, Any]:
    return {
        "kind": "propagate",
        "root": list(result.rooted.root.names),
        "marginals": marginal_payload(result.rooted, result.marginals),
        "variables": variable_payload(net, result),
        "combinations": counter_payload(result.counter, result.rooted),
    }


def oracle_payload(net: Network, result: GlobalResult) -> dict[str, Any]:
    scopes = [b.scope for b in net.beliefs]
    seen: list[Scope] = []
    for s in scopes:
        if s not in seen:
            seen.append(s)
    return {
        "kind": "oracle",
        "scope": sorted(result.mass.scope.names) if result.mass else [],
        "normalization": result.cumulative_normalization,
        "combinations": result.combinations,
        "marginals": [
            {
                "scope": list(s.names),
                "focal": focal_payload(oracle_marginal(result, s)),
            }
            for s in seen
        ],
    }


# -- human rendering --------------------------------------------------------


def set_text(scope: Scope, bits: int) -> str:
    if bits == (1 << scope.size) - 1:
        return "*"
    parts = []
    rest = bits
    while rest:
        low = rest & -rest
        index = low.bit_length() - 1
        labels = scope.labels(index)
        if len(scope) == 1:
            parts.append(labels[0])
        else:
            parts.append(
                "(" + ",".join(f"{n}={v}" for n, v in zip(scope.names, labels)) + ")"
            )
        rest ^= low
    return "{" + ",".join(parts) + "}"


def _focal_lines(m: MassFunction, indent: str = "  ") -> list[str]:
    return [
        f"{indent}{set_text(m.scope, bits)} m={mass:.6f} Bel={m.belief(bits):.6f}"
        for bits, mass in m.focal.items()
    ]


def render_tree(rooted: RootedTree) -> str:
    lines = [f"root {scope_label(rooted.root)}"]

    def walk(node: Scope, depth: int) -> None:
        for kid in rooted.children[node]:
            tag = " (synthetic)" if kid in rooted.tree.synthetic else ""
            lines.append("  " * depth + f"- {scope_label(kid)}{tag}")
            walk(kid, depth + 1)

    if rooted.root in rooted.tree.synthetic:
        lines[0] += " (synthetic)"
    walk(rooted.root, 1)
    return "\n".join(lines) + "\n"


def render_propagation(
    net: Network,
    result: PropagationResult,
    comparison: PropagationResult | None = None,
    comparison_label: str = "uncached",
) -> str:
    lines: list[str] = []
    lines.append(
        f"network: {len(net.variables)} variables, {len(net.beliefs)} beliefs"
    )
    tree = result.rooted.tree
    lines.append(
        f"tree: {len(tree.nodes)} nodes, {len(tree.edges)} edges, "
        f"root {scope_label(result.rooted.root)}"
    )
    lines.append("")
    for node in result.rooted.nodes:
        tag = " (synthetic)" if node in tree.synthetic else ""
        lines.append(f"marginal {scope_label(node)}{tag}")
        lines.extend(_focal_lines(result.marginals[node]))
    lines.append("")
    for v in net.variables:
        lines.append(f"variable {v.name}")
        m = variable_marginal(result, v.name)
        for bits, mass in m.focal.items():
            lines.append(
                f"  {v.name}: {set_text(m.scope, bits)} "
                f"m={mass:.6f} Bel={m.belief(bits):.6f}"
            )
    lines.append("")
    c = result.counter
    lines.append(
        f"combinations: setup={c.setup} up={c.up} down={c.down} total={c.total}"
    )
    if comparison is not None:
        per_node = c.by_node()
        other = comparison.counter.by_node()
        lines.append(f"combinations by node (this run vs {comparison_label}):")
        for node in result.rooted.nodes:
            mine = per_node.get(node, 0)
            theirs = other.get(node, 0)
            if mine or theirs:
                lines.append(f"  {scope_label(node)}: {mine} vs {theirs}")
        lines.append(f"{comparison_label} total: {comparison.counter.total}")
    return "\n".join(lines) + "\n"


def render_diff_lines(
    net: Network, old: PropagationResult, new: PropagationResult
) -> list[str]:
    """Human lines for how each variable marginal moved."""
    lines: list[str] = []
    for v in net.variables:
        before = variable_marginal(old, v.name)
        after = variable_marginal(new, v.name)
        lines.append(f"variable {v.name}")
        for bits in sorted(set(before.focal) | set(after.focal)):
            m0 = before.focal.get(bits, 0.0)
            m1 = after.focal.get(bits, 0.0)
            lines.append(
                f"  {v.name}: {set_text(after.scope, bits)} "
                f"m {m0:.6f} -> {m1:.6f}  "
                f"Bel {before.belief(bits):.6f} -> {after.belief(bits):.6f}"
            )
    return lines


def render_oracle(net: Network, result: GlobalResult) -> str:
    lines = [
        f"global scope: "
        + (scope_label(result.mass.scope) if result.mass else "(none)"),
        f"cumulative normalization: {result.cumulative_normalization:.6f}",
        f"combinations: {result.combinations}",
        "",
    ]
    payloaded = oracle_payload(net, result)
    for entry in payloaded["marginals"]:
        scope = net.scope_for(entry["scope"])
        lines.append(f"marginal {scope_label(scope)}")
        lines.extend(_focal_lines(oracle_marginal(result, scope)))
    return "\n".join(lines) + "\n"
