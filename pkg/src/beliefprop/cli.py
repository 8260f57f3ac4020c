"""Command line front end.

Subcommands cover the whole lifecycle of a network document: check it
(``validate``), look at its tree (``tree``), run the cached sweeps
(``propagate``), cross-check against the brute-force evaluation
(``oracle``), apply an evidence change incrementally (``update``), and
host the HTTP workbench (``serve``).

Exit codes: 0 on success, 2 for unreadable or invalid documents and
arguments, 3 for total conflict, 4 when a scope outgrows the frame cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .dempster import TotalConflictError
from .frames import FrameCapError, Scope, ScopeError, scope_label
from .mass import InvalidMassError, require_valid
from .markov import HypergraphError, NotATreeError
from .network import (
    Network,
    NetworkFormatError,
    network_tree,
    parse_focal,
    parse_network,
)
from .oracle import global_belief
from .propagation import propagate, propagate_naive
from .repropagation import PropagationSession
from . import report


def _load(path: str, cap: int | None = None) -> Network:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_network(handle.read(), cap=cap)


def _root_scope(net: Network, spec: str | None) -> Scope | None:
    if spec is None:
        return None
    names = [part.strip() for part in spec.split(",") if part.strip()]
    if not names:
        raise NetworkFormatError("empty --root")
    return net.scope_for(names)


def _emit(args: argparse.Namespace, payload: dict[str, Any], human: str) -> None:
    if getattr(args, "machine", False):
        sys.stdout.write(report.canonical_json(payload))
    else:
        sys.stdout.write(human)


# -- subcommands ------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    net = _load(args.file)
    rooted = network_tree(net, _root_scope(net, args.root))
    source = "explicit" if net.tree is not None else "built"
    sys.stdout.write(
        f"ok: {len(net.variables)} variables, {len(net.beliefs)} beliefs, "
        f"{source} tree with {len(rooted.nodes)} nodes, "
        f"root {scope_label(rooted.root)}\n"
    )
    return 0


def cmd_tree(args: argparse.Namespace) -> int:
    net = _load(args.file)
    rooted = network_tree(net, _root_scope(net, args.root))
    sys.stdout.write(report.render_tree(rooted))
    return 0


def cmd_propagate(args: argparse.Namespace) -> int:
    net = _load(args.file)
    root = _root_scope(net, args.root)
    if args.naive:
        result = propagate_naive(net, root)
        comparison = propagate(net, root) if args.stats else None
        label = "cached"
    else:
        result = propagate(net, root)
        comparison = propagate_naive(net, root) if args.stats else None
        label = "uncached"
    payload = report.propagate_payload(net, result)
    payload["scheduler"] = "uncached" if args.naive else "cached"
    if comparison is not None:
        payload[label] = report.counter_payload(comparison.counter, comparison.rooted)
    _emit(args, payload, report.render_propagation(net, result, comparison, label))
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    net = _load(args.file)
    result = global_belief(net)
    _emit(args, report.oracle_payload(net, result), report.render_oracle(net, result))
    return 0


def _load_focal_file(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"replacement file is not valid JSON: {exc.msg}", line=exc.lineno
        ) from exc
    if isinstance(raw, dict):
        if "focal" not in raw:
            raise NetworkFormatError(
                "replacement object needs a 'focal' list", path="focal"
            )
        raw = raw["focal"]
    return raw


def cmd_update(args: argparse.Namespace) -> int:
    net = _load(args.file)
    session = PropagationSession(net, _root_scope(net, args.root))
    session.propagate()
    before = session.result()

    decl = session.network.belief(args.belief)
    mass = parse_focal(_load_focal_file(args.with_file), decl.scope, path="focal")
    require_valid(mass, context=f"belief {args.belief!r}")

    payload: dict[str, Any] = {
        "kind": "update",
        "belief": args.belief,
        "preview": bool(args.preview),
    }
    lines = [f"belief {args.belief} on {scope_label(decl.scope)}"]
    if args.preview:
        dirty = session.preview(args.belief, mass)
        payload["dirty"] = report.dirty_payload(dirty)
        lines.append(
            f"preview: change would discard {dirty.message_count} of "
            f"{_message_total(session)} messages"
        )
        _emit(args, payload, "\n".join(lines) + "\n")
        return 0

    dirty = session.set_belief(args.belief, mass)
    run = session.repropagate()
    fresh = propagate(session.network, session.rooted.root)
    after = session.result()

    payload["dirty"] = report.dirty_payload(dirty)
    payload["combinations"] = report.counter_payload(run, session.rooted)
    payload["freshRun"] = report.counter_payload(fresh.counter, fresh.rooted)
    payload["deltas"] = report.delta_payload(net, before, after)
    payload["marginals"] = report.marginal_payload(session.rooted, session.marginals)
    payload["variables"] = report.variable_payload(net, after)

    lines.append(
        f"update discarded {dirty.message_count} of "
        f"{_message_total(session)} messages"
    )
    lines.append(
        f"re-propagation: {run.total} combinations "
        f"(a fresh run would cost {fresh.counter.total})"
    )
    lines.append("")
    lines.extend(report.render_diff_lines(net, before, after))
    if args.stats:
        lines.append("")
        per_node = run.by_node()
        lines.append("re-propagation combinations by node:")
        for node in session.rooted.nodes:
            if node in per_node:
                lines.append(f"  {scope_label(node)}: {per_node[node]}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0


def _message_total(session: PropagationSession) -> int:
    return 2 * len(session.rooted.tree.edges)


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(host=args.host, port=args.port)
    return 0


# -- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefprop",
        description="Belief propagation on Markov trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p: argparse.ArgumentParser, root: bool = True) -> None:
        p.add_argument("file", help="network document (JSON)")
        if root:
            p.add_argument("--root", help="root node as comma-separated names")

    p = sub.add_parser("validate", help="parse and check a document")
    with_file(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tree", help="show the rooted Markov tree")
    with_file(p)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("propagate", help="compute every node marginal")
    with_file(p)
    p.add_argument(
        "--naive",
        action="store_true",
        help="use the uncached scheduler that recombines at every message",
    )
    p.add_argument("--machine", action="store_true", help="canonical JSON output")
    p.add_argument(
        "--stats",
        action="store_true",
        help="include per-node combination counts and compare both schedulers",
    )
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("oracle", help="brute-force global combination")
    with_file(p, root=False)
    p.add_argument("--machine", action="store_true", help="canonical JSON output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("update", help="change one belief and repropagate")
    with_file(p)
    p.add_argument("--belief", required=True, help="belief id to replace")
    p.add_argument(
        "--with",
        dest="with_file",
        required=True,
        metavar="FILE2",
        help="file holding the replacement focal list (same shape as in "
        "the document, or an object with a 'focal' key)",
    )
    p.add_argument(
        "--preview",
        action="store_true",
        help="show what the change would invalidate without applying it",
    )
    p.add_argument(
        "--stats",
        action="store_true",
        help="include per-node combination counts for the re-run",
    )
    p.add_argument("--machine", action="store_true", help="canonical JSON output")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("serve", help="run the HTTP workbench service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8330)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TotalConflictError as exc:
        where = ""
        if exc.node is not None:
            where = f" at {scope_label(exc.node)}"
            if exc.phase:
                where += f" ({exc.phase})"
        elif exc.prefix_index is not None:
            where = f" folding input {exc.prefix_index}"
        sys.stderr.write(f"total conflict{where}: {exc.detail}\n")
        return 3
    except FrameCapError as exc:
        sys.stderr.write(f"frame cap exceeded: {exc}\n")
        return 4
    except (
        NetworkFormatError,
        InvalidMassError,
        NotATreeError,
        HypergraphError,
        ScopeError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except KeyError as exc:
        sys.stderr.write(f"error: {exc.args[0]}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
