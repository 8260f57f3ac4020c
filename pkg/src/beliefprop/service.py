"""HTTP workbench around propagation sessions.

A session wraps one network document and its live caches.  The routes:

=======  =================================  ====================================
POST     /sessions                          create from {"document": ..., "root"?}
GET      /sessions/{id}/document            current document
GET      /sessions/{id}/tree                rooted tree with synthetic flags
GET      /sessions/{id}/marginals           node and variable marginals
GET      /sessions/{id}/stats               combination tallies
GET      /sessions/{id}/validity            pending invalidations, if any
POST     /sessions/{id}/beliefs/{bid}       replace one belief ({"focal", "preview"?})
DELETE   /sessions/{id}                     drop the session
GET      /health                            liveness probe
=======  =================================  ====================================

Belief updates are transactional: a change whose repropagation ends in
total conflict is rolled back completely and reported with 409, leaving
the session at its previous revision.  Everything is JSON; CORS is wide
open so a local page can talk to a local service.
"""
from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from .dempster import TotalConflictError
from .frames import FrameCapError, ScopeError
from .mass import InvalidMassError, require_valid
from .markov import HypergraphError, NotATreeError
from .network import (
    NetworkFormatError,
    network_from_doc,
    network_to_doc,
    parse_focal,
)
from .propagation import CombinationCounter, DirtySet, propagate
from .repropagation import PropagationSession
from . import report


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str, **extra: Any):
        super().__init__(detail)
        self.status = status
        self.payload = {"error": error, "detail": detail, **extra}


@dataclass
class _Entry:
    session: PropagationSession
    lock: threading.Lock
    fresh_total: int
    # most recent preview, shown in the validity facet until a commit
    preview_dirty: DirtySet | None = None


class Workbench:
    """Session registry plus the request-level operations."""

    def __init__(self) -> None:
        self._sessions: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    # -- session plumbing ----------------------------------------------

    def _entry(self, session_id: str) -> _Entry:
        with self._lock:
            entry = self._sessions.get(session_id)
        if entry is None:
            raise ApiError(404, "unknown-session", f"no session {session_id!r}")
        return entry

    def create(self, body: Any) -> dict[str, Any]:
        if not isinstance(body, dict) or "document" not in body:
            raise ApiError(400, "bad-request", "body must carry a 'document'")
        net = network_from_doc(body["document"])
        root = None
        if body.get("root") is not None:
            names = body["root"]
            if not isinstance(names, list) or any(
                not isinstance(n, str) for n in names
            ):
                raise ApiError(400, "bad-request", "'root' must be a list of names")
            root = net.scope_for(names)
        session = PropagationSession(net, root)
        fresh = session.propagate()
        session_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._sessions[session_id] = _Entry(
                session, threading.Lock(), fresh.total
            )
        result = session.result()
        return {
            "session": session_id,
            "revision": session.revision,
            "tree": report.tree_payload(session.rooted),
            "combinations": report.counter_payload(fresh, session.rooted),
            "marginals": report.marginal_payload(session.rooted, session.marginals),
            "variables": report.variable_payload(session.network, result),
        }

    def drop(self, session_id: str) -> dict[str, Any]:
        with self._lock:
            if session_id not in self._sessions:
                raise ApiError(404, "unknown-session", f"no session {session_id!r}")
            del self._sessions[session_id]
        return {"dropped": session_id}

    # -- reads ----------------------------------------------------------

    def document(self, session_id: str) -> dict[str, Any]:
        entry = self._entry(session_id)
        with entry.lock:
            return {
                "revision": entry.session.revision,
                "document": network_to_doc(entry.session.network),
            }

    def tree(self, session_id: str) -> dict[str, Any]:
        entry = self._entry(session_id)
        with entry.lock:
            return {
                "revision": entry.session.revision,
                "tree": report.tree_payload(entry.session.rooted),
            }

    def marginals(self, session_id: str) -> dict[str, Any]:
        entry = self._entry(session_id)
        with entry.lock:
            session = entry.session
            result = session.result()
            return {
                "revision": session.revision,
                "root": list(session.rooted.root.names),
                "marginals": report.marginal_payload(session.rooted, session.marginals),
                "variables": report.variable_payload(session.network, result),
            }

    def stats(self, session_id: str) -> dict[str, Any]:
        entry = self._entry(session_id)
        with entry.lock:
            session = entry.session
            last = session.last_run
            return {
                "revision": session.revision,
                "messages": 2 * len(session.rooted.tree.edges),
                "freshTotal": entry.fresh_total,
                "lifetime": report.counter_payload(session.lifetime, session.rooted),
                "lastRun": (
                    None
                    if last is None
                    else report.counter_payload(last, session.rooted)
                ),
            }

    def validity(self, session_id: str) -> dict[str, Any]:
        entry = self._entry(session_id)
        with entry.lock:
            session = entry.session
            shown = session.pending
            if entry.preview_dirty is not None:
                shown = shown.union(entry.preview_dirty)
            payload = report.validity_payload(session.rooted, shown)
            payload["revision"] = session.revision
            return payload

    # -- belief updates --------------------------------------------------

    def update_belief(self, session_id: str, belief_id: str, body: Any) -> dict[str, Any]:
        if not isinstance(body, dict) or "focal" not in body:
            raise ApiError(400, "bad-request", "body must carry 'focal'")
        entry = self._entry(session_id)
        with entry.lock:
            session = entry.session
            try:
                decl = session.network.belief(belief_id)
            except KeyError:
                raise ApiError(
                    404, "unknown-belief", f"no belief {belief_id!r}"
                ) from None
            mass = parse_focal(body["focal"], decl.scope, path="focal")
            require_valid(mass, context=f"belief {belief_id!r}")

            messages = 2 * len(session.rooted.tree.edges)
            if body.get("preview"):
                dirty = session.preview(belief_id, mass)
                entry.preview_dirty = dirty
                return {
                    "revision": session.revision,
                    "preview": True,
                    "noop": dirty.is_empty,
                    "dirty": report.dirty_payload(dirty),
                    "messages": messages,
                }

            before = session.result()
            checkpoint = session.checkpoint()
            try:
                dirty = session.set_belief(belief_id, mass)
                entry.preview_dirty = None
                if dirty.is_empty:
                    return {
                        "revision": session.revision,
                        "preview": False,
                        "noop": True,
                        "dirty": report.dirty_payload(dirty),
                        "messages": messages,
                        "combinations": report.counter_payload(
                            CombinationCounter(), session.rooted
                        ),
                        "marginals": report.marginal_payload(
                            session.rooted, session.marginals
                        ),
                        "variables": report.variable_payload(session.network, before),
                    }
                run = session.repropagate()
            except TotalConflictError as exc:
                # the conflict may surface while refolding co-located
                # evidence, not just during the run; both roll back
                session.restore(checkpoint)
                raise ApiError(
                    409,
                    "total-conflict",
                    exc.detail,
                    node=None if exc.node is None else list(exc.node.names),
                    phase=exc.phase,
                    rolledBack=True,
                    revision=session.revision,
                ) from None
            # what the same answer would have cost without the caches,
            # measured by actually running it
            fresh = propagate(session.network, session.rooted.root)
            entry.fresh_total = fresh.counter.total
            after = session.result()
            return {
                "revision": session.revision,
                "preview": False,
                "noop": False,
                "dirty": report.dirty_payload(dirty),
                "messages": messages,
                "combinations": report.counter_payload(run, session.rooted),
                "freshRun": report.counter_payload(fresh.counter, fresh.rooted),
                "deltas": report.delta_payload(session.network, before, after),
                "marginals": report.marginal_payload(session.rooted, session.marginals),
                "variables": report.variable_payload(session.network, after),
            }


def _translate(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, TotalConflictError):
        return ApiError(
            409,
            "total-conflict",
            exc.detail,
            node=None if exc.node is None else list(exc.node.names),
            phase=exc.phase,
        )
    if isinstance(exc, (NotATreeError, HypergraphError)):
        return ApiError(422, "tree-error", str(exc))
    if isinstance(exc, FrameCapError):
        return ApiError(422, "cap-exceeded", str(exc))
    if isinstance(exc, (NetworkFormatError, InvalidMassError, ScopeError)):
        return ApiError(400, "bad-request", str(exc))
    return ApiError(500, "internal", f"{type(exc).__name__}: {exc}")


class _Handler(BaseHTTPRequestHandler):
    workbench: Workbench  # set by make_server

    protocol_version = "HTTP/1.1"

    # -- plumbing -------------------------------------------------------

    def log_message(self, fmt: str, *args: Any) -> None:  # noqa: A003
        pass  # keep test output quiet

    def _send(self, status: int, payload: dict[str, Any]) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _body(self) -> Any:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return None
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ApiError(400, "bad-request", f"body is not valid JSON: {exc.msg}")

    def _route(self) -> tuple[str, ...]:
        path = self.path.split("?", 1)[0]
        return tuple(part for part in path.split("/") if part)

    def _dispatch(self, method: str) -> None:
        try:
            payload, status = self._handle(method, self._route())
        except Exception as exc:  # noqa: BLE001 - edge of the process
            err = _translate(exc)
            self._send(err.status, err.payload)
            return
        self._send(status, payload)

    # -- routing --------------------------------------------------------

    def _handle(self, method: str, route: tuple[str, ...]) -> tuple[dict[str, Any], int]:
        wb = self.workbench
        if method == "GET" and route == ("health",):
            return {"ok": True}, 200
        if method == "POST" and route == ("sessions",):
            return wb.create(self._body()), 201
        if len(route) >= 2 and route[0] == "sessions":
            session_id = route[1]
            if method == "DELETE" and len(route) == 2:
                return wb.drop(session_id), 200
            if method == "GET" and len(route) == 3:
                reader = {
                    "document": wb.document,
                    "tree": wb.tree,
                    "marginals": wb.marginals,
                    "stats": wb.stats,
                    "validity": wb.validity,
                }.get(route[2])
                if reader is not None:
                    return reader(session_id), 200
            if method == "POST" and len(route) == 4 and route[2] == "beliefs":
                return wb.update_belief(session_id, route[3], self._body()), 200
        raise ApiError(404, "unknown-route", f"{method} /{'/'.join(route)}")

    # -- verbs ----------------------------------------------------------

    def do_GET(self) -> None:  # noqa: N802
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    def do_DELETE(self) -> None:  # noqa: N802
        self._dispatch("DELETE")

    def do_OPTIONS(self) -> None:  # noqa: N802
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """A ready-to-run server; port 0 picks a free port."""
    handler = type("WorkbenchHandler", (_Handler,), {"workbench": Workbench()})
    return ThreadingHTTPServer((host, port), handler)


def serve(host: str = "127.0.0.1", port: int = 8330) -> None:
    server = make_server(host, port)
    actual = server.server_address[1]
    print(f"workbench listening on http://{host}:{actual}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
