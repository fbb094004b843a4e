"""HTTP+JSON session protocol behind the interactive stepper UI.

Routes::

    POST /sessions            body: net text          -> {"id", "state"}
    GET  /sessions/{id}                               -> {"net", "state", "enabled"}
    POST /sessions/{id}/step  body: {"direction", "transition", "mode"}
    POST /sessions/{id}/undo
    GET  /sessions/{id}/dot

State JSON carries the fixed field names ``marking``, ``history`` and
``causes``; enabled-action sets come per mode under ``enabled``.  A
disabled action answers 409 with the failing condition, an unknown
session 404, a malformed body 400.  Sessions are in-memory only; each
session's mutations are serialized while distinct sessions proceed in
parallel.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import semantics as sem
from .dsl import (
    NetDocument,
    ParseError,
    export_dot,
    net_json,
    parse_net,
    state_json,
)
from .semantics import Action, ExecState, NotEnabledError, initial_state


@dataclass
class Session:
    id: str
    document: NetDocument
    current: ExecState
    undo_log: list[tuple[Action, ExecState]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, document: NetDocument) -> Session:
        session = Session(
            id=secrets.token_hex(8),
            document=document,
            current=initial_state(document.initial),
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)


def enabled_sets(session: Session) -> dict[str, list[str]]:
    net, state = session.document.net, session.current
    return {
        "forward": sem.enabled_forward(net, state),
        "bt": sem.enabled_reverse(net, state, "bt"),
        "co": sem.enabled_reverse(net, state, "co"),
        "oco": sem.enabled_reverse(net, state, "oco"),
    }


class _HttpError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class Handler(BaseHTTPRequestHandler):
    store: SessionStore  # set by make_server
    quiet = True

    def log_message(self, fmt, *args):  # the default logs every request
        if not self.quiet:
            super().log_message(fmt, *args)

    def _json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, indent=2).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _text(self, status: int, text: str, content_type: str = "text/plain") -> None:
        body = text.encode()
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _session(self, session_id: str) -> Session:
        session = self.store.get(session_id)
        if session is None:
            raise _HttpError(404, f"unknown session {session_id!r}")
        return session

    def do_OPTIONS(self) -> None:  # CORS preflight for the browser client
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self) -> None:
        try:
            parts = [p for p in self.path.split("/") if p]
            if len(parts) == 2 and parts[0] == "sessions":
                session = self._session(parts[1])
                with session.lock:
                    self._json(200, {
                        "net": net_json(session.document),
                        "state": state_json(session.current),
                        "enabled": enabled_sets(session),
                    })
            elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "dot":
                session = self._session(parts[1])
                with session.lock:
                    dot = export_dot(session.document.net, session.current,
                                     title=session.document.name)
                self._text(200, dot, "text/vnd.graphviz")
            else:
                raise _HttpError(404, f"no such resource {self.path!r}")
        except _HttpError as exc:
            self._json(exc.status, {"error": exc.message})

    def do_POST(self) -> None:
        try:
            parts = [p for p in self.path.split("/") if p]
            if parts == ["sessions"]:
                self._create()
            elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "step":
                self._step(self._session(parts[1]))
            elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "undo":
                self._undo(self._session(parts[1]))
            else:
                raise _HttpError(404, f"no such resource {self.path!r}")
        except _HttpError as exc:
            self._json(exc.status, {"error": exc.message})

    def _create(self) -> None:
        raw = self._body().decode("utf-8", errors="replace")
        text = raw
        if raw.lstrip().startswith("{"):
            try:
                payload = json.loads(raw)
                text = payload["net"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise _HttpError(400, "body must be net text or {\"net\": ...}")
        if not text.strip():
            raise _HttpError(400, "empty request body; expected net text")
        try:
            document = parse_net(text)
        except ParseError as exc:
            raise _HttpError(400, str(exc))
        session = self.store.create(document)
        self._json(201, {
            "id": session.id,
            "state": state_json(session.current),
        })

    def _step(self, session: Session) -> None:
        try:
            payload = json.loads(self._body().decode("utf-8", errors="replace"))
            direction = payload["direction"]
            transition = payload["transition"]
            mode = payload.get("mode")
        except (json.JSONDecodeError, KeyError, TypeError):
            raise _HttpError(400, "body must be JSON with direction/transition"
                                  "/mode fields")
        if direction == "forward":
            action = Action.forward(transition)
        elif direction == "reverse":
            if mode not in ("bt", "co", "oco"):
                raise _HttpError(400, f"unknown reversal mode {mode!r}")
            action = Action.reverse(transition, mode)
        else:
            raise _HttpError(400, f"unknown direction {direction!r}")
        with session.lock:
            if transition not in session.document.net.transitions:
                raise _HttpError(400, f"unknown transition {transition!r}")
            try:
                successor = sem.step(session.document.net, session.current, action)
            except NotEnabledError as exc:
                raise _HttpError(409, exc.reason)
            session.undo_log.append((action, session.current))
            session.current = successor
            self._json(200, {
                "state": state_json(session.current),
                "enabled": enabled_sets(session),
            })

    def _undo(self, session: Session) -> None:
        with session.lock:
            if not session.undo_log:
                raise _HttpError(409, "nothing to undo: the action log is empty")
            _, prior = session.undo_log.pop()
            session.current = prior
            self._json(200, {
                "state": state_json(session.current),
                "enabled": enabled_sets(session),
            })


def make_server(host: str = "127.0.0.1", port: int = 0,
                document: NetDocument | None = None,
                quiet: bool = True) -> tuple[ThreadingHTTPServer, SessionStore, Session | None]:
    """Build (but do not start) the HTTP server, optionally preloading a
    session for ``document``.  Port 0 picks a free port."""
    store = SessionStore()
    handler = type("BoundHandler", (Handler,), {"store": store, "quiet": quiet})
    server = ThreadingHTTPServer((host, port), handler)
    preloaded = store.create(document) if document is not None else None
    return server, store, preloaded


def serve(document: NetDocument, host: str = "127.0.0.1", port: int = 8123) -> None:
    """Serve the protocol forever, preloading one session for ``document``."""
    server, _store, session = make_server(host, port, document, quiet=False)
    actual_port = server.server_address[1]
    # flush so wrappers watching a pipe see the banner immediately
    print(f"serving {document.name} on http://{host}:{actual_port}", flush=True)
    print(f"preloaded session: {session.id}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
