"""HTTP annotation service.

Serves prepared verse sets to an annotation UI, enforces forced choice on
navigation (Next is rejected while any position is unaccounted), and persists
an annotator's work durably before acknowledging any navigation action.

Endpoints (JSON bodies and responses; all positions 1-based):

    GET  /api/sets
    GET  /api/sets/{set}/pairs/{n}?annotator=A
    PUT  /api/sets/{set}/pairs/{n}?annotator=A&version=V
    POST /api/sets/{set}/pairs/{n}/advance?annotator=A
    POST /api/sets/{set}/pairs/{n}/previous?annotator=A
    POST /api/sets/{set}/pairs/{n}/reset?annotator=A
    POST /api/sets/{set}/pairs/{n}/reload?annotator=A
    GET  /api/sets/{set}/progress?annotator=A

Saves (PUT) update the in-memory session under a compare-and-swap version
counter: a stale version is rejected, an accepted save bumps the counter.
Navigation (advance / previous / reload) rewrites the annotator's alignment
file and session metadata atomically (write-then-ack); reset only clears the
pair in memory, so reload restores the last persisted state.
"""

from __future__ import annotations

import json
import mimetypes
import re
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from goldalign import alignment
from goldalign.alignment import Annotation, LinkGroup, NotTranslated
from goldalign.errors import GoldalignError
from goldalign.sets import VerseSet, discover_sets

DEFAULT_IDLE_CUTOFF_S = 5 * 60.0


class ApiError(Exception):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("error", "error"))
        self.status = status
        self.payload = payload


def annotation_to_json(ann: Annotation) -> dict:
    return {
        "verse_id": ann.verse_id,
        "annotator_id": ann.annotator_id,
        "groups": [{"e": list(g.e_positions), "f": list(g.f_positions)} for g in ann.groups],
        "not_translated": [{"side": n.side, "position": n.position} for n in ann.nt_marks],
        "finalized": ann.finalized,
    }


def annotation_from_json(verse_id: str, annotator_id: str, body: dict) -> Annotation:
    groups = tuple(
        LinkGroup(tuple(g.get("e", ())), tuple(g.get("f", ())))
        for g in body.get("groups", ())
    )
    nts = tuple(
        NotTranslated(n["side"], n["position"]) for n in body.get("not_translated", ())
    )
    return Annotation(verse_id, annotator_id, groups, nts, finalized=False)


class Session:
    """One annotator's in-memory state for one verse set, backed by two files.

    The alignment file holds the annotations; the session sidecar holds the
    current ordinal, accumulated time, version counters and which ordinals
    are finalized.  Both are rewritten atomically on every navigation.
    """

    def __init__(self, verse_set: VerseSet, annotator_id: str, idle_cutoff_s: float):
        self.verse_set = verse_set
        self.annotator_id = annotator_id
        self.idle_cutoff_s = idle_cutoff_s
        self.lock = threading.RLock()
        self.state: dict[int, Annotation] = {}
        self.versions: dict[int, int] = {}
        self.finalized: set[int] = set()
        self.current = 1
        self.elapsed = 0.0
        self.last_seen: float | None = None
        self._load()

    # -- persistence ---------------------------------------------------

    def _wa_path(self) -> Path:
        return self.verse_set.alignment_path(self.annotator_id)

    def _meta_path(self) -> Path:
        return self.verse_set.session_path(self.annotator_id)

    def _load(self) -> None:
        state: dict[int, Annotation] = {}
        finalized: set[int] = set()
        versions: dict[int, int] = {}
        current = 1
        elapsed = 0.0
        meta_path = self._meta_path()
        if meta_path.is_file():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            current = int(meta.get("current", 1))
            elapsed = float(meta.get("elapsed_seconds", 0.0))
            finalized = {int(o) for o in meta.get("finalized", ())}
            versions = {int(k): int(v) for k, v in meta.get("versions", {}).items()}
        wa_path = self._wa_path()
        if wa_path.is_file():
            pairs_by_id = self.verse_set.bitext.pairs_by_id()
            for ann in alignment.read_alignment_file(wa_path, pairs_by_id):
                ordinal = self.verse_set.ordinal_of(ann.verse_id)
                if ordinal in finalized:
                    ann = alignment.finalize(ann, self.verse_set.pair(ordinal))
                state[ordinal] = ann
        self.state = state
        self.finalized = finalized & set(state)
        self.versions = versions
        self.current = min(max(current, 1), self.verse_set.total)
        self.elapsed = elapsed

    def persist(self) -> None:
        ordinals = sorted(self.state)
        annotations = [self.state[o] for o in ordinals]
        pairs_by_id = self.verse_set.bitext.pairs_by_id()
        alignment.write_alignment_file(
            annotations, self._wa_path(), pairs_by_id, draft=True, ordinals=ordinals
        )
        meta = {
            "annotator_id": self.annotator_id,
            "set_id": self.verse_set.set_id,
            "current": self.current,
            "elapsed_seconds": round(self.elapsed, 3),
            "finalized": sorted(self.finalized),
            "versions": {str(k): v for k, v in sorted(self.versions.items())},
        }
        alignment.atomic_write_text(
            self._meta_path(), json.dumps(meta, sort_keys=True, ensure_ascii=False) + "\n"
        )

    # -- bookkeeping ----------------------------------------------------

    def touch(self, now: float | None = None) -> None:
        """Accumulate active time; gaps above the idle cutoff do not count."""
        now = time.time() if now is None else now
        if self.last_seen is not None:
            delta = now - self.last_seen
            if 0 <= delta <= self.idle_cutoff_s:
                self.elapsed += delta
        self.last_seen = now

    def annotation(self, ordinal: int) -> Annotation:
        ann = self.state.get(ordinal)
        if ann is None:
            ann = Annotation.empty(self.verse_set.pair(ordinal).verse_id, self.annotator_id)
        return ann

    def bump(self, ordinal: int) -> int:
        self.versions[ordinal] = self.versions.get(ordinal, 0) + 1
        return self.versions[ordinal]


class AnnotationService:
    def __init__(self, data_dir: str | Path, idle_cutoff_s: float = DEFAULT_IDLE_CUTOFF_S):
        self.data_dir = Path(data_dir)
        self.idle_cutoff_s = idle_cutoff_s
        self.sets: dict[str, VerseSet] = discover_sets(self.data_dir)
        self._sessions: dict[tuple[str, str], Session] = {}
        self._registry_lock = threading.Lock()

    # -- helpers ---------------------------------------------------------

    def _verse_set(self, set_id: str) -> VerseSet:
        vs = self.sets.get(set_id)
        if vs is None:
            raise ApiError(404, {"error": f"unknown set {set_id!r}"})
        return vs

    def _session(self, set_id: str, annotator: str) -> Session:
        if not annotator or " " in annotator:
            raise ApiError(400, {"error": "annotator must be a non-empty id without spaces"})
        vs = self._verse_set(set_id)
        key = (set_id, annotator)
        with self._registry_lock:
            session = self._sessions.get(key)
            if session is None:
                session = Session(vs, annotator, self.idle_cutoff_s)
                self._sessions[key] = session
            return session

    def _check_ordinal(self, vs: VerseSet, ordinal: int) -> None:
        if not 1 <= ordinal <= vs.total:
            raise ApiError(404, {"error": f"pair {ordinal} out of range 1..{vs.total}"})

    def _pair_payload(self, session: Session, ordinal: int) -> dict:
        vs = session.verse_set
        pair = vs.pair(ordinal)
        ann = session.annotation(ordinal)
        report = alignment.completeness(ann, pair)
        return {
            "set_id": vs.set_id,
            "ordinal": ordinal,
            "total": vs.total,
            "verse_id": pair.verse_id,
            "tokens_e": [
                {"surface": t.surface, "position": t.position, "kind": t.kind}
                for t in pair.side_e
            ],
            "tokens_f": [
                {"surface": t.surface, "position": t.position, "kind": t.kind}
                for t in pair.side_f
            ],
            "annotation": annotation_to_json(ann),
            "version": session.versions.get(ordinal, 0),
            "complete": report.complete,
            "missing_e": list(report.missing_e),
            "missing_f": list(report.missing_f),
        }

    # -- operations --------------------------------------------------------

    def list_sets(self) -> list[dict]:
        return [
            {
                "id": vs.set_id,
                "total": vs.total,
                "lang_e": vs.bitext.lang_e,
                "lang_f": vs.bitext.lang_f,
                "annotators": vs.annotators(),
            }
            for vs in sorted(self.sets.values(), key=lambda v: v.set_id)
        ]

    def get_pair(self, set_id: str, ordinal: int, annotator: str) -> dict:
        session = self._session(set_id, annotator)
        with session.lock:
            self._check_ordinal(session.verse_set, ordinal)
            session.touch()
            return self._pair_payload(session, ordinal)

    def put_pair(self, set_id: str, ordinal: int, annotator: str, version: int, body: dict) -> dict:
        session = self._session(set_id, annotator)
        with session.lock:
            self._check_ordinal(session.verse_set, ordinal)
            session.touch()
            pair = session.verse_set.pair(ordinal)
            current = session.versions.get(ordinal, 0)
            if version != current:
                raise ApiError(
                    409,
                    {"error": "stale version", "version": current, "submitted": version},
                )
            try:
                ann = annotation_from_json(pair.verse_id, annotator, body)
                alignment.validate_annotation(ann, pair)
            except (GoldalignError, ValueError, KeyError, TypeError) as e:
                raise ApiError(400, {"error": f"invalid annotation: {e}"})
            session.state[ordinal] = ann
            session.finalized.discard(ordinal)
            new_version = session.bump(ordinal)
            report = alignment.completeness(ann, pair)
            return {
                "ok": True,
                "version": new_version,
                "annotation": annotation_to_json(ann),
                "complete": report.complete,
                "missing_e": list(report.missing_e),
                "missing_f": list(report.missing_f),
            }

    def advance(self, set_id: str, ordinal: int, annotator: str) -> dict:
        session = self._session(set_id, annotator)
        with session.lock:
            vs = session.verse_set
            self._check_ordinal(vs, ordinal)
            session.touch()
            pair = vs.pair(ordinal)
            ann = session.annotation(ordinal)
            report = alignment.completeness(ann, pair)
            if not report.complete:
                raise ApiError(
                    409,
                    {
                        "error": "incomplete annotation",
                        "missing_e": list(report.missing_e),
                        "missing_f": list(report.missing_f),
                    },
                )
            if not ann.finalized:
                session.state[ordinal] = alignment.finalize(ann, pair)
                session.bump(ordinal)
            session.finalized.add(ordinal)
            done = ordinal >= vs.total
            session.current = ordinal if done else ordinal + 1
            session.persist()
            return {
                "ok": True,
                "done": done,
                "next": None if done else self._pair_payload(session, ordinal + 1),
            }

    def previous(self, set_id: str, ordinal: int, annotator: str) -> dict:
        session = self._session(set_id, annotator)
        with session.lock:
            self._check_ordinal(session.verse_set, ordinal)
            session.touch()
            if ordinal <= 1:
                raise ApiError(400, {"error": "already at the first pair"})
            session.current = ordinal - 1
            session.persist()
            return {"ok": True, "pair": self._pair_payload(session, ordinal - 1)}

    def reset(self, set_id: str, ordinal: int, annotator: str) -> dict:
        """Clear the pair's links in memory only; nothing is persisted until
        the next navigation, so reload undoes a reset."""
        session = self._session(set_id, annotator)
        with session.lock:
            vs = session.verse_set
            self._check_ordinal(vs, ordinal)
            session.touch()
            session.state[ordinal] = Annotation.empty(vs.pair(ordinal).verse_id, annotator)
            session.finalized.discard(ordinal)
            session.bump(ordinal)
            return {"ok": True, "pair": self._pair_payload(session, ordinal)}

    def reload(self, set_id: str, ordinal: int, annotator: str) -> dict:
        """Drop in-memory edits for the whole set and return to the persisted state."""
        session = self._session(set_id, annotator)
        with session.lock:
            self._check_ordinal(session.verse_set, ordinal)
            session.touch()
            touched = set(session.state)
            elapsed, last_seen, current = session.elapsed, session.last_seen, session.current
            versions = dict(session.versions)
            session._load()
            session.elapsed = max(session.elapsed, elapsed)
            session.last_seen = last_seen
            session.current = current
            session.versions = versions
            for o in touched | set(session.state):
                session.bump(o)
            session.persist()
            return {"ok": True, "pair": self._pair_payload(session, ordinal)}

    def progress(self, set_id: str, annotator: str) -> dict:
        session = self._session(set_id, annotator)
        with session.lock:
            session.touch()
            return {
                "set_id": set_id,
                "annotator_id": annotator,
                "current": session.current,
                "total": session.verse_set.total,
                "completed": len(session.finalized),
                "elapsed_seconds": round(session.elapsed, 3),
                "elapsed_hours": round(session.elapsed / 3600.0, 3),
            }


# ---------------------------------------------------------------------------
# HTTP plumbing

_ROUTES: list[tuple[str, re.Pattern[str], str]] = [
    ("GET", re.compile(r"^/api/sets$"), "op_list_sets"),
    ("GET", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)$"), "op_get_pair"),
    ("PUT", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)$"), "op_put_pair"),
    ("POST", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)/advance$"), "op_advance"),
    ("POST", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)/previous$"), "op_previous"),
    ("POST", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)/reset$"), "op_reset"),
    ("POST", re.compile(r"^/api/sets/([^/]+)/pairs/(\d+)/reload$"), "op_reload"),
    ("GET", re.compile(r"^/api/sets/([^/]+)/progress$"), "op_progress"),
]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: "AnnotationServer"

    # -- response helpers -------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ApiError(400, {"error": f"bad JSON body: {e}"})

    def _query(self) -> dict[str, str]:
        qs = parse_qs(urlsplit(self.path).query)
        return {k: v[-1] for k, v in qs.items()}

    def _annotator(self, query: dict[str, str]) -> str:
        annotator = query.get("annotator", "")
        if not annotator:
            raise ApiError(400, {"error": "missing annotator query parameter"})
        return annotator

    # -- dispatch ----------------------------------------------------------

    def _dispatch(self, method: str) -> None:
        path = urlsplit(self.path).path
        try:
            for route_method, pattern, name in _ROUTES:
                if route_method != method:
                    continue
                m = pattern.match(path)
                if m:
                    getattr(self, name)(*m.groups())
                    return
            if method == "GET" and self.server.ui_dir is not None:
                self._serve_static(path)
                return
            raise ApiError(404, {"error": f"no route for {method} {path}"})
        except ApiError as e:
            self._send_json(e.status, e.payload)
        except GoldalignError as e:
            self._send_json(400, {"error": str(e)})
        except Exception as e:  # keep the server alive; report the failure
            self._send_json(500, {"error": f"internal error: {e}"})

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def log_message(self, fmt: str, *args) -> None:
        if self.server.verbose:
            super().log_message(fmt, *args)

    # -- routes -----------------------------------------------------------

    @property
    def service(self) -> AnnotationService:
        return self.server.service

    def op_list_sets(self) -> None:
        self._send_json(200, {"sets": self.service.list_sets()})

    def op_get_pair(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        self._send_json(200, self.service.get_pair(set_id, int(ordinal), self._annotator(q)))

    def op_put_pair(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        try:
            version = int(q.get("version", ""))
        except ValueError:
            raise ApiError(400, {"error": "missing or non-integer version query parameter"})
        body = self._body()
        self._send_json(
            200, self.service.put_pair(set_id, int(ordinal), self._annotator(q), version, body)
        )

    def op_advance(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        self._send_json(200, self.service.advance(set_id, int(ordinal), self._annotator(q)))

    def op_previous(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        self._send_json(200, self.service.previous(set_id, int(ordinal), self._annotator(q)))

    def op_reset(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        self._send_json(200, self.service.reset(set_id, int(ordinal), self._annotator(q)))

    def op_reload(self, set_id: str, ordinal: str) -> None:
        q = self._query()
        self._send_json(200, self.service.reload(set_id, int(ordinal), self._annotator(q)))

    def op_progress(self, set_id: str) -> None:
        q = self._query()
        self._send_json(200, self.service.progress(set_id, self._annotator(q)))

    # -- optional static UI -------------------------------------------------

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        assert ui_dir is not None
        rel = path.lstrip("/") or "index.html"
        target = (ui_dir / rel).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            raise ApiError(404, {"error": f"no such file {path!r}"})
        data = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)


class AnnotationServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, service: AnnotationService, ui_dir: Path | None = None,
                 verbose: bool = False):
        super().__init__(address, _Handler)
        self.service = service
        self.ui_dir = ui_dir
        self.verbose = verbose


def make_server(
    data_dir: str | Path,
    port: int = 0,
    host: str = "127.0.0.1",
    idle_cutoff_min: float = DEFAULT_IDLE_CUTOFF_S / 60.0,
    ui_dir: str | Path | None = None,
    verbose: bool = False,
) -> AnnotationServer:
    service = AnnotationService(data_dir, idle_cutoff_s=idle_cutoff_min * 60.0)
    ui = Path(ui_dir) if ui_dir else None
    return AnnotationServer((host, port), service, ui_dir=ui, verbose=verbose)
