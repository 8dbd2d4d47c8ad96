"""Annotation service: sessions, labels, disputes and analysis views
over HTTP, plus the static annotator UI under /ui.

State model: every mutation appends one JSON line to the persistence
log (tagged with its session id) after it was applied in memory, so a
restart folds the log and lands in exactly the same state. Mutations to
one session are serialized behind a per-session lock; reads take the
same lock only long enough to snapshot.

Authentication is out of scope: the annotator identifier in requests is
trusted. Deploy behind something that enforces identity if that ever
matters.
"""

from __future__ import annotations

import json
import socket
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from fastapi import Body, FastAPI, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import annotate
from .analyze import (
    DegenerateTable,
    chi_square_independence,
    one_way,
    round_percent,
    two_way,
)
from .annotate import (
    AnnotationError,
    AnnotationSession,
    CompareAttribute,
    CorruptPersistence,
    DefectStatus,
    DuplicateDefectId,
    LabelFrozen,
    NotDisputed,
    ResolverIsParty,
    TooFewAnnotators,
    UnknownAnnotator,
    UnknownDefect,
)
from .classify import (
    Criticality,
    Reversibility,
    Scope,
    SeverityContext,
    assign_severity,
    classify_dataset,
    default_contexts_path,
    default_rules_path,
    label_from_obj,
    label_to_obj,
    load_contexts,
    load_rules,
)
from .ingest import benchmark_dataset_path, load_defects, record_to_obj
from .report import (
    agreement_obj,
    contingency_obj,
    distribution_obj,
    empty_contingency,
    empty_distribution,
)
from .taxonomy import (
    AIAttribute,
    SEVERITY_DESCRIPTIONS,
    Severity,
    default_taxonomy_path,
    load_taxonomy,
)


class ServerError(Exception):
    pass


class ConfigError(ServerError):
    pass


class BindFailure(ServerError):
    pass


class UnknownSession(AnnotationError):
    pass


class SessionExists(AnnotationError):
    pass


_PACKAGE_UI = Path(__file__).resolve().parent / "ui"


@dataclass(frozen=True)
class ServerConfig:
    """Where to listen, what to load, where state lives.

    Relative paths resolve against root. Port 0 asks the OS for an
    ephemeral port (the handle reports the real one).
    """

    host: str = "127.0.0.1"
    port: int = 8032
    root: Path = Path(".")
    persistence_path: Path = Path("annotation-log.jsonl")
    static_path: Path | None = None
    dataset_path: Path | None = None
    rules_path: Path | None = None
    taxonomy_path: Path | None = None
    contexts_path: Path | None = None

    def __post_init__(self):
        if not (0 <= self.port <= 65535):
            raise ConfigError(f"port out of range: {self.port}")

    def _resolve(self, p: Path | None, default: Path) -> Path:
        if p is None:
            return default
        p = Path(p)
        return p if p.is_absolute() else Path(self.root) / p

    @property
    def persistence(self) -> Path:
        p = Path(self.persistence_path)
        return p if p.is_absolute() else Path(self.root) / p

    @property
    def static_dir(self) -> Path:
        return self._resolve(self.static_path, _PACKAGE_UI)

    @property
    def dataset(self) -> Path:
        return self._resolve(self.dataset_path, benchmark_dataset_path())

    @property
    def rules(self) -> Path:
        return self._resolve(self.rules_path, default_rules_path())

    @property
    def taxonomy(self) -> Path:
        return self._resolve(self.taxonomy_path, default_taxonomy_path())

    @property
    def contexts(self) -> Path:
        return self._resolve(self.contexts_path, default_contexts_path())

    @classmethod
    def from_file(cls, path: str | Path) -> "ServerConfig":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(obj, Mapping):
            raise ConfigError("config must be a JSON object")
        root = Path(obj.get("root", Path(path).resolve().parent))
        kwargs = {"root": root}
        if "host" in obj:
            kwargs["host"] = str(obj["host"])
        if "port" in obj:
            kwargs["port"] = int(obj["port"])
        for key, attr in (
            ("persistence", "persistence_path"),
            ("static", "static_path"),
            ("dataset", "dataset_path"),
            ("rules", "rules_path"),
            ("taxonomy", "taxonomy_path"),
            ("contexts", "contexts_path"),
        ):
            if obj.get(key) is not None:
                kwargs[attr] = Path(obj[key])
        return cls(**kwargs)


class _State:
    """Everything the handlers share. One lock per session plus one for
    the log file; the sessions dict itself is guarded by _registry."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.taxonomy = load_taxonomy(config.taxonomy)
        self.rules = load_rules(config.rules, self.taxonomy)
        result = load_defects(config.dataset, "canonical")
        self.records = {r.id: r for r in result.records}
        self.contexts = (
            load_contexts(config.contexts) if config.contexts.is_file() else {}
        )
        self.sessions: dict[str, AnnotationSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.registry_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._baseline_labels = None
        self._load_log()

    # -- persistence --------------------------------------------------

    def _load_log(self) -> None:
        path = self.config.persistence
        if not path.is_file():
            return
        for i, raw in enumerate(
            path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptPersistence(f"bad JSON: {exc}", i) from exc
            try:
                sid = event["session"]
                if event.get("event") == "open":
                    self.sessions[sid] = annotate.open_session(
                        event["project"], event["defects"], event["annotators"]
                    )
                    self.locks[sid] = threading.Lock()
                else:
                    annotate.apply_event(self.sessions[sid], event)
            except CorruptPersistence as exc:
                raise CorruptPersistence(str(exc), i) from exc
            except (AnnotationError, KeyError, ValueError, TypeError) as exc:
                raise CorruptPersistence(str(exc), i) from exc

    def append(self, sid: str, event: Mapping) -> None:
        tagged = {"session": sid, **event}
        with self._log_lock:
            parent = self.config.persistence.parent
            parent.mkdir(parents=True, exist_ok=True)
            annotate.append_event(self.config.persistence, tagged)

    # -- accessors -----------------------------------------------------

    def session(self, sid: str) -> AnnotationSession:
        try:
            return self.sessions[sid]
        except KeyError:
            raise UnknownSession(sid) from None

    def lock(self, sid: str) -> threading.Lock:
        self.session(sid)
        return self.locks[sid]

    def baseline_labels(self):
        """Rule classification of the configured dataset; the analysis
        view before any human labeling exists."""
        if self._baseline_labels is None:
            self._baseline_labels = classify_dataset(
                list(self.records.values()), self.rules, self.contexts
            )
        return self._baseline_labels


_ERROR_STATUS = {
    UnknownSession: 404,
    UnknownDefect: 404,
    UnknownAnnotator: 404,
    NotDisputed: 409,
    LabelFrozen: 409,
    SessionExists: 409,
    ResolverIsParty: 403,
    TooFewAnnotators: 422,
    DuplicateDefectId: 422,
}


def _progress_obj(session: AnnotationSession) -> dict:
    statuses = list(session.statuses().values())
    total = len(statuses)
    done = sum(
        1 for s in statuses if s in (DefectStatus.LABELED, DefectStatus.RESOLVED)
    )
    return {
        "total": total,
        "pending": sum(1 for s in statuses if s is DefectStatus.PENDING),
        "labeled": sum(1 for s in statuses if s is DefectStatus.LABELED),
        "disputed": sum(1 for s in statuses if s is DefectStatus.DISPUTED),
        "resolved": sum(1 for s in statuses if s is DefectStatus.RESOLVED),
        "percent_complete": round_percent(done, total) if total else 0.0,
    }


def _agreement_entry(session: AnnotationSession, attribute: CompareAttribute) -> dict:
    try:
        return agreement_obj(annotate.cohen_kappa(session, attribute))
    except AnnotationError as exc:
        return {"error": type(exc).__name__, "detail": str(exc)}


def _analysis_views(labels) -> dict:
    if labels:
        ai = one_way(labels, "ai")
        sev = one_way(labels, "severity")
        table = two_way(labels, "ai", "severity")
    else:
        ai = empty_distribution("ai")
        sev = empty_distribution("severity")
        table = empty_contingency()
    try:
        independence = chi_square_independence(table)
        independence_obj = {
            "statistic": independence.statistic,
            "dof": independence.dof,
            "p_value": independence.p_value,
            "warning": independence.warning,
        }
    except DegenerateTable as exc:
        independence_obj = {"error": "DegenerateTable", "detail": str(exc)}
    return {
        "one_way": {"ai": distribution_obj(ai), "severity": distribution_obj(sev)},
        "two_way": contingency_obj(table),
        "independence": independence_obj,
    }


def _severity_preview(matrix) -> list[dict]:
    out = []
    for crit in Criticality:
        for rev in Reversibility:
            for scope in Scope:
                out.append(
                    {
                        "criticality": str(crit),
                        "reversibility": str(rev),
                        "scope": str(scope),
                        "severity": str(
                            assign_severity(
                                SeverityContext(crit, rev, scope), matrix
                            )
                        ),
                    }
                )
    return out


def create_app(config: ServerConfig) -> FastAPI:
    state = _State(config)
    app = FastAPI(title="aiodc annotation service", docs_url=None, redoc_url=None)
    app.state.aiodc = state

    @app.exception_handler(AnnotationError)
    def _annotation_error(request, exc: AnnotationError):
        status = _ERROR_STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    def _value_error(request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"error": "ValidationError", "detail": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": len(state.sessions)}

    @app.get("/taxonomy")
    def taxonomy_view():
        chars = sorted(
            state.taxonomy.characteristics.values(),
            key=lambda c: (c.layer, c.name),
        )
        return {
            "version": state.taxonomy.version,
            "characteristics": [
                {"name": c.name, "model": c.model.value, "layer": c.layer}
                for c in chars
            ],
        }

    @app.get("/rubric")
    def rubric_view():
        return {
            "ai_attributes": [
                {"value": a.value, "description": a.description}
                for a in AIAttribute
                if a is not AIAttribute.UNCLASSIFIED
            ],
            "severities": [
                {
                    "value": str(s),
                    "rank": int(s),
                    "description": SEVERITY_DESCRIPTIONS[s],
                }
                for s in sorted(Severity, reverse=True)
            ],
            "criticality": [str(c) for c in Criticality],
            "reversibility": [str(r) for r in Reversibility],
            "scope": [str(s) for s in Scope],
            "severity_preview": _severity_preview(state.rules.severity_matrix),
        }

    @app.get("/sessions")
    def list_sessions():
        out = []
        for sid in sorted(state.sessions):
            with state.lock(sid):
                session = state.sessions[sid]
                out.append(
                    {
                        "id": sid,
                        "project": session.project,
                        "annotators": list(session.annotators),
                        "defect_count": len(session.defects),
                        "progress": _progress_obj(session),
                    }
                )
        return {"sessions": out}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        project = str(payload.get("project") or "unnamed")
        annotators = [str(a) for a in payload.get("annotators") or []]
        defects = payload.get("defects")
        if defects is None:
            defects = sorted(state.records)
        defects = [str(d) for d in defects]
        unknown = [d for d in defects if d not in state.records]
        if unknown:
            raise UnknownDefect(f"not in dataset: {unknown[:5]}")
        sid = str(payload.get("id") or uuid.uuid4().hex[:12])
        with state.registry_lock:
            if sid in state.sessions:
                existing = state.sessions[sid]
                same = (
                    existing.project == project
                    and existing.defects == tuple(defects)
                    and existing.annotators == tuple(sorted(set(annotators)))
                )
                if same:  # identical resubmission: idempotent success
                    return JSONResponse(
                        status_code=200,
                        content={
                            "id": sid,
                            "project": project,
                            "defect_count": len(existing.defects),
                            "annotators": list(existing.annotators),
                        },
                    )
                raise SessionExists(sid)
            session = annotate.open_session(project, defects, annotators)
            state.sessions[sid] = session
            state.locks[sid] = threading.Lock()
        state.append(
            sid,
            annotate.open_event(project, session.defects, session.annotators),
        )
        return {
            "id": sid,
            "project": project,
            "defect_count": len(session.defects),
            "annotators": list(session.annotators),
        }

    @app.get("/sessions/{sid}/next")
    def next_task(sid: str, annotator: str = Query(...)):
        with state.lock(sid):
            session = state.session(sid)
            if annotator not in session.annotators:
                raise UnknownAnnotator(annotator)
            unlabeled = sorted(
                d
                for d in session.defects
                if (d, annotator) not in session.labels
                and d not in session.resolutions
            )
        if not unlabeled:
            return {"defect": None, "remaining": 0}
        # the record only: the co-annotator's label never travels here
        record = state.records.get(unlabeled[0])
        obj = (
            record_to_obj(record)
            if record is not None
            else {"id": unlabeled[0]}
        )
        return {"defect": obj, "remaining": len(unlabeled)}

    @app.post("/sessions/{sid}/labels")
    def post_label(sid: str, payload: dict = Body(...)):
        annotator = str(payload.get("annotator") or "")
        if "label" not in payload:
            raise ValueError("request body needs a 'label' object")
        label = label_from_obj(payload["label"])
        with state.lock(sid):
            session = state.session(sid)
            annotate.submit_label(session, annotator, label)
            status = session.status(label.defect_id)
            stored = session.labels[(label.defect_id, annotator)]
        state.append(sid, annotate.label_event(annotator, stored))
        return {"defect_id": label.defect_id, "status": str(status)}

    @app.get("/sessions/{sid}/disputes")
    def disputes_view(sid: str, attribute: str = Query("combined")):
        attr = CompareAttribute.parse(attribute)
        with state.lock(sid):
            session = state.session(sid)
            disputes = annotate.list_disputes(session, attr)
        return {
            "attribute": attr.value,
            "disputes": [
                {
                    "defect_id": d,
                    "labels": [label_to_obj(a), label_to_obj(b)],
                    "impact_difference": annotate.impact_difference(a, b),
                }
                for d, a, b in disputes
            ],
        }

    @app.post("/sessions/{sid}/resolutions")
    def post_resolution(sid: str, payload: dict = Body(...)):
        resolver = str(payload.get("resolver") or "")
        if "label" not in payload:
            raise ValueError("request body needs a 'label' object")
        label = label_from_obj(payload["label"])
        with state.lock(sid):
            session = state.session(sid)
            annotate.resolve_dispute(session, label.defect_id, resolver, label)
            stored = session.resolutions[label.defect_id]
        state.append(sid, annotate.resolve_event(resolver, stored))
        return {"defect_id": label.defect_id, "status": str(DefectStatus.RESOLVED)}

    @app.get("/sessions/{sid}/stats")
    def stats_view(sid: str):
        with state.lock(sid):
            session = state.session(sid)
            progress = _progress_obj(session)
            agreement = {
                attr.value: _agreement_entry(session, attr)
                for attr in CompareAttribute
            }
            ready = annotate.consolidate_ready(session)
        views = _analysis_views(ready)
        return {
            "id": sid,
            "project": session.project,
            "annotators": list(session.annotators),
            "progress": progress,
            "agreement": agreement,
            **views,
        }

    def _labels_for(session_id: str | None):
        if session_id is None:
            return state.baseline_labels()
        with state.lock(session_id):
            return annotate.consolidate_ready(state.session(session_id))

    @app.get("/analysis/one-way")
    def analysis_one_way(
        attr: str = Query("ai"), session: str | None = Query(None)
    ):
        labels = _labels_for(session)
        dist = one_way(labels, attr) if labels else empty_distribution(attr)
        return distribution_obj(dist)

    @app.get("/analysis/two-way")
    def analysis_two_way(session: str | None = Query(None)):
        views = _analysis_views(_labels_for(session))
        return views["two_way"] | {"independence": views["independence"]}

    if config.static_dir.is_dir():
        app.mount(
            "/ui", StaticFiles(directory=config.static_dir, html=True), name="ui"
        )

    return app


@dataclass
class ServiceHandle:
    """A running (or just-run) service. stop() is idempotent."""

    server: "uvicorn.Server"
    socket: socket.socket
    thread: threading.Thread | None = None
    _stopped: bool = field(default=False, repr=False)

    @property
    def port(self) -> int:
        return self.socket.getsockname()[1]

    @property
    def url(self) -> str:
        host, port = self.socket.getsockname()[:2]
        return f"http://{host}:{port}"

    def stop(self, timeout: float = 10.0) -> None:
        if self._stopped:
            return
        self._stopped = True
        self.server.should_exit = True
        if self.thread is not None:
            self.thread.join(timeout=timeout)
        try:
            self.socket.close()
        except OSError:
            pass


def serve(config: ServerConfig, *, block: bool = True) -> ServiceHandle:
    """Bind, then run. Binding happens before uvicorn starts so an
    occupied port fails fast instead of dying inside the event loop."""
    import uvicorn

    app = create_app(config)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((config.host, config.port))
    except OSError as exc:
        sock.close()
        raise BindFailure(
            f"cannot bind {config.host}:{config.port}: {exc}"
        ) from exc
    uv_config = uvicorn.Config(app, log_level="warning", access_log=False)
    server = uvicorn.Server(uv_config)
    handle = ServiceHandle(server=server, socket=sock)
    if block:
        server.run(sockets=[sock])
        return handle
    thread = threading.Thread(
        target=server.run, kwargs={"sockets": [sock]}, daemon=True
    )
    handle.thread = thread
    thread.start()
    return handle
