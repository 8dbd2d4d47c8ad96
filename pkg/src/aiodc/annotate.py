"""Two-annotator labeling sessions.

A session tracks one project's defects through Pending -> Labeled /
Disputed -> Resolved. The first two annotators (sorted by identifier)
form the primary pair whose labels are compared; anyone else may act as
resolver. Agreement is chance-corrected (Cohen's kappa) and always
computed on pre-resolution labels, since folding resolutions back in
would inflate agreement.

Sessions are mutable. Mutations to one session must be serialized by
the caller (the service layer holds one lock per session); reads
between mutations are safe. Distinct sessions are independent.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .classify import (
    ClassificationLabel,
    Provenance,
    label_from_obj,
    label_to_obj,
)


class AnnotationError(Exception):
    """Base for session errors."""


class TooFewAnnotators(AnnotationError):
    pass


class DuplicateDefectId(AnnotationError):
    pass


class UnknownAnnotator(AnnotationError):
    pass


class UnknownDefect(AnnotationError):
    pass


class NotDisputed(AnnotationError):
    pass


class ResolverIsParty(AnnotationError):
    pass


class LabelFrozen(AnnotationError):
    """Raised on resubmission after a defect was resolved."""


class NoOverlap(AnnotationError):
    """No defect labeled by both primary annotators."""


class DegenerateMarginals(AnnotationError):
    """Expected agreement is 1; kappa is undefined."""


class UnresolvedDisputes(AnnotationError):
    def __init__(self, defect_ids: Sequence[str]):
        super().__init__(f"defects not ready for consolidation: {list(defect_ids)}")
        self.defect_ids = tuple(defect_ids)


class CorruptPersistence(AnnotationError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class DefectStatus(enum.Enum):
    PENDING = "Pending"
    LABELED = "Labeled"
    DISPUTED = "Disputed"
    RESOLVED = "Resolved"

    def __str__(self) -> str:
        return self.value


class CompareAttribute(enum.Enum):
    """Which label attribute agreement and disputes are computed on."""

    AI = "ai"
    SEVERITY = "severity"
    COMBINED = "combined"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "CompareAttribute":
        key = text.strip().lower()
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"not a comparable attribute: {text!r}")

    def key(self, label: ClassificationLabel) -> tuple:
        if self is CompareAttribute.AI:
            return (label.ai,)
        if self is CompareAttribute.SEVERITY:
            return (label.severity,)
        return (label.ai, label.severity)


@dataclass(frozen=True)
class AgreementResult:
    attribute: CompareAttribute
    p_o: float
    p_e: float
    kappa: float
    n: int


@dataclass
class AnnotationSession:
    """Label store for one project; status is derived, never stored."""

    project: str
    defects: tuple[str, ...]
    annotators: tuple[str, ...]
    labels: dict[tuple[str, str], ClassificationLabel] = field(default_factory=dict)
    resolutions: dict[str, ClassificationLabel] = field(default_factory=dict)

    @property
    def primary_pair(self) -> tuple[str, str]:
        return self.annotators[0], self.annotators[1]

    def pair_labels(
        self, defect_id: str
    ) -> tuple[ClassificationLabel | None, ClassificationLabel | None]:
        a, b = self.primary_pair
        return self.labels.get((defect_id, a)), self.labels.get((defect_id, b))

    def status(self, defect_id: str) -> DefectStatus:
        if defect_id not in self._defect_set():
            raise UnknownDefect(defect_id)
        if defect_id in self.resolutions:
            return DefectStatus.RESOLVED
        la, lb = self.pair_labels(defect_id)
        if la is None or lb is None:
            return DefectStatus.PENDING
        if CompareAttribute.COMBINED.key(la) != CompareAttribute.COMBINED.key(lb):
            return DefectStatus.DISPUTED
        return DefectStatus.LABELED

    def statuses(self) -> dict[str, DefectStatus]:
        return {d: self.status(d) for d in self.defects}

    def _defect_set(self) -> frozenset:
        return frozenset(self.defects)


def open_session(
    project: str, defects: Iterable[str], annotators: Iterable[str]
) -> AnnotationSession:
    defect_tuple = tuple(defects)
    seen = set()
    for d in defect_tuple:
        if d in seen:
            raise DuplicateDefectId(d)
        seen.add(d)
    annotator_tuple = tuple(sorted(set(annotators)))
    if len(annotator_tuple) < 2:
        raise TooFewAnnotators(
            f"need at least 2 annotators, got {len(annotator_tuple)}"
        )
    return AnnotationSession(
        project=project, defects=defect_tuple, annotators=annotator_tuple
    )


def submit_label(
    session: AnnotationSession, annotator: str, label: ClassificationLabel
) -> AnnotationSession:
    """Store one annotator's verdict. Resubmission overwrites until the
    defect is resolved; resolved defects are frozen."""
    if annotator not in session.annotators:
        raise UnknownAnnotator(annotator)
    if label.defect_id not in session._defect_set():
        raise UnknownDefect(label.defect_id)
    if label.defect_id in session.resolutions:
        raise LabelFrozen(label.defect_id)
    stored = dataclasses.replace(
        label, annotator=annotator, provenance=Provenance.HUMAN
    )
    session.labels[(label.defect_id, annotator)] = stored
    return session


def list_disputes(
    session: AnnotationSession,
    attribute: CompareAttribute = CompareAttribute.COMBINED,
) -> list[tuple[str, ClassificationLabel, ClassificationLabel]]:
    """Disputed defects whose primary labels differ on the chosen
    attribute, sorted by defect id. Resolved defects are done arguing."""
    out = []
    for defect_id in sorted(session.defects):
        if defect_id in session.resolutions:
            continue
        la, lb = session.pair_labels(defect_id)
        if la is None or lb is None:
            continue
        if attribute.key(la) != attribute.key(lb):
            out.append((defect_id, la, lb))
    return out


def impact_difference(
    a: ClassificationLabel, b: ClassificationLabel
) -> list[str]:
    """Symmetric difference of the two impact-path sets, rendered.
    Shown to resolvers; never blocks consolidation."""
    sa = {p.render() for p in a.impacts}
    sb = {p.render() for p in b.impacts}
    return sorted(sa ^ sb)


def resolve_dispute(
    session: AnnotationSession,
    defect_id: str,
    resolver: str,
    final_label: ClassificationLabel,
) -> AnnotationSession:
    if session.status(defect_id) is not DefectStatus.DISPUTED:
        raise NotDisputed(defect_id)
    if resolver in session.primary_pair:
        raise ResolverIsParty(resolver)
    session.resolutions[defect_id] = dataclasses.replace(
        final_label,
        defect_id=defect_id,
        annotator=resolver,
        provenance=Provenance.RESOLVED,
    )
    return session


def kappa_from_pairs(
    pairs: Sequence[tuple[Hashable, Hashable]],
) -> tuple[float, float, float]:
    """(p_o, p_e, kappa) for paired categorical verdicts.

    p_e multiplies the two raters' marginal category frequencies, so a
    rater who never uses a category contributes nothing for it.
    """
    n = len(pairs)
    if n == 0:
        raise NoOverlap("no doubly-labeled defects")
    row = Counter(a for a, _ in pairs)
    col = Counter(b for _, b in pairs)
    p_o = sum(1 for a, b in pairs if a == b) / n
    p_e = sum(row[c] * col[c] for c in row.keys() | col.keys()) / (n * n)
    if p_e == 1.0:
        raise DegenerateMarginals(
            "both annotators used a single category; kappa undefined"
        )
    return p_o, p_e, (p_o - p_e) / (1.0 - p_e)


def cohen_kappa(
    session: AnnotationSession,
    attribute: CompareAttribute = CompareAttribute.AI,
) -> AgreementResult:
    """Agreement of the primary pair over defects both have labeled,
    using pre-resolution labels only."""
    pairs = []
    for defect_id in session.defects:
        la, lb = session.pair_labels(defect_id)
        if la is not None and lb is not None:
            pairs.append((attribute.key(la), attribute.key(lb)))
    p_o, p_e, kappa = kappa_from_pairs(pairs)
    return AgreementResult(
        attribute=attribute, p_o=p_o, p_e=p_e, kappa=kappa, n=len(pairs)
    )


def _merge_agreed(
    a: ClassificationLabel, b: ClassificationLabel
) -> ClassificationLabel:
    # ai and severity agree by construction; impact paths are a set
    # union since path disagreement never blocks.
    merged = {p.render(): p for p in a.impacts + b.impacts}
    impacts = tuple(merged[k] for k in sorted(merged))
    return dataclasses.replace(
        a,
        impacts=impacts,
        annotator=None,
        provenance=Provenance.HUMAN,
        rationale=a.rationale or b.rationale,
    )


def consolidate_ready(session: AnnotationSession) -> list[ClassificationLabel]:
    """Final labels for the defects that are Labeled or Resolved,
    session order. The live-analysis view of a half-done session."""
    out = []
    for defect_id in session.defects:
        status = session.status(defect_id)
        if status is DefectStatus.RESOLVED:
            out.append(session.resolutions[defect_id])
        elif status is DefectStatus.LABELED:
            la, lb = session.pair_labels(defect_id)
            out.append(_merge_agreed(la, lb))
    return out


def consolidate(session: AnnotationSession) -> list[ClassificationLabel]:
    """One final label per defect, session order: the agreed label
    (provenance Human) or the resolution (provenance Resolved)."""
    blocking = [
        d
        for d in session.defects
        if session.status(d)
        in (DefectStatus.PENDING, DefectStatus.DISPUTED)
    ]
    if blocking:
        raise UnresolvedDisputes(blocking)
    return consolidate_ready(session)


# --- event-log persistence ------------------------------------------------
#
# A session is durable as an append-only JSONL event log; state is a
# fold over the log. The service layer tags events with a session id
# and multiplexes many sessions into one file; the CLI keeps one
# session per file and omits the tag.


def open_event(
    project: str, defects: Sequence[str], annotators: Sequence[str]
) -> dict:
    return {
        "event": "open",
        "project": project,
        "defects": list(defects),
        "annotators": sorted(set(annotators)),
    }


def label_event(annotator: str, label: ClassificationLabel) -> dict:
    return {"event": "label", "annotator": annotator, "label": label_to_obj(label)}


def resolve_event(resolver: str, label: ClassificationLabel) -> dict:
    return {"event": "resolve", "resolver": resolver, "label": label_to_obj(label)}


def render_event(event: Mapping) -> str:
    return json.dumps(event, ensure_ascii=False, separators=(", ", ": ")) + "\n"


def append_event(path: str | Path, event: Mapping) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(render_event(event))


def apply_event(session: AnnotationSession, event: Mapping) -> AnnotationSession:
    """Fold one label/resolve event into an open session."""
    kind = event.get("event")
    if kind == "label":
        return submit_label(
            session, event["annotator"], label_from_obj(event["label"])
        )
    if kind == "resolve":
        label = label_from_obj(event["label"])
        return resolve_dispute(
            session, label.defect_id, event["resolver"], label
        )
    raise CorruptPersistence(f"unknown event kind {kind!r}")


def replay_events(events: Iterable[Mapping]) -> AnnotationSession:
    session = None
    for i, event in enumerate(events, start=1):
        try:
            if event.get("event") == "open":
                if session is not None:
                    raise CorruptPersistence("second open event", i)
                session = open_session(
                    event["project"], event["defects"], event["annotators"]
                )
            else:
                if session is None:
                    raise CorruptPersistence("event before open", i)
                apply_event(session, event)
        except CorruptPersistence:
            raise
        except (AnnotationError, KeyError, ValueError, TypeError) as exc:
            raise CorruptPersistence(str(exc), i) from exc
    if session is None:
        raise CorruptPersistence("empty event log")
    return session


def load_session(path: str | Path) -> AnnotationSession:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"session log not found: {p}")
    events = []
    for i, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptPersistence(f"bad JSON: {exc}", i) from exc
    return replay_events(events)


def save_session(session: AnnotationSession, path: str | Path) -> None:
    """Write a fresh log equivalent to the session's current state."""
    events = [open_event(session.project, session.defects, session.annotators)]
    for (defect_id, annotator) in sorted(session.labels):
        events.append(label_event(annotator, session.labels[(defect_id, annotator)]))
    for defect_id in sorted(session.resolutions):
        label = session.resolutions[defect_id]
        events.append(resolve_event(label.annotator or "", label))
    Path(path).write_text(
        "".join(render_event(e) for e in events), encoding="utf-8"
    )
