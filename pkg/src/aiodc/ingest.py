"""Defect-dataset loading, normalization, filtering and dedupe.

The canonical on-disk format is JSON Lines, one defect per line, with a
fixed key order so that load -> write -> load is byte-stable. Adapters
normalize CSV exports and GitHub issue exports into the same records.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .taxonomy import ODCBaseAttributes, ODCDefectType


class IngestError(Exception):
    pass


class IngestParseError(IngestError):
    def __init__(self, message: str, row: int = 0):
        super().__init__(f"row {row}: {message}" if row else message)
        self.row = row


class DuplicateIdError(IngestError):
    def __init__(self, record_id: str, row: int = 0):
        super().__init__(f"duplicate defect id {record_id!r}")
        self.record_id = record_id
        self.row = row


class Platform(enum.Enum):
    GITHUB = "GitHub"
    STACK_OVERFLOW = "StackOverflow"
    OTHER = "Other"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Platform":
        key = re.sub(r"[\s_-]+", "", text.strip().lower())
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a platform: {text!r}")


def normalize_label(text: str) -> str:
    """Lowercase, trim, and collapse internal whitespace."""
    return re.sub(r"\s+", " ", text.strip().lower())


@dataclass(frozen=True)
class DefectRecord:
    """One normalized defect/bug report."""

    id: str
    platform: Platform
    framework: str
    title: str = ""
    description: str = ""
    defect_type_label: str = ""
    cross_refs: tuple[str, ...] = ()
    odc: ODCBaseAttributes = ODCBaseAttributes()
    created_at: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("defect id must be non-empty")
        normalized = normalize_label(self.defect_type_label)
        if normalized != self.defect_type_label:
            object.__setattr__(self, "defect_type_label", normalized)
        refs = tuple(sorted(set(self.cross_refs)))
        if refs != self.cross_refs:
            object.__setattr__(self, "cross_refs", refs)


@dataclass
class LoadResult:
    """Outcome of a dataset load: accepted records plus per-row rejects."""

    records: list[DefectRecord] = field(default_factory=list)
    rejects: list[tuple[int, str]] = field(default_factory=list)

    @property
    def unlabeled_ids(self) -> list[str]:
        """Records that loaded without a defect-type label (classification
        will yield Unclassified for them)."""
        return [r.id for r in self.records if not r.defect_type_label]


def record_to_obj(record: DefectRecord) -> dict:
    odc = None
    if record.odc != ODCBaseAttributes():
        odc = {
            "defect_type": str(record.odc.defect_type) if record.odc.defect_type else None,
            "trigger": record.odc.trigger,
            "phase_found": record.odc.phase_found,
        }
    return {
        "id": record.id,
        "platform": record.platform.value,
        "framework": record.framework,
        "title": record.title,
        "description": record.description,
        "defect_type_label": record.defect_type_label,
        "cross_refs": list(record.cross_refs),
        "odc": odc,
        "created_at": record.created_at,
    }


def record_from_obj(obj: Mapping, row: int) -> DefectRecord:
    if not isinstance(obj, Mapping):
        raise IngestParseError("record is not an object", row)
    record_id = obj.get("id")
    if not isinstance(record_id, str) or not record_id:
        raise IngestParseError("missing or empty 'id'", row)
    try:
        platform = Platform.parse(str(obj.get("platform", "Other")))
    except ValueError as exc:
        raise IngestParseError(str(exc), row) from exc
    odc_obj = obj.get("odc") or {}
    defect_type = None
    if odc_obj.get("defect_type"):
        try:
            defect_type = ODCDefectType.parse(odc_obj["defect_type"])
        except ValueError as exc:
            raise IngestParseError(str(exc), row) from exc
    cross_refs = obj.get("cross_refs") or ()
    if not isinstance(cross_refs, (list, tuple)):
        raise IngestParseError("'cross_refs' must be a list", row)
    return DefectRecord(
        id=record_id,
        platform=platform,
        framework=str(obj.get("framework", "")),
        title=str(obj.get("title", "")),
        description=str(obj.get("description", "")),
        defect_type_label=str(obj.get("defect_type_label", "")),
        cross_refs=tuple(str(ref) for ref in cross_refs),
        odc=ODCBaseAttributes(
            defect_type=defect_type,
            trigger=odc_obj.get("trigger"),
            phase_found=odc_obj.get("phase_found"),
        ),
        created_at=obj.get("created_at"),
    )


def render_canonical(records: Iterable[DefectRecord]) -> str:
    """Render records to the canonical JSONL format (deterministic bytes)."""
    lines = [
        json.dumps(record_to_obj(r), ensure_ascii=False, separators=(", ", ": "))
        for r in records
    ]
    return "".join(line + "\n" for line in lines)


def write_canonical(records: Iterable[DefectRecord], path: str | Path) -> None:
    Path(path).write_text(render_canonical(records), encoding="utf-8")


def _load_canonical(text: str) -> LoadResult:
    result = LoadResult()
    for row, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestParseError(f"invalid record syntax: {exc.msg}", row) from exc
        try:
            result.records.append(record_from_obj(obj, row))
        except IngestParseError as exc:
            result.rejects.append((row, str(exc)))
    return result


def _load_csv(text: str) -> LoadResult:
    result = LoadResult()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return result
    if "id" not in reader.fieldnames:
        raise IngestParseError("CSV header must include an 'id' column", 1)
    for row, raw in enumerate(reader, start=2):
        obj = {
            "id": (raw.get("id") or "").strip(),
            "platform": (raw.get("platform") or "Other").strip(),
            "framework": (raw.get("framework") or "").strip(),
            "title": raw.get("title") or "",
            "description": raw.get("description") or "",
            "defect_type_label": raw.get("defect_type_label") or "",
            "cross_refs": [p for p in (raw.get("cross_refs") or "").split(";") if p],
            "odc": {
                "defect_type": (raw.get("defect_type") or "").strip() or None,
                "trigger": raw.get("trigger") or None,
                "phase_found": raw.get("phase_found") or None,
            },
            "created_at": raw.get("created_at") or None,
        }
        try:
            result.records.append(record_from_obj(obj, row))
        except IngestParseError as exc:
            result.rejects.append((row, str(exc)))
    return result


def _load_github_export(
    text: str, label_map: Mapping[str, str], framework: str
) -> LoadResult:
    """Normalize the standard GitHub issue-export array shape.

    ``label_map`` maps issue label names to defect-type labels; the first
    issue label present in the map wins.
    """
    result = LoadResult()
    try:
        issues = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestParseError(f"invalid export syntax: {exc.msg}", 1) from exc
    if not isinstance(issues, list):
        raise IngestParseError("GitHub export must be an array of issues", 1)
    normalized_map = {normalize_label(k): v for k, v in label_map.items()}
    for row, issue in enumerate(issues, start=1):
        if not isinstance(issue, Mapping):
            result.rejects.append((row, "issue is not an object"))
            continue
        number = issue.get("id", issue.get("number"))
        if number is None:
            result.rejects.append((row, "issue has no id/number"))
            continue
        labels = []
        for lab in issue.get("labels") or []:
            labels.append(lab["name"] if isinstance(lab, Mapping) else str(lab))
        defect_label = ""
        for lab in labels:
            mapped = normalized_map.get(normalize_label(lab))
            if mapped is not None:
                defect_label = mapped
                break
        result.records.append(
            DefectRecord(
                id=str(number),
                platform=Platform.GITHUB,
                framework=framework,
                title=str(issue.get("title") or ""),
                description=str(issue.get("body") or ""),
                defect_type_label=defect_label,
                created_at=issue.get("created_at"),
            )
        )
    return result


def load_defects(
    path: str | Path,
    format: str = "canonical",
    *,
    label_map: Mapping[str, str] | str | Path | None = None,
    framework: str = "unknown",
) -> LoadResult:
    """Load a defect dataset into normalized records.

    format is one of 'canonical', 'csv', 'github_export'. Rows that parse
    structurally but violate record invariants are collected in
    ``result.rejects``; unparseable input raises IngestParseError, a
    repeated id raises DuplicateIdError.
    """
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"dataset not found: {p}")
    text = p.read_text(encoding="utf-8")

    if format == "canonical":
        result = _load_canonical(text)
    elif format == "csv":
        result = _load_csv(text)
    elif format == "github_export":
        mapping: Mapping[str, str]
        if label_map is None:
            mapping = {}
        elif isinstance(label_map, (str, Path)):
            mapping = json.loads(Path(label_map).read_text(encoding="utf-8"))
        else:
            mapping = label_map
        result = _load_github_export(text, mapping, framework)
    else:
        raise ValueError(f"unsupported format: {format!r}")

    seen: set[str] = set()
    for record in result.records:
        if record.id in seen:
            raise DuplicateIdError(record.id)
        seen.add(record.id)
    return result


def filter_defects(
    records: Sequence[DefectRecord],
    platform: Platform | str | None = None,
    framework: str | None = None,
) -> list[DefectRecord]:
    """Order-preserving subset matching all provided predicates."""
    want_platform = Platform.parse(platform) if isinstance(platform, str) else platform
    want_framework = framework.strip().lower() if framework is not None else None
    out = []
    for record in records:
        if want_platform is not None and record.platform is not want_platform:
            continue
        if want_framework is not None and record.framework.strip().lower() != want_framework:
            continue
        out.append(record)
    return out


def dedupe_by_issue_id(
    records: Sequence[DefectRecord],
) -> tuple[list[DefectRecord], list[tuple[DefectRecord, str]]]:
    """Collapse cross-platform reposts by issue-ID cross-reference.

    Two records are duplicates when either id appears in the other's
    cross_refs, closed transitively. Each duplicate class keeps the record
    with the lexicographically smallest id; the rest are returned as
    (record, kept_id) pairs. Input order is preserved on both sides.
    """
    by_id = {r.id: r for r in records}
    parent: dict[str, str] = {r.id: r.id for r in records}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for record in records:
        for ref in record.cross_refs:
            if ref in by_id:
                union(record.id, ref)

    smallest: dict[str, str] = {}
    for record in records:
        root = find(record.id)
        if root not in smallest or record.id < smallest[root]:
            smallest[root] = record.id

    kept, dropped = [], []
    for record in records:
        keep_id = smallest[find(record.id)]
        if record.id == keep_id:
            kept.append(record)
        else:
            dropped.append((record, keep_id))
    return kept, dropped


def benchmark_dataset_path() -> Path:
    """Bundled 100-defect benchmark reconstruction (all platforms)."""
    return Path(__file__).parent / "data" / "benchmark-defects.jsonl"


def keras_github_dataset_path() -> Path:
    """Bundled 42-defect Keras/GitHub case-study subset."""
    return Path(__file__).parent / "data" / "keras-github-defects.jsonl"
