"""Rule engine mapping defects to an AI attribute, a severity level, and
impact paths.

Rules live in a three-section text file (ai-rules, impact-rules,
severity-matrix). Matching is exact on the normalized defect-type label,
with an ordered keyword fallback for labels no rule covers; severity comes
from a total (reversibility x scope) base matrix plus a criticality shift,
clamped to the 1..5 scale.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .ingest import DefectRecord, normalize_label
from .taxonomy import (
    AIAttribute,
    ImpactPath,
    Severity,
    Taxonomy,
    validate_impact_path,
)


class RuleError(Exception):
    pass


class RuleParseError(RuleError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class UnknownContextIdError(RuleError):
    def __init__(self, ids: Sequence[str]):
        super().__init__(f"contexts reference unknown defect ids: {sorted(ids)}")
        self.ids = list(ids)


class Criticality(enum.Enum):
    SAFETY_CRITICAL = "SafetyCritical"
    ENTERPRISE = "Enterprise"
    NON_CRITICAL = "NonCritical"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Criticality":
        key = re.sub(r"[\s_-]+", "", text.strip().lower())
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a criticality: {text!r}")


class Reversibility(enum.Enum):
    IRREVERSIBLE = "Irreversible"
    REVERSIBLE = "Reversible"
    TRANSIENT = "Transient"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Reversibility":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a reversibility: {text!r}")


class Scope(enum.Enum):
    SYSTEMIC = "Systemic"
    LOCALIZED = "Localized"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Scope":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a failure scope: {text!r}")


@dataclass(frozen=True)
class SeverityContext:
    """The three factors severity assignment depends on."""

    criticality: Criticality
    reversibility: Reversibility
    scope: Scope


@dataclass(frozen=True)
class SeverityMatrix:
    """Total base mapping (reversibility x scope) -> severity, plus a
    per-criticality shift applied on top and clamped to 1..5."""

    base: Mapping[tuple[Reversibility, Scope], Severity]
    shift: Mapping[Criticality, int]

    def __post_init__(self):
        missing = [
            (r, s)
            for r in Reversibility
            for s in Scope
            if (r, s) not in self.base
        ]
        if missing:
            raise RuleError(f"severity matrix not total, missing {missing}")
        for c in Criticality:
            if c not in self.shift:
                raise RuleError(f"severity matrix missing shift for {c}")


class Provenance(enum.Enum):
    RULE = "Rule"
    HUMAN = "Human"
    RESOLVED = "Resolved"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Provenance":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a provenance: {text!r}")


@dataclass(frozen=True)
class ClassificationLabel:
    """One defect's verdict: AI attribute, severity, impact paths."""

    defect_id: str
    ai: AIAttribute
    severity: Severity | None = None
    impacts: tuple[ImpactPath, ...] = ()
    provenance: Provenance = Provenance.RULE
    annotator: str | None = None
    rationale: str | None = None


@dataclass(frozen=True)
class RuleSet:
    """Immutable rule bundle loaded from a rule file."""

    ai_rules: tuple[tuple[str, AIAttribute], ...]
    impact_rules: tuple[tuple[str, tuple[ImpactPath, ...]], ...]
    severity_matrix: SeverityMatrix
    version: str = "unversioned"

    def ai_rule_map(self) -> dict[str, AIAttribute]:
        return dict(self.ai_rules)

    def impact_rule_map(self) -> dict[str, tuple[ImpactPath, ...]]:
        return dict(self.impact_rules)


# Fallback for labels no exact rule covers. Scanned in order; the first
# keyword contained in the normalized label decides the attribute.
KEYWORD_RULES: tuple[tuple[str, AIAttribute], ...] = (
    ("data", AIAttribute.DATA),
    ("dataset", AIAttribute.DATA),
    ("tensor shape", AIAttribute.DATA),
    ("preprocess", AIAttribute.DATA),
    ("epoch", AIAttribute.LEARNING),
    ("batch", AIAttribute.LEARNING),
    ("loss", AIAttribute.LEARNING),
    ("optimiz", AIAttribute.LEARNING),
    ("train", AIAttribute.LEARNING),
    ("layer", AIAttribute.THINKING),
    ("architecture", AIAttribute.THINKING),
    ("activation", AIAttribute.THINKING),
    ("inference", AIAttribute.THINKING),
    ("network", AIAttribute.THINKING),
    ("api", AIAttribute.NOT_RELATED),
    ("documentation", AIAttribute.NOT_RELATED),
    ("build", AIAttribute.NOT_RELATED),
)


def classify_ai_attribute(record: DefectRecord, rules: RuleSet) -> AIAttribute:
    """Exact rule match first, keyword fallback second, Unclassified last."""
    label = normalize_label(record.defect_type_label)
    if label:
        exact = rules.ai_rule_map().get(label)
        if exact is not None:
            return exact
        for keyword, attribute in KEYWORD_RULES:
            if keyword in label:
                return attribute
    return AIAttribute.UNCLASSIFIED


def assign_severity(ctx: SeverityContext, matrix: SeverityMatrix) -> Severity:
    """Base level for (reversibility, scope), shifted by criticality and
    clamped to the scale."""
    base = matrix.base[(ctx.reversibility, ctx.scope)]
    shifted = int(base) + matrix.shift[ctx.criticality]
    return Severity(min(5, max(1, shifted)))


def map_impact(record: DefectRecord, rules: RuleSet) -> list[ImpactPath]:
    """Paths of the first impact rule matching the defect-type label;
    empty when unmapped."""
    label = normalize_label(record.defect_type_label)
    if label:
        paths = rules.impact_rule_map().get(label)
        if paths is not None:
            return list(paths)
    return []


def classify_dataset(
    records: Sequence[DefectRecord],
    rules: RuleSet,
    contexts: Mapping[str, SeverityContext] | None = None,
) -> list[ClassificationLabel]:
    """One rule-provenance label per record, in input order. Severity is
    filled only for records with a supplied context."""
    contexts = contexts or {}
    known = {r.id for r in records}
    unknown = [i for i in contexts if i not in known]
    if unknown:
        raise UnknownContextIdError(unknown)

    labels = []
    for record in records:
        ctx = contexts.get(record.id)
        labels.append(
            ClassificationLabel(
                defect_id=record.id,
                ai=classify_ai_attribute(record, rules),
                severity=assign_severity(ctx, rules.severity_matrix) if ctx else None,
                impacts=tuple(map_impact(record, rules)),
                provenance=Provenance.RULE,
            )
        )
    return labels


# -- rule file -------------------------------------------------------------

_SECTIONS = ("ai-rules", "impact-rules", "severity-matrix")


def parse_rules(text: str, tax: Taxonomy) -> RuleSet:
    """Parse a three-section rule file and validate it against the taxonomy."""
    ai_rules: list[tuple[str, AIAttribute]] = []
    impact_rules: list[tuple[str, tuple[ImpactPath, ...]]] = []
    base: dict[tuple[Reversibility, Scope], Severity] = {}
    shift: dict[Criticality, int] = {}
    version = "unversioned"
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise RuleParseError(f"unknown section {section!r}", lineno)
            continue
        if section is None:
            fields = line.split()
            if fields[0].lower() == "version" and len(fields) == 2:
                version = fields[1]
                continue
            raise RuleParseError("rule outside any section", lineno)

        if section == "severity-matrix":
            _parse_matrix_line(line, lineno, base, shift)
            continue

        pattern_part, sep, value_part = line.partition("->")
        if not sep:
            raise RuleParseError("expected 'pattern -> value'", lineno)
        pattern = normalize_label(pattern_part)
        if not pattern:
            raise RuleParseError("empty pattern", lineno)
        try:
            if section == "ai-rules":
                if any(p == pattern for p, _ in ai_rules):
                    raise RuleParseError(f"duplicate ai-rule pattern {pattern!r}", lineno)
                ai_rules.append((pattern, AIAttribute.parse(value_part)))
            else:
                if any(p == pattern for p, _ in impact_rules):
                    raise RuleParseError(
                        f"duplicate impact-rule pattern {pattern!r}", lineno
                    )
                paths = tuple(
                    ImpactPath.parse(part)
                    for part in value_part.split(";")
                    if part.strip()
                )
                if not paths:
                    raise RuleParseError("impact rule lists no paths", lineno)
                for path in paths:
                    validate_impact_path(path, tax)
                impact_rules.append((pattern, paths))
        except RuleParseError:
            raise
        except Exception as exc:
            raise RuleParseError(str(exc), lineno) from exc

    matrix = SeverityMatrix(base=base, shift=shift)
    return RuleSet(
        ai_rules=tuple(ai_rules),
        impact_rules=tuple(impact_rules),
        severity_matrix=matrix,
        version=version,
    )


def _parse_matrix_line(
    line: str,
    lineno: int,
    base: dict[tuple[Reversibility, Scope], Severity],
    shift: dict[Criticality, int],
) -> None:
    lhs, sep, rhs = line.partition("->")
    if not sep:
        raise RuleParseError("expected '... -> value'", lineno)
    fields = lhs.split()
    rhs = rhs.strip()
    try:
        if fields and fields[0] == "base":
            if len(fields) != 3:
                raise ValueError("base line needs reversibility and scope")
            key = (Reversibility.parse(fields[1]), Scope.parse(fields[2]))
            if key in base:
                raise ValueError(f"duplicate base cell {fields[1]}/{fields[2]}")
            base[key] = Severity.parse(rhs)
        elif fields and fields[0] == "shift":
            if len(fields) != 2:
                raise ValueError("shift line needs a criticality")
            crit = Criticality.parse(fields[1])
            if crit in shift:
                raise ValueError(f"duplicate shift for {fields[1]}")
            shift[crit] = int(rhs)
        else:
            raise ValueError("matrix line must start with 'base' or 'shift'")
    except RuleParseError:
        raise
    except Exception as exc:
        raise RuleParseError(str(exc), lineno) from exc


def load_rules(path: str | Path, tax: Taxonomy) -> RuleSet:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"rule file not found: {p}")
    return parse_rules(p.read_text(encoding="utf-8"), tax)


def default_rules_path() -> Path:
    """Bundled rule file encoding the Keras case-study tables."""
    return Path(__file__).parent / "rules" / "aiodc-default.rules"


# -- severity-context file -------------------------------------------------


def parse_contexts(text: str) -> dict[str, SeverityContext]:
    """Parse per-defect context lines: ``id criticality reversibility scope``."""
    contexts: dict[str, SeverityContext] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise RuleParseError("expected 'id criticality reversibility scope'", lineno)
        defect_id = fields[0]
        if defect_id in contexts:
            raise RuleParseError(f"duplicate context for {defect_id!r}", lineno)
        try:
            contexts[defect_id] = SeverityContext(
                criticality=Criticality.parse(fields[1]),
                reversibility=Reversibility.parse(fields[2]),
                scope=Scope.parse(fields[3]),
            )
        except ValueError as exc:
            raise RuleParseError(str(exc), lineno) from exc
    return contexts


def load_contexts(path: str | Path) -> dict[str, SeverityContext]:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"context file not found: {p}")
    return parse_contexts(p.read_text(encoding="utf-8"))


def default_contexts_path() -> Path:
    """Bundled severity contexts for the Keras/GitHub case-study subset."""
    return Path(__file__).parent / "data" / "keras-github-contexts.txt"


# -- label file ------------------------------------------------------------


def label_to_obj(label: ClassificationLabel) -> dict:
    return {
        "defect_id": label.defect_id,
        "annotator": label.annotator,
        "ai": label.ai.value,
        "severity": str(label.severity) if label.severity is not None else None,
        "impacts": [p.render() for p in label.impacts],
        "provenance": label.provenance.value,
        "rationale": label.rationale,
    }


def label_from_obj(obj: Mapping) -> ClassificationLabel:
    severity = obj.get("severity")
    return ClassificationLabel(
        defect_id=str(obj["defect_id"]),
        ai=AIAttribute.parse(obj["ai"]),
        severity=Severity.parse(severity) if severity else None,
        impacts=tuple(ImpactPath.parse(p) for p in obj.get("impacts") or ()),
        provenance=Provenance.parse(obj.get("provenance") or "Rule"),
        annotator=obj.get("annotator"),
        rationale=obj.get("rationale"),
    )


def render_labels(labels: Iterable[ClassificationLabel]) -> str:
    """One label per line, deterministic bytes."""
    lines = [
        json.dumps(label_to_obj(lab), ensure_ascii=False, separators=(", ", ": "))
        for lab in labels
    ]
    return "".join(line + "\n" for line in lines)


def write_labels(labels: Iterable[ClassificationLabel], path: str | Path) -> None:
    Path(path).write_text(render_labels(labels), encoding="utf-8")


def parse_labels(text: str) -> list[ClassificationLabel]:
    labels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            labels.append(label_from_obj(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise RuleParseError(f"bad label line: {exc}", lineno) from exc
    return labels


def load_labels(path: str | Path) -> list[ClassificationLabel]:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"label file not found: {p}")
    return parse_labels(p.read_text(encoding="utf-8"))
