"""Attribute universe for AI-defect classification.

Defines the AI attribute (Data / Learning / Thinking / NotRelated), the
five-tier severity scale, the classic ODC defect types with their cloud
extensions, and the layered AI/AIP quality-characteristic hierarchy that
impact mapping validates against.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class TaxonomyError(Exception):
    """Base class for taxonomy loading/validation failures."""


class TaxonomyParseError(TaxonomyError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class DuplicateCharacteristicError(TaxonomyError):
    def __init__(self, name: str, line: int = 0):
        super().__init__(f"duplicate characteristic {name!r}")
        self.name = name
        self.line = line


class BadLayerError(TaxonomyError):
    def __init__(self, name: str, layer: str, line: int = 0):
        super().__init__(f"characteristic {name!r}: layer must be 1, 2 or 3, got {layer!r}")
        self.name = name
        self.line = line


class ImpactPathError(TaxonomyError):
    """Base class for impact-path validation failures."""


class EmptyPathError(ImpactPathError):
    pass


class UnknownCharacteristicError(ImpactPathError):
    def __init__(self, name: str):
        super().__init__(f"unknown characteristic {name!r}")
        self.name = name


class LayerMismatchError(ImpactPathError):
    pass


class ModelMismatchError(ImpactPathError):
    pass


class AIAttribute(enum.Enum):
    """Which aspect of an AI system a defect belongs to.

    Unclassified is a tool-internal sentinel: it marks records no rule or
    keyword could place, which are then routed to human annotation. It is
    never counted in distribution totals.
    """

    DATA = "Data"
    LEARNING = "Learning"
    THINKING = "Thinking"
    NOT_RELATED = "NotRelated"
    UNCLASSIFIED = "Unclassified"

    def __str__(self) -> str:
        return self.value

    @property
    def description(self) -> str:
        return _AI_ATTRIBUTE_DESCRIPTIONS[self]

    @classmethod
    def parse(cls, text: str) -> "AIAttribute":
        key = re.sub(r"[\s_-]+", "", text.strip().lower())
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not an AI attribute: {text!r}")


_AI_ATTRIBUTE_DESCRIPTIONS = {
    AIAttribute.DATA: "Defects in the training or testing data.",
    AIAttribute.LEARNING: "Defects in the model training process.",
    AIAttribute.THINKING: "Defects in inference, logic, or decision making.",
    AIAttribute.NOT_RELATED: "Defects unrelated to AI logic or behavior.",
    AIAttribute.UNCLASSIFIED: "No rule matched; needs human annotation.",
}


class Severity(enum.IntEnum):
    """Five-tier severity scale, ordered Low(1) .. Catastrophic(5)."""

    LOW = 1
    MEDIUM = 2
    HIGH = 3
    CRITICAL = 4
    CATASTROPHIC = 5

    def __str__(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "Severity":
        key = text.strip().lower()
        for member in cls:
            if member.name.lower() == key:
                return member
        raise ValueError(f"not a severity level: {text!r}")


def severity_rank(s: Severity) -> int:
    """Numeric rank of a severity level, 1 (Low) through 5 (Catastrophic)."""
    return int(s)


SEVERITY_DESCRIPTIONS = {
    Severity.CATASTROPHIC: "Irreversible systemic damage.",
    Severity.CRITICAL: "Significant but recoverable harm.",
    Severity.HIGH: "Localized or transient harm needing prompt rework.",
    Severity.MEDIUM: "Localized, transient harm; routine fix.",
    Severity.LOW: "Negligible harm in a non-critical setting.",
}


class ODCDefectType(enum.Enum):
    """Classic ODC defect types plus the two cloud extensions."""

    FUNCTION = "Function"
    INTERFACE = "Interface"
    CHECKING = "Checking"
    ASSIGNMENT = "Assignment"
    TIMING_SERIALIZATION = "Timing/Serialization"
    BUILD_PACKAGE_MERGE = "Build/Package/Merge"
    DOCUMENTATION = "Documentation"
    ALGORITHM = "Algorithm"
    ISOLATION = "Isolation"
    IAAS_PAAS = "IaaS/PaaS"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "ODCDefectType":
        key = re.sub(r"[\s_/-]+", "", text.strip().lower())
        for member in cls:
            if re.sub(r"[/]", "", member.value.lower()) == key:
                return member
        raise ValueError(f"not an ODC defect type: {text!r}")


@dataclass(frozen=True)
class ODCBaseAttributes:
    """Pass-through ODC metadata carried on a defect record."""

    defect_type: ODCDefectType | None = None
    trigger: str | None = None
    phase_found: str | None = None


class QualityModel(enum.Enum):
    """Which quality model a characteristic belongs to.

    AI is the intelligence itself, AIP the platform running it; Shared
    characteristics appear in both hierarchies.
    """

    AI = "AI"
    AIP = "AIP"
    SHARED = "Shared"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "QualityModel":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"not a quality model: {text!r}")


@dataclass(frozen=True)
class QualityCharacteristic:
    """One node of the layered quality hierarchy.

    ``layer`` is the characteristic's depth in the AI-side hierarchy
    (dependencies sit one layer below what depends on them). Shared
    characteristics keep that depth even though the platform hierarchy may
    surface them at its top layer.
    """

    name: str
    model: QualityModel
    layer: int


_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


@dataclass(frozen=True)
class ImpactPath:
    """Chain of quality characteristics degraded by a defect, top layer first.

    ``model`` is AI or AIP (never Shared); a truncated chain means the
    deeper layers are unaffected.
    """

    model: QualityModel
    characteristics: tuple[str, ...]

    def render(self) -> str:
        return f"{self.model.value}:{'/'.join(self.characteristics)}"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> "ImpactPath":
        """Parse the compact ``MODEL:Name/Name`` form."""
        model_part, sep, chain = text.strip().partition(":")
        if not sep:
            raise ValueError(f"impact path needs 'MODEL:chain': {text!r}")
        model = QualityModel.parse(model_part)
        if model is QualityModel.SHARED:
            raise ValueError("impact paths belong to AI or AIP, not Shared")
        names = tuple(part.strip() for part in chain.split("/") if part.strip())
        if not names:
            raise ValueError(f"impact path has no characteristics: {text!r}")
        return cls(model=model, characteristics=names)


@dataclass(frozen=True)
class Taxonomy:
    """Immutable characteristic registry loaded from a taxonomy file."""

    characteristics: dict[str, QualityCharacteristic] = field(default_factory=dict)
    version: str = "unversioned"

    def get(self, name: str) -> QualityCharacteristic | None:
        return self.characteristics.get(name)

    def __len__(self) -> int:
        return len(self.characteristics)


def validate_impact_path(path: ImpactPath, tax: Taxonomy) -> None:
    """Check a path against the taxonomy; raises ImpactPathError on the
    first violated rule.

    Layer rule: layers ascend by exactly one along the chain, and AI-model
    paths must be anchored at layer 1. AIP-model paths may start deeper,
    since Shared characteristics keep their AI-side layer number while
    heading platform paths on their own.
    """
    if not path.characteristics:
        raise EmptyPathError("impact path is empty")
    if len(path.characteristics) > 3:
        raise ImpactPathError(f"impact path longer than 3: {path.render()}")
    if path.model is QualityModel.SHARED:
        raise ModelMismatchError("impact path model must be AI or AIP")

    resolved = []
    for name in path.characteristics:
        char = tax.get(name)
        if char is None:
            raise UnknownCharacteristicError(name)
        resolved.append(char)

    for char in resolved:
        if char.model not in (path.model, QualityModel.SHARED):
            raise ModelMismatchError(
                f"{char.name} belongs to {char.model}, not usable in an "
                f"{path.model} path"
            )

    start = resolved[0].layer
    if path.model is QualityModel.AI and start != 1:
        raise LayerMismatchError(f"layer-{start} name in position 1: {resolved[0].name}")
    for i, char in enumerate(resolved):
        expected = start + i
        if char.layer != expected:
            raise LayerMismatchError(
                f"layer-{char.layer} name in position {i + 1}: {char.name}"
            )


_REQUIRED_CHARACTERISTICS = (
    "Maintainability",
    "Reliability",
    "Security",
    "Integrity",
    "Accuracy",
    "Trustworthiness",
    "Robustness",
    "Effectiveness",
    "Explainability",
    "Completeness",
)


def parse_taxonomy(text: str, require_defaults: bool = False) -> Taxonomy:
    """Parse taxonomy file content.

    Grammar (one record per line):
        version <text>            optional, at most once
        <name> <model> <layer>    model in {AI, AIP, Shared}, layer in {1,2,3}
    '#' starts a comment (whole line or trailing); blank lines are skipped.
    """
    characteristics: dict[str, QualityCharacteristic] = {}
    version = "unversioned"
    saw_version = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0].lower() == "version":
            if len(fields) != 2 or saw_version:
                raise TaxonomyParseError("bad version directive", lineno)
            version = fields[1]
            saw_version = True
            continue
        if len(fields) != 3:
            raise TaxonomyParseError(
                f"expected 'name model layer', got {len(fields)} fields", lineno
            )
        name, model_text, layer_text = fields
        if not _NAME_RE.match(name):
            raise TaxonomyParseError(f"bad characteristic name {name!r}", lineno)
        try:
            model = QualityModel.parse(model_text)
        except ValueError as exc:
            raise TaxonomyParseError(str(exc), lineno) from exc
        if layer_text not in ("1", "2", "3"):
            raise BadLayerError(name, layer_text, lineno)
        if name in characteristics:
            raise DuplicateCharacteristicError(name, lineno)
        characteristics[name] = QualityCharacteristic(name, model, int(layer_text))

    if not characteristics:
        raise TaxonomyParseError("taxonomy file defines no characteristics")

    if require_defaults:
        missing = [n for n in _REQUIRED_CHARACTERISTICS if n not in characteristics]
        if missing:
            raise TaxonomyParseError(f"missing required characteristics: {missing}")

    return Taxonomy(characteristics=characteristics, version=version)


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Load and validate a taxonomy file. Raises FileNotFoundError or a
    TaxonomyError subclass on bad input."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"taxonomy file not found: {p}")
    return parse_taxonomy(p.read_text(encoding="utf-8"))


def render_taxonomy(tax: Taxonomy) -> str:
    """Render a taxonomy back to its file format (deterministic order)."""
    lines = [f"version {tax.version}"]
    for char in sorted(tax.characteristics.values(), key=lambda c: (c.layer, c.name)):
        lines.append(f"{char.name} {char.model.value} {char.layer}")
    return "\n".join(lines) + "\n"


def default_taxonomy_path() -> Path:
    """Path of the bundled default taxonomy file."""
    return Path(__file__).parent / "data" / "taxonomy-default.txt"


def load_default_taxonomy() -> Taxonomy:
    return load_taxonomy(default_taxonomy_path())
