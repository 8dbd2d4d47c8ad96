"""Rendering of analysis results: aligned text, CSV, and a structured
JSON form that is lossless and machine-readable.

The *_obj helpers build the plain-dict shape shared by the structured
format and the wire API, so files on disk and service responses never
drift apart. Bundle export writes every artifact a downstream consumer
needs (one-way tables, the two-way matrix with marginals, heatmap-ready
cells, impact frequencies, agreement) into one directory. Bytes are
stable across runs on identical inputs; the only moving part is the
timestamp inside metadata.json.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .analyze import (
    ContingencyTable,
    Distribution,
    category_order,
    impact_frequencies,
    one_way,
    two_way,
)
from .annotate import AgreementResult
from .classify import ClassificationLabel, RuleSet
from .taxonomy import QualityModel, Taxonomy


class ReportError(Exception):
    pass


class UnsupportedFormat(ReportError):
    def __init__(self, fmt: str):
        super().__init__(f"unsupported format {fmt!r}; use text, csv or structured")


class IoError(ReportError):
    pass


FORMATS = ("text", "csv", "structured")


def _check_format(fmt: str) -> str:
    key = fmt.strip().lower()
    if key not in FORMATS:
        raise UnsupportedFormat(fmt)
    return key


def _json_line(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": ")) + "\n"


def _aligned(rows: Sequence[Sequence[str]]) -> str:
    """First column left-justified, the rest right-justified."""
    if not rows:
        return ""
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _csv_text(rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _pct(value: float) -> str:
    return f"{value:.2f}%"


def distribution_obj(d: Distribution) -> dict:
    return {
        "attribute": d.attribute,
        "rows": [
            {"category": c, "count": n, "percent": p} for c, n, p in d.rows
        ],
        "total": d.total,
        "excluded": d.excluded,
    }


def contingency_obj(t: ContingencyTable) -> dict:
    return {
        "row_attribute": t.row_attribute,
        "col_attribute": t.col_attribute,
        "row_categories": list(t.row_categories),
        "col_categories": list(t.col_categories),
        "counts": [list(row) for row in t.counts],
        "row_marginals": list(t.row_marginals),
        "col_marginals": list(t.col_marginals),
        "total": t.total,
        "excluded": t.excluded,
    }


def impacts_obj(freqs: Sequence[tuple[QualityModel, str, int]]) -> list[dict]:
    return [
        {"model": m.value, "characteristic": c, "count": n} for m, c, n in freqs
    ]


def agreement_obj(r: AgreementResult) -> dict:
    return {
        "attribute": r.attribute.value,
        "p_o": r.p_o,
        "p_e": r.p_e,
        "kappa": r.kappa,
        "n": r.n,
    }


def render_distribution(d: Distribution, format: str = "text") -> str:
    fmt = _check_format(format)
    if fmt == "structured":
        return _json_line(distribution_obj(d))
    rows = [("category", "count", "percent")]
    rows += [(c, str(n), _pct(p)) for c, n, p in d.rows]
    if fmt == "csv":
        return _csv_text(rows)
    rows.append(("total", str(d.total), _pct(100.0 if d.total else 0.0)))
    out = _aligned(rows)
    if d.excluded:
        out += f"excluded: {d.excluded}\n"
    if d.total == 0:
        out += "no data\n"
    return out


def _is_reducible(t: ContingencyTable) -> bool:
    live_rows = sum(1 for m in t.row_marginals if m > 0)
    live_cols = sum(1 for m in t.col_marginals if m > 0)
    return live_rows < 2 or live_cols < 2


def render_contingency(t: ContingencyTable, format: str = "text") -> str:
    fmt = _check_format(format)
    if fmt == "structured":
        return _json_line(contingency_obj(t))
    corner = f"{t.row_attribute}\\{t.col_attribute}"
    header = (corner, *t.col_categories, "total")
    body = [
        (cat, *map(str, row), str(marg))
        for cat, row, marg in zip(t.row_categories, t.counts, t.row_marginals)
    ]
    footer = ("total", *map(str, t.col_marginals), str(t.total))
    if fmt == "csv":
        return _csv_text([header, *body, footer])
    out = _aligned([tuple(header), *body, footer])
    if t.excluded:
        out += f"excluded: {t.excluded}\n"
    if _is_reducible(t):
        out += "note: fewer than 2 non-empty rows/columns; independence test degenerate\n"
    return out


def render_impact_frequencies(
    freqs: Sequence[tuple[QualityModel, str, int]], format: str = "text"
) -> str:
    fmt = _check_format(format)
    if fmt == "structured":
        return _json_line(impacts_obj(freqs))
    rows = [("model", "characteristic", "count")]
    rows += [(m.value, c, str(n)) for m, c, n in freqs]
    if fmt == "csv":
        return _csv_text(rows)
    # text reads better characteristic-first
    text_rows = [("characteristic", "model", "count")]
    text_rows += [(c, m.value, str(n)) for m, c, n in freqs]
    return _aligned(text_rows)


def render_agreement(
    results: Sequence[AgreementResult], format: str = "structured"
) -> str:
    fmt = _check_format(format)
    objs = [agreement_obj(r) for r in results]
    if fmt == "structured":
        return _json_line(objs)
    rows = [("attribute", "n", "p_o", "p_e", "kappa")]
    rows += [
        (
            o["attribute"],
            str(o["n"]),
            f"{o['p_o']:.4f}",
            f"{o['p_e']:.4f}",
            f"{o['kappa']:.4f}",
        )
        for o in objs
    ]
    if fmt == "csv":
        return _csv_text(rows)
    return _aligned(rows)


def render_heatmap_csv(t: ContingencyTable) -> str:
    """Integer cell matrix: rows are the row attribute's categories,
    columns the column attribute's. Plotting-tool food."""
    rows = [("", *t.col_categories)]
    rows += [(cat, *map(str, row)) for cat, row in zip(t.row_categories, t.counts)]
    return _csv_text(rows)


def empty_distribution(attribute: str) -> Distribution:
    """All categories, zero counts. What dashboards show before data."""
    return Distribution(
        attribute=attribute,
        rows=tuple((c, 0, 0.0) for c in category_order(attribute)),
        total=0,
        excluded=0,
    )


def empty_contingency(row_attr: str = "ai", col_attr: str = "severity") -> ContingencyTable:
    row_cats = category_order(row_attr)
    col_cats = category_order(col_attr)
    zeros = tuple(tuple(0 for _ in col_cats) for _ in row_cats)
    return ContingencyTable(
        row_attribute=row_attr,
        col_attribute=col_attr,
        row_categories=row_cats,
        col_categories=col_cats,
        counts=zeros,
        row_marginals=tuple(0 for _ in row_cats),
        col_marginals=tuple(0 for _ in col_cats),
        total=0,
        excluded=0,
    )


@dataclass(frozen=True)
class ReportBundle:
    metadata: Mapping
    artifacts: Mapping[str, Path]


def export_analysis_bundle(
    labels: Sequence[ClassificationLabel],
    rules: RuleSet,
    taxonomy: Taxonomy,
    out_dir: str | Path,
    *,
    dataset_id: str = "unspecified",
    agreements: Sequence[AgreementResult] = (),
) -> ReportBundle:
    """Write the full artifact set into out_dir and describe it.

    Re-running on identical inputs reproduces identical bytes in every
    file except the timestamp line in metadata.json.
    """
    out = Path(out_dir)
    if labels:
        dist_ai = one_way(labels, "ai")
        dist_sev = one_way(labels, "severity")
        table = two_way(labels, "ai", "severity")
        freqs = impact_frequencies(labels)
    else:
        dist_ai = empty_distribution("ai")
        dist_sev = empty_distribution("severity")
        table = empty_contingency()
        freqs = []

    artifacts: dict[str, Path] = {}

    def emit(name: str, content: str) -> None:
        path = out / name
        try:
            path.write_text(content, encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        artifacts[name] = path

    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc

    for fmt, ext in (("text", "txt"), ("csv", "csv"), ("structured", "json")):
        emit(f"one-way-ai.{ext}", render_distribution(dist_ai, fmt))
        emit(f"one-way-severity.{ext}", render_distribution(dist_sev, fmt))
        emit(f"two-way-ai-severity.{ext}", render_contingency(table, fmt))
        emit(f"impact-frequencies.{ext}", render_impact_frequencies(freqs, fmt))
    emit("heatmap.csv", render_heatmap_csv(table))
    emit("agreement.json", render_agreement(agreements, "structured"))

    metadata = {
        "dataset": dataset_id,
        "rules_version": rules.version,
        "taxonomy_version": taxonomy.version,
        "label_count": len(labels),
        "empty": not labels,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    emit("metadata.json", _json_line(metadata))
    return ReportBundle(metadata=metadata, artifacts=artifacts)
