"""Command-line entry points.

Subcommands mirror the pipeline: ingest normalizes raw defect data,
classify applies the rule file, annotate drives a file-backed labeling
session, report writes the analysis bundle, serve starts the HTTP
service. Everything the service can do is reachable headless from
here; the session state for `annotate` is a plain JSONL event log.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import annotate as ann
from .analyze import AnalysisError, impact_frequencies, one_way, two_way
from .annotate import CompareAttribute
from .classify import (
    ClassificationLabel,
    Provenance,
    RuleError,
    classify_dataset,
    default_rules_path,
    load_contexts,
    load_labels,
    load_rules,
    render_labels,
)
from .ingest import (
    IngestError,
    dedupe_by_issue_id,
    filter_defects,
    load_defects,
    render_canonical,
)
from .report import (
    ReportError,
    export_analysis_bundle,
    render_contingency,
    render_distribution,
    render_impact_frequencies,
)
from .taxonomy import (
    AIAttribute,
    ImpactPath,
    Severity,
    TaxonomyError,
    default_taxonomy_path,
    load_taxonomy,
)

_ERRORS = (
    IngestError,
    RuleError,
    TaxonomyError,
    AnalysisError,
    ReportError,
    ann.AnnotationError,
    FileNotFoundError,
    ValueError,
)


def _out_text(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- ingest ----------------------------------------------------------------


def _cmd_ingest(args: argparse.Namespace) -> int:
    result = load_defects(
        args.path,
        args.format,
        label_map=args.label_map,
        framework=args.framework or "unknown",
    )
    records = result.records
    if args.platform or args.filter_framework:
        records = filter_defects(
            records, platform=args.platform, framework=args.filter_framework
        )
    dropped = []
    if args.dedupe:
        records, dropped = dedupe_by_issue_id(records)
    _out_text(render_canonical(records), args.out)
    print(
        f"loaded {len(result.records)} records"
        f" ({len(result.rejects)} rejected, "
        f"{len(result.unlabeled_ids)} unlabeled); "
        f"kept {len(records)}"
        + (f", deduped {len(dropped)}" if args.dedupe else ""),
        file=sys.stderr,
    )
    for row, reason in result.rejects:
        print(f"  reject row {row}: {reason}", file=sys.stderr)
    return 0


# --- classify ---------------------------------------------------------------


def _cmd_classify(args: argparse.Namespace) -> int:
    tax = load_taxonomy(args.taxonomy)
    rules = load_rules(args.rules, tax)
    contexts = load_contexts(args.contexts) if args.contexts else {}
    result = load_defects(args.input, args.format)
    labels = classify_dataset(result.records, rules, contexts)
    _out_text(render_labels(labels), args.out)
    by_attr: dict[str, int] = {}
    for label in labels:
        by_attr[label.ai.value] = by_attr.get(label.ai.value, 0) + 1
    summary = ", ".join(f"{k}={v}" for k, v in sorted(by_attr.items()))
    print(f"classified {len(labels)} records: {summary}", file=sys.stderr)
    return 0


# --- annotate ---------------------------------------------------------------


def _session_path(args) -> Path:
    return Path(args.session)


def _cmd_annotate_open(args: argparse.Namespace) -> int:
    path = _session_path(args)
    if path.exists():
        print(f"refusing to overwrite existing session {path}", file=sys.stderr)
        return 1
    defect_ids = [r.id for r in load_defects(args.defects, args.format).records]
    annotators = [a.strip() for a in args.annotators.split(",") if a.strip()]
    session = ann.open_session(args.project, defect_ids, annotators)
    ann.append_event(
        path, ann.open_event(session.project, session.defects, session.annotators)
    )
    print(
        f"opened session {path} with {len(session.defects)} defects, "
        f"annotators {', '.join(session.annotators)}",
        file=sys.stderr,
    )
    return 0


def _cmd_annotate_import(args: argparse.Namespace) -> int:
    path = _session_path(args)
    session = ann.load_session(path)
    labels = load_labels(args.labels)
    applied = 0
    for label in labels:
        annotator = args.annotator or label.annotator
        if not annotator:
            print(
                f"label for {label.defect_id} has no annotator and no "
                "--annotator was given",
                file=sys.stderr,
            )
            return 1
        ann.submit_label(session, annotator, label)
        ann.append_event(
            path,
            ann.label_event(
                annotator, session.labels[(label.defect_id, annotator)]
            ),
        )
        applied += 1
    statuses = session.statuses()
    disputed = sum(1 for s in statuses.values() if s is ann.DefectStatus.DISPUTED)
    print(
        f"imported {applied} labels; {disputed} defects disputed",
        file=sys.stderr,
    )
    return 0


def _cmd_annotate_disputes(args: argparse.Namespace) -> int:
    session = ann.load_session(_session_path(args))
    attr = CompareAttribute.parse(args.attribute)
    disputes = ann.list_disputes(session, attr)
    for defect_id, a, b in disputes:
        print(f"{defect_id}")
        for label in (a, b):
            sev = str(label.severity) if label.severity else "-"
            print(f"  {label.annotator}: ai={label.ai.value} severity={sev}")
        diff = ann.impact_difference(a, b)
        if diff:
            print(f"  impact difference: {'; '.join(diff)}")
    print(f"{len(disputes)} disputes on {attr.value}", file=sys.stderr)
    return 0


def _cmd_annotate_kappa(args: argparse.Namespace) -> int:
    session = ann.load_session(_session_path(args))
    attr = CompareAttribute.parse(args.attribute)
    result = ann.cohen_kappa(session, attr)
    print(
        f"attribute={result.attribute.value} n={result.n} "
        f"p_o={result.p_o:.4f} p_e={result.p_e:.4f} kappa={result.kappa:.4f}"
    )
    return 0


def _cmd_annotate_resolve(args: argparse.Namespace) -> int:
    path = _session_path(args)
    session = ann.load_session(path)
    impacts = tuple(
        ImpactPath.parse(part.strip())
        for part in (args.impacts or "").split(";")
        if part.strip()
    )
    final = ClassificationLabel(
        defect_id=args.defect,
        ai=AIAttribute.parse(args.ai),
        severity=Severity.parse(args.severity) if args.severity else None,
        impacts=impacts,
        provenance=Provenance.RESOLVED,
        annotator=args.resolver,
        rationale=args.rationale,
    )
    ann.resolve_dispute(session, args.defect, args.resolver, final)
    ann.append_event(
        path, ann.resolve_event(args.resolver, session.resolutions[args.defect])
    )
    print(f"resolved {args.defect} as ai={final.ai.value}", file=sys.stderr)
    return 0


def _cmd_annotate_consolidate(args: argparse.Namespace) -> int:
    session = ann.load_session(_session_path(args))
    labels = ann.consolidate(session)
    _out_text(render_labels(labels), args.out)
    print(f"consolidated {len(labels)} labels", file=sys.stderr)
    return 0


# --- report -----------------------------------------------------------------


def _cmd_report(args: argparse.Namespace) -> int:
    labels = load_labels(args.labels)
    tax = load_taxonomy(args.taxonomy)
    rules = load_rules(args.rules, tax)
    agreements = []
    if args.session:
        session = ann.load_session(args.session)
        for attr in CompareAttribute:
            try:
                agreements.append(ann.cohen_kappa(session, attr))
            except ann.AnnotationError:
                pass
    bundle = export_analysis_bundle(
        labels,
        rules,
        tax,
        args.out,
        dataset_id=args.dataset_id,
        agreements=agreements,
    )
    if labels:
        print(render_distribution(one_way(labels, "ai"), args.format), end="")
        print(render_distribution(one_way(labels, "severity"), args.format), end="")
        print(render_contingency(two_way(labels), args.format), end="")
        print(
            render_impact_frequencies(impact_frequencies(labels), args.format),
            end="",
        )
    print(
        f"wrote {len(bundle.artifacts)} artifacts to {args.out}", file=sys.stderr
    )
    return 0


# --- serve ------------------------------------------------------------------


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import BindFailure, ServerConfig, serve

    if args.config:
        config = ServerConfig.from_file(args.config)
    else:
        kwargs = {}
        if args.host:
            kwargs["host"] = args.host
        if args.port is not None:
            kwargs["port"] = args.port
        if args.persistence:
            kwargs["persistence_path"] = Path(args.persistence)
        if args.dataset:
            kwargs["dataset_path"] = Path(args.dataset)
        config = ServerConfig(**kwargs)
    try:
        print(
            f"serving on http://{config.host}:{config.port} "
            f"(persistence: {config.persistence})",
            file=sys.stderr,
        )
        serve(config)
    except BindFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aiodc",
        description="Defect classification workbench for AI systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a defect dataset")
    p.add_argument("path")
    p.add_argument(
        "--format",
        default="canonical",
        choices=("canonical", "csv", "github_export"),
    )
    p.add_argument("--platform", default=None, help="keep only this platform")
    p.add_argument(
        "--filter-framework",
        default=None,
        help="keep only this framework (case-insensitive)",
    )
    p.add_argument(
        "--framework",
        default=None,
        help="framework tag for github_export records",
    )
    p.add_argument("--label-map", default=None, help="JSON label->defect-type map")
    p.add_argument("--dedupe", action="store_true", help="collapse cross-refs")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("classify", help="apply classification rules")
    p.add_argument("--in", dest="input", required=True, help="canonical dataset")
    p.add_argument("--format", default="canonical", choices=("canonical", "csv"))
    p.add_argument("--rules", default=str(default_rules_path()))
    p.add_argument("--taxonomy", default=str(default_taxonomy_path()))
    p.add_argument("--contexts", default=None, help="severity context file")
    p.add_argument("--out", default=None, help="label file (default stdout)")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("annotate", help="file-backed labeling session")
    asub = p.add_subparsers(dest="subcommand", required=True)

    pa = asub.add_parser("open", help="start a session log")
    pa.add_argument("--session", required=True, help="session log file")
    pa.add_argument("--project", required=True)
    pa.add_argument("--defects", required=True, help="canonical dataset file")
    pa.add_argument("--format", default="canonical", choices=("canonical", "csv"))
    pa.add_argument(
        "--annotators", required=True, help="comma-separated annotator ids"
    )
    pa.set_defaults(func=_cmd_annotate_open)

    pa = asub.add_parser("import", help="submit labels from a label file")
    pa.add_argument("--session", required=True)
    pa.add_argument("--labels", required=True)
    pa.add_argument(
        "--annotator", default=None, help="override the per-line annotator"
    )
    pa.set_defaults(func=_cmd_annotate_import)

    pa = asub.add_parser("disputes", help="list disagreements")
    pa.add_argument("--session", required=True)
    pa.add_argument(
        "--attribute", default="combined", choices=("ai", "severity", "combined")
    )
    pa.set_defaults(func=_cmd_annotate_disputes)

    pa = asub.add_parser("kappa", help="inter-rater agreement")
    pa.add_argument("--session", required=True)
    pa.add_argument(
        "--attribute", default="ai", choices=("ai", "severity", "combined")
    )
    pa.set_defaults(func=_cmd_annotate_kappa)

    pa = asub.add_parser("resolve", help="record a third-expert resolution")
    pa.add_argument("--session", required=True)
    pa.add_argument("--defect", required=True)
    pa.add_argument("--resolver", required=True)
    pa.add_argument("--ai", required=True, help="final AI attribute")
    pa.add_argument("--severity", default=None)
    pa.add_argument(
        "--impacts", default=None, help="semicolon-separated impact paths"
    )
    pa.add_argument("--rationale", default=None)
    pa.set_defaults(func=_cmd_annotate_resolve)

    pa = asub.add_parser("consolidate", help="emit final labels")
    pa.add_argument("--session", required=True)
    pa.add_argument("--out", default=None, help="label file (default stdout)")
    pa.set_defaults(func=_cmd_annotate_consolidate)

    p = sub.add_parser("report", help="write the analysis bundle")
    p.add_argument("--labels", required=True, help="label file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--format", default="text", choices=("text", "csv", "structured")
    )
    p.add_argument("--rules", default=str(default_rules_path()))
    p.add_argument("--taxonomy", default=str(default_taxonomy_path()))
    p.add_argument("--dataset-id", default="unspecified")
    p.add_argument(
        "--session", default=None, help="session log for agreement artifacts"
    )
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--persistence", default=None)
    p.add_argument("--dataset", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
