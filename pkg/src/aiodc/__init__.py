"""Defect classification workbench for AI systems.

Pipeline: ingest raw defect reports into canonical records, classify
them (AI attribute, severity from context, impact paths), optionally
run a two-annotator labeling session with dispute resolution, then
analyze and report distributions, agreement and associations.
"""

from .analyze import (
    AnalysisError,
    ContingencyTable,
    DegenerateTable,
    Distribution,
    EmptyInput,
    IndependenceTest,
    chi_square_independence,
    impact_frequencies,
    one_way,
    two_way,
)
from .annotate import (
    AgreementResult,
    AnnotationError,
    AnnotationSession,
    CompareAttribute,
    DefectStatus,
    cohen_kappa,
    consolidate,
    list_disputes,
    open_session,
    resolve_dispute,
    submit_label,
)
from .classify import (
    ClassificationLabel,
    Criticality,
    Provenance,
    Reversibility,
    RuleSet,
    Scope,
    SeverityContext,
    SeverityMatrix,
    assign_severity,
    classify_ai_attribute,
    classify_dataset,
    load_labels,
    load_rules,
    map_impact,
    write_labels,
)
from .ingest import (
    DefectRecord,
    IngestError,
    LoadResult,
    Platform,
    dedupe_by_issue_id,
    filter_defects,
    load_defects,
    write_canonical,
)
from .report import ReportBundle, export_analysis_bundle
from .taxonomy import (
    AIAttribute,
    ImpactPath,
    QualityCharacteristic,
    QualityModel,
    Severity,
    Taxonomy,
    TaxonomyError,
    load_default_taxonomy,
    load_taxonomy,
    validate_impact_path,
)

__version__ = "0.1.0"

__all__ = [
    "AIAttribute",
    "AgreementResult",
    "AnalysisError",
    "AnnotationError",
    "AnnotationSession",
    "ClassificationLabel",
    "CompareAttribute",
    "ContingencyTable",
    "Criticality",
    "DefectRecord",
    "DefectStatus",
    "DegenerateTable",
    "Distribution",
    "EmptyInput",
    "ImpactPath",
    "IndependenceTest",
    "IngestError",
    "LoadResult",
    "Platform",
    "Provenance",
    "QualityCharacteristic",
    "QualityModel",
    "ReportBundle",
    "Reversibility",
    "RuleSet",
    "Scope",
    "Severity",
    "SeverityContext",
    "SeverityMatrix",
    "Taxonomy",
    "TaxonomyError",
    "assign_severity",
    "chi_square_independence",
    "classify_ai_attribute",
    "classify_dataset",
    "cohen_kappa",
    "consolidate",
    "dedupe_by_issue_id",
    "export_analysis_bundle",
    "filter_defects",
    "impact_frequencies",
    "list_disputes",
    "load_default_taxonomy",
    "load_defects",
    "load_labels",
    "load_rules",
    "load_taxonomy",
    "map_impact",
    "one_way",
    "open_session",
    "resolve_dispute",
    "submit_label",
    "two_way",
    "validate_impact_path",
    "write_canonical",
    "write_labels",
]
