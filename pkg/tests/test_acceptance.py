"""Acceptance gate: one test per shipping criterion.

Run with -v for a one-line verdict per criterion. Expected values come
from tests/oracles.py, which must stay independent of the package.
"""

import dataclasses
import random
import time

import pytest

from aiodc.analyze import (
    chi_square_independence,
    impact_frequencies,
    one_way,
    two_way,
)
from aiodc.annotate import DegenerateMarginals, kappa_from_pairs
from aiodc.classify import (
    Criticality,
    Reversibility,
    Scope,
    SeverityContext,
    assign_severity,
    classify_dataset,
    default_contexts_path,
    default_rules_path,
    load_contexts,
    load_labels,
    load_rules,
    map_impact,
    parse_labels,
    render_labels,
    write_labels,
)
from aiodc.cli import main
from aiodc.ingest import (
    DefectRecord,
    Platform,
    dedupe_by_issue_id,
    keras_github_dataset_path,
    load_defects,
    render_canonical,
    benchmark_dataset_path,
)
from aiodc.taxonomy import AIAttribute, Severity, load_default_taxonomy

from .oracles import (
    CRITICALITIES,
    EXPECTED_AI_COUNTS,
    EXPECTED_AI_PERCENTS,
    EXPECTED_SEVERITY_COUNTS,
    EXPECTED_SEVERITY_PERCENTS,
    KERAS_IMPACTS,
    REVERSIBILITIES,
    SCOPES,
    expected_impact_frequencies,
    expected_impact_path_rows,
    expected_severity,
)

from .test_analyze import table


def _fixture_labels():
    taxonomy = load_default_taxonomy()
    rules = load_rules(default_rules_path(), taxonomy)
    records = load_defects(keras_github_dataset_path()).records
    contexts = load_contexts(default_contexts_path())
    return classify_dataset(records, rules, contexts)


def test_ai_attribute_table_reproduction_under_one_second():
    started = time.perf_counter()
    labels = _fixture_labels()
    distribution = one_way(labels, "ai")
    elapsed = time.perf_counter() - started

    assert distribution.total == 42
    assert distribution.excluded == 0
    for category, count in EXPECTED_AI_COUNTS.items():
        assert distribution.count(category) == count
        assert distribution.percent(category) == EXPECTED_AI_PERCENTS[category]
    assert elapsed < 1.0, f"pipeline took {elapsed:.3f}s"


def test_severity_table_reproduction():
    distribution = one_way(_fixture_labels(), "severity")
    assert distribution.total == 42
    for category, count in EXPECTED_SEVERITY_COUNTS.items():
        assert distribution.count(category) == count
        assert (
            distribution.percent(category) == EXPECTED_SEVERITY_PERCENTS[category]
        )


def test_impact_mapping_reproduction():
    taxonomy = load_default_taxonomy()
    rules = load_rules(default_rules_path(), taxonomy)
    produced = set()
    for description in KERAS_IMPACTS:
        record = DefectRecord(
            id="probe",
            platform=Platform.GITHUB,
            framework="keras",
            title=description,
            description=description,
            defect_type_label=description,
        )
        for path in map_impact(record, rules):
            produced.add((description, path.render()))
    assert produced == expected_impact_path_rows()
    assert len(produced) == 30

    frequencies = {
        (model.value, name): count
        for model, name, count in impact_frequencies(_fixture_labels())
    }
    assert frequencies == expected_impact_frequencies()


def test_severity_matrix_conformance():
    matrix = load_rules(default_rules_path(), load_default_taxonomy()).severity_matrix

    def severity(crit, rev, scope):
        return assign_severity(
            SeverityContext(
                Criticality.parse(crit),
                Reversibility.parse(rev),
                Scope.parse(scope),
            ),
            matrix,
        )

    assert severity("Enterprise", "Irreversible", "Systemic") is Severity.CATASTROPHIC
    assert severity("Enterprise", "Reversible", "Systemic") is Severity.CRITICAL
    for rev in REVERSIBILITIES:
        for scope in SCOPES:
            if rev == "Transient" or (rev == "Reversible" and scope == "Localized"):
                assert severity("Enterprise", rev, scope) <= Severity.HIGH

    for crit in CRITICALITIES:
        for rev in REVERSIBILITIES:
            for scope in SCOPES:
                assert str(severity(crit, rev, scope)) == expected_severity(
                    crit, rev, scope
                )

    crit_order = ("NonCritical", "Enterprise", "SafetyCritical")
    rev_order = ("Transient", "Reversible", "Irreversible")
    scope_order = ("Localized", "Systemic")
    for rev in rev_order:
        for scope in scope_order:
            ranks = [int(severity(c, rev, scope)) for c in crit_order]
            assert ranks == sorted(ranks)
    for crit in crit_order:
        for scope in scope_order:
            ranks = [int(severity(crit, r, scope)) for r in rev_order]
            assert ranks == sorted(ranks)
    for crit in crit_order:
        for rev in rev_order:
            ranks = [int(severity(crit, rev, s)) for s in scope_order]
            assert ranks == sorted(ranks)


def test_cohen_kappa_oracle():
    identical = [(c, c) for c in "DataLearnThink"]
    assert kappa_from_pairs(identical)[2] == 1.0

    hand = list(
        zip(
            ["Data", "Learning", "Learning", "Thinking"],
            ["Data", "Learning", "Thinking", "Thinking"],
        )
    )
    p_o, p_e, kappa = kappa_from_pairs(hand)
    assert p_o == pytest.approx(0.75, abs=1e-12)
    assert p_e == pytest.approx(0.3125, abs=1e-12)
    assert kappa == pytest.approx(0.6363636363636364, abs=1e-9)

    rng = random.Random(99)
    categories = ["Data", "Learning", "Thinking", "NotRelated"]
    independent = [
        (rng.choice(categories), rng.choice(categories)) for _ in range(10_000)
    ]
    assert abs(kappa_from_pairs(independent)[2]) < 0.05

    with pytest.raises(DegenerateMarginals):
        kappa_from_pairs([("x", "x")] * 5)


def test_chi_square_oracle():
    uniform = chi_square_independence(table([[10, 10], [10, 10]]))
    assert uniform.statistic == 0.0
    assert uniform.p_value == 1.0

    diagonal = chi_square_independence(table([[20, 0], [0, 20]]))
    assert diagonal.statistic == pytest.approx(40.0, abs=1e-12)
    assert diagonal.dof == 1
    assert diagonal.p_value < 1e-9

    rng = random.Random(7)
    counts = [[rng.randint(0, 25) for _ in range(5)] for _ in range(4)]
    counts[0][0] += 1
    base = chi_square_independence(table(counts))
    for _ in range(100):
        rows, cols = list(range(4)), list(range(5))
        rng.shuffle(rows)
        rng.shuffle(cols)
        shuffled = chi_square_independence(
            table([[counts[i][j] for j in cols] for i in rows])
        )
        assert shuffled.statistic == pytest.approx(base.statistic, rel=1e-9)
        assert shuffled.dof == base.dof
        assert shuffled.p_value == pytest.approx(base.p_value, rel=1e-9)


def test_two_way_marginal_consistency():
    rng = random.Random(314159)
    ai_choices = [a for a in AIAttribute if a is not AIAttribute.UNCLASSIFIED]
    severity_choices = list(Severity)
    template = _fixture_labels()[0]
    for _ in range(200):
        labels = [
            dataclasses.replace(
                template,
                defect_id=f"d{i}",
                ai=rng.choice(ai_choices),
                severity=rng.choice(severity_choices),
            )
            for i in range(rng.randint(1, 40))
        ]
        crosstab = two_way(labels)
        by_ai = one_way(labels, "ai")
        by_severity = one_way(labels, "severity")
        assert crosstab.row_marginals == tuple(
            by_ai.count(c) for c in crosstab.row_categories
        )
        assert crosstab.col_marginals == tuple(
            by_severity.count(c) for c in crosstab.col_categories
        )

    fixture = two_way(_fixture_labels())
    assert fixture.row_marginals == (2, 18, 14, 8)
    assert fixture.col_marginals == (9, 10, 12, 11, 0)


def test_determinism_and_round_trips(tmp_path):
    first = render_labels(_fixture_labels())
    second = render_labels(_fixture_labels())
    assert first == second

    dataset_text = benchmark_dataset_path().read_text(encoding="utf-8")
    records = load_defects(benchmark_dataset_path()).records
    assert render_canonical(records) == dataset_text

    labels_path = tmp_path / "labels.jsonl"
    write_labels(_fixture_labels(), labels_path)
    assert parse_labels(labels_path.read_text()) == list(_fixture_labels())
    assert render_labels(load_labels(labels_path)) == first

    once, dropped = dedupe_by_issue_id(records)
    twice, dropped_again = dedupe_by_issue_id(once)
    assert twice == once
    assert dropped and not dropped_again


def test_headless_annotation_end_to_end(tmp_path, capsys):
    session = tmp_path / "session.jsonl"
    ada_file = tmp_path / "ada.jsonl"
    bea_file = tmp_path / "bea.jsonl"
    final_file = tmp_path / "final.jsonl"

    base = _fixture_labels()
    write_labels(base, ada_file)
    flipped = dataclasses.replace(
        base[0],
        ai=AIAttribute.THINKING if base[0].ai is not AIAttribute.THINKING
        else AIAttribute.DATA,
    )
    write_labels([flipped, *base[1:]], bea_file)

    def cli(*argv):
        code = main(list(argv))
        return code, capsys.readouterr()

    code, _ = cli(
        "annotate", "open",
        "--session", str(session),
        "--project", "acceptance",
        "--defects", str(keras_github_dataset_path()),
        "--annotators", "ada,bea,cal",
    )
    assert code == 0

    for annotator, path in (("ada", ada_file), ("bea", bea_file)):
        code, _ = cli(
            "annotate", "import",
            "--session", str(session),
            "--labels", str(path),
            "--annotator", annotator,
        )
        assert code == 0

    code, captured = cli("annotate", "disputes", "--session", str(session))
    assert code == 0
    assert base[0].defect_id in captured.out

    code, _ = cli("annotate", "consolidate", "--session", str(session))
    assert code == 1  # the dispute blocks consolidation

    code, _ = cli(
        "annotate", "resolve",
        "--session", str(session),
        "--defect", base[0].defect_id,
        "--resolver", "cal",
        "--ai", base[0].ai.value,
        "--severity", str(base[0].severity),
        "--impacts", ";".join(p.render() for p in base[0].impacts),
    )
    assert code == 0

    code, _ = cli(
        "annotate", "consolidate",
        "--session", str(session),
        "--out", str(final_file),
    )
    assert code == 0

    consolidated = load_labels(final_file)
    assert len(consolidated) == 42
    distribution = one_way(consolidated, "ai")
    for category, count in EXPECTED_AI_COUNTS.items():
        assert distribution.count(category) == count
    crosstab = two_way(consolidated)
    assert crosstab.row_marginals == (2, 18, 14, 8)
    result = chi_square_independence(crosstab)
    assert result.dof == 9 and result.p_value < 1e-6
