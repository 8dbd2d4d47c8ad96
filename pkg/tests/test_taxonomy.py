from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aiodc.taxonomy import (
    AIAttribute,
    BadLayerError,
    DuplicateCharacteristicError,
    EmptyPathError,
    ImpactPath,
    ImpactPathError,
    LayerMismatchError,
    ModelMismatchError,
    QualityCharacteristic,
    QualityModel,
    Severity,
    Taxonomy,
    TaxonomyParseError,
    UnknownCharacteristicError,
    load_default_taxonomy,
    load_taxonomy,
    parse_taxonomy,
    render_taxonomy,
    severity_rank,
    validate_impact_path,
)


class TestAIAttribute:
    def test_parse_exact(self):
        assert AIAttribute.parse("Data") is AIAttribute.DATA
        assert AIAttribute.parse("Learning") is AIAttribute.LEARNING
        assert AIAttribute.parse("Thinking") is AIAttribute.THINKING
        assert AIAttribute.parse("NotRelated") is AIAttribute.NOT_RELATED

    def test_parse_is_forgiving_about_case_and_separators(self):
        assert AIAttribute.parse("not related") is AIAttribute.NOT_RELATED
        assert AIAttribute.parse("NOT_RELATED") is AIAttribute.NOT_RELATED
        assert AIAttribute.parse(" learning ") is AIAttribute.LEARNING

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            AIAttribute.parse("Quantum")

    def test_descriptions_exist_for_real_categories(self):
        for attr in AIAttribute:
            if attr is AIAttribute.UNCLASSIFIED:
                continue
            assert attr.description


class TestSeverity:
    def test_rank_order(self):
        assert severity_rank(Severity.LOW) == 1
        assert severity_rank(Severity.CATASTROPHIC) == 5
        assert Severity.LOW < Severity.MEDIUM < Severity.HIGH
        assert Severity.HIGH < Severity.CRITICAL < Severity.CATASTROPHIC

    def test_parse_and_str_round_trip(self):
        for s in Severity:
            assert Severity.parse(str(s)) is s

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            Severity.parse("Fatal")


class TestTaxonomyFile:
    def test_default_taxonomy_has_every_required_characteristic(self, taxonomy):
        names = set(taxonomy.characteristics)
        assert {
            "Trustworthiness",
            "Explainability",
            "Security",
            "Effectiveness",
            "Maintainability",
            "Reliability",
            "Accuracy",
            "Robustness",
            "Completeness",
            "Integrity",
        } <= names

    def test_render_parse_round_trip(self, taxonomy):
        assert parse_taxonomy(render_taxonomy(taxonomy)) == taxonomy

    def test_parse_reports_line_numbers(self):
        with pytest.raises(TaxonomyParseError) as exc:
            parse_taxonomy("version 1.0\nAccuracy Shared\n")
        assert exc.value.line == 2

    def test_duplicate_characteristic_rejected(self):
        text = "Accuracy Shared 2\nAccuracy AI 1\n"
        with pytest.raises(DuplicateCharacteristicError):
            parse_taxonomy(text)

    def test_bad_layer_rejected(self):
        with pytest.raises(BadLayerError):
            parse_taxonomy("Accuracy Shared 4\n")
        with pytest.raises(BadLayerError):
            parse_taxonomy("Accuracy Shared 0\n")

    def test_empty_file_rejected(self):
        with pytest.raises(TaxonomyParseError):
            parse_taxonomy("")

    def test_comments_and_blank_lines_ignored(self):
        tax = parse_taxonomy(
            "# comment\n\nversion 2.1\nTrustworthiness AI 1  # trailing\n"
        )
        assert tax.version == "2.1"
        assert tax.get("Trustworthiness").layer == 1

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_taxonomy(tmp_path / "nope.txt")

    @given(
        st.dictionaries(
            st.text(
                alphabet=st.sampled_from("ABCDEFGHabcdefgh"), min_size=1, max_size=8
            ),
            st.tuples(st.sampled_from(list(QualityModel)), st.integers(1, 3)),
            min_size=1,
            max_size=12,
        ),
        st.text(alphabet=st.sampled_from("0123456789."), min_size=1, max_size=6),
    )
    def test_round_trip_over_generated_taxonomies(self, chars, version):
        tax = Taxonomy(
            characteristics={
                name: QualityCharacteristic(name=name, model=model, layer=layer)
                for name, (model, layer) in chars.items()
            },
            version=version,
        )
        assert parse_taxonomy(render_taxonomy(tax)) == tax


class TestImpactPath:
    def test_render(self):
        path = ImpactPath(QualityModel.AI, ("Trustworthiness", "Accuracy"))
        assert path.render() == "AI:Trustworthiness/Accuracy"

    def test_parse_round_trip(self):
        for text in ("AI:Trustworthiness/Accuracy", "AIP:Maintainability"):
            assert ImpactPath.parse(text).render() == text

    def test_parse_rejects_shared_model(self):
        with pytest.raises(ValueError):
            ImpactPath.parse("Shared:Accuracy")

    def test_parse_rejects_missing_chain(self):
        with pytest.raises(ValueError):
            ImpactPath.parse("AI:")
        with pytest.raises(ValueError):
            ImpactPath.parse("Trustworthiness")


class TestValidateImpactPath:
    def test_single_layer_ai_path(self, taxonomy):
        validate_impact_path(ImpactPath.parse("AI:Trustworthiness"), taxonomy)

    def test_two_layer_ai_path(self, taxonomy):
        validate_impact_path(
            ImpactPath.parse("AI:Trustworthiness/Accuracy"), taxonomy
        )

    def test_platform_path_may_start_on_a_shared_deep_name(self, taxonomy):
        validate_impact_path(ImpactPath.parse("AIP:Accuracy"), taxonomy)

    def test_reversed_chain_is_a_layer_mismatch(self, taxonomy):
        with pytest.raises(LayerMismatchError) as exc:
            validate_impact_path(
                ImpactPath.parse("AI:Accuracy/Trustworthiness"), taxonomy
            )
        assert "layer-2 name in position 1: Accuracy" in str(exc.value)

    def test_unknown_characteristic(self, taxonomy):
        with pytest.raises(UnknownCharacteristicError):
            validate_impact_path(ImpactPath.parse("AI:Sentience"), taxonomy)

    def test_empty_path(self, taxonomy):
        with pytest.raises(EmptyPathError):
            validate_impact_path(ImpactPath(QualityModel.AI, ()), taxonomy)

    def test_too_long_path(self, taxonomy):
        path = ImpactPath(
            QualityModel.AI, ("Trustworthiness", "Accuracy", "Accuracy", "Accuracy")
        )
        with pytest.raises(ImpactPathError):
            validate_impact_path(path, taxonomy)

    def test_model_mismatch(self, taxonomy):
        # Maintainability is platform-only, no business inside an AI path
        with pytest.raises(ModelMismatchError):
            validate_impact_path(ImpactPath.parse("AI:Maintainability"), taxonomy)

    def test_skipping_a_layer_is_a_mismatch(self):
        tax = parse_taxonomy(
            "Top AI 1\nMid AI 2\nDeep AI 3\n"
        )
        validate_impact_path(ImpactPath.parse("AI:Top/Mid/Deep"), tax)
        with pytest.raises(LayerMismatchError):
            validate_impact_path(ImpactPath.parse("AI:Top/Deep"), tax)

    def test_every_bundled_rule_path_validates(self, taxonomy, rules):
        for _, paths in rules.impact_rules:
            for path in paths:
                validate_impact_path(path, taxonomy)


def test_default_taxonomy_loads_from_package_data():
    tax = load_default_taxonomy()
    assert len(tax) >= 10
    assert tax.version == "1.0"
