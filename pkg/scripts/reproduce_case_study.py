#!/usr/bin/env python3
"""Rerun the bundled 42-defect case study and print every analysis table.

Loads the packaged Keras/GitHub fixture, classifies it with the default
rules and severity contexts, then prints the AI-attribute and severity
distributions, the two-way table with its independence test, and the
impact-path frequency table.

Run from the repo root:  python3 scripts/reproduce_case_study.py
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from aiodc.analyze import (  # noqa: E402
    chi_square_independence,
    impact_frequencies,
    one_way,
    two_way,
)
from aiodc.classify import (  # noqa: E402
    classify_dataset,
    default_contexts_path,
    default_rules_path,
    load_contexts,
    load_rules,
)
from aiodc.ingest import keras_github_dataset_path, load_defects  # noqa: E402
from aiodc.report import (  # noqa: E402
    render_contingency,
    render_distribution,
    render_impact_frequencies,
)
from aiodc.taxonomy import load_default_taxonomy  # noqa: E402


def main() -> None:
    started = time.perf_counter()
    taxonomy = load_default_taxonomy()
    rules = load_rules(default_rules_path(), taxonomy)
    records = load_defects(keras_github_dataset_path()).records
    contexts = load_contexts(default_contexts_path())
    labels = classify_dataset(records, rules, contexts)
    elapsed = time.perf_counter() - started

    print(f"classified {len(labels)} defects in {elapsed * 1000:.1f} ms\n")

    print("== AI attribute ==")
    print(render_distribution(one_way(labels, "ai")))
    print("\n== Severity ==")
    print(render_distribution(one_way(labels, "severity")))

    table = two_way(labels, "ai", "severity")
    print("\n== AI attribute x severity ==")
    print(render_contingency(table))
    test = chi_square_independence(table)
    print(
        f"\nchi-square = {test.statistic:.3f}, dof = {test.dof}, "
        f"p = {test.p_value:.3e}"
        + ("  (low expected counts, interpret with care)" if test.warning else "")
    )

    print("\n== Impact frequencies ==")
    print(render_impact_frequencies(impact_frequencies(labels)))


if __name__ == "__main__":
    main()
