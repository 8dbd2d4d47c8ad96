from __future__ import annotations

import pytest

from aiodc.classify import (
    classify_dataset,
    default_contexts_path,
    default_rules_path,
    load_contexts,
    load_rules,
)
from aiodc.ingest import (
    benchmark_dataset_path,
    keras_github_dataset_path,
    load_defects,
)
from aiodc.taxonomy import load_default_taxonomy


@pytest.fixture(scope="session")
def taxonomy():
    return load_default_taxonomy()


@pytest.fixture(scope="session")
def rules(taxonomy):
    return load_rules(default_rules_path(), taxonomy)


@pytest.fixture(scope="session")
def contexts():
    return load_contexts(default_contexts_path())


@pytest.fixture(scope="session")
def keras_records():
    return load_defects(keras_github_dataset_path()).records


@pytest.fixture(scope="session")
def benchmark_records():
    return load_defects(benchmark_dataset_path()).records


@pytest.fixture(scope="session")
def keras_labels(keras_records, rules, contexts):
    return classify_dataset(keras_records, rules, contexts)
