#!/usr/bin/env python3
"""Regenerate the bundled benchmark fixture.

The fixture reconstructs the published 100-bug ML benchmark's platform and
framework distribution (GitHub: 20 TensorFlow / 42 Keras; Stack Overflow:
3 TensorFlow / 35 Keras). Issue titles and descriptions are synthetic; the
42 Keras/GitHub defect-type labels follow the case-study counts. Severity
contexts for that subset are curated so the decision matrix reproduces the
published severity marginals (9/10/12/11/0) - the per-defect assignments
themselves are not authoritative, only their totals are.

Run from the repo root:  python scripts/build_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from aiodc.ingest import DefectRecord, Platform, render_canonical  # noqa: E402
from aiodc.taxonomy import ODCBaseAttributes, ODCDefectType  # noqa: E402

DATA_DIR = ROOT / "src" / "aiodc" / "data"

# (defect_type_label, count, odc type, severity context, issue titles)
# Context totals: 9x Irreversible/Systemic -> Catastrophic, 10x
# Reversible/Systemic -> Critical, 12x High (Transient/Systemic or
# Reversible/Localized), 11x Transient/Localized -> Medium, under
# Enterprise criticality throughout.
KERAS_GITHUB = [
    (
        "deprecated api",
        "Interface",
        ("Enterprise", "Transient", "Localized"),
        [
            "Conv layer keyword argument emits deprecation warning then crashes",
            "Sequential.predict_classes removed but still documented",
            "Old-style merge layer import fails on current release",
        ],
    ),
    (
        "missing api call",
        "Interface",
        ("Enterprise", "Transient", "Localized"),
        [
            "Custom metric never invoked because compile step omits it",
            "Callback hook not triggered without explicit registration call",
        ],
    ),
    (
        "missing argument scoping",
        "Checking",
        ("Enterprise", "Transient", "Localized"),
        [
            "Name-scope argument leaks variables across model instances",
        ],
    ),
    (
        "wrong api usage",
        "Interface",
        ("Enterprise", "Transient", "Localized"),
        [
            "evaluate() called with fit()-style arguments silently ignored",
            "Passing a generator where a dataset is expected yields wrong counts",
        ],
    ),
    (
        "missing dense layer",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Classifier head missing final dense projection, logits misshaped",
        ],
    ),
    (
        "suboptimal network structure",
        "Algorithm",
        None,  # mixed contexts, see SPECIAL_CONTEXTS
        [
            "Stacked recurrent blocks without residual connections underfit",
            "Encoder depth insufficient for sequence length in demo model",
            "Bottleneck width chosen too small for reconstruction task",
            "Pooling placement degrades feature maps in reference architecture",
        ],
    ),
    (
        "wrong size for convolutional layer",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Kernel size mismatch collapses spatial dimensions to zero",
        ],
    ),
    (
        "wrong layer type",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "BatchNorm used where LayerNorm required by recurrent stack",
            "Flatten layer used instead of global pooling breaks shape contract",
        ],
    ),
    (
        "wrong network architecture",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Skip connections wired to wrong block in example model",
            "Decoder mirrors encoder incorrectly, output resolution off by 2x",
            "Attention block placed after projection, degrading accuracy",
        ],
    ),
    (
        "wrong type of activation function",
        "Algorithm",
        ("Enterprise", "Reversible", "Localized"),
        [
            "Sigmoid on multi-class output head instead of softmax",
            "ReLU on final regression layer clips negative targets",
            "Tanh activation saturates deep stack during warmup",
        ],
    ),
    (
        "wrong tensor shape",
        "Assignment",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Target tensor shape mismatch makes training abort mid-epoch",
        ],
    ),
    (
        "missing pre processing step",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Inputs fed unscaled because normalization step dropped from pipeline",
        ],
    ),
    (
        "suboptimal batch size",
        "Assignment",
        ("Enterprise", "Transient", "Systemic"),
        [
            "Default batch size starves GPU and doubles epoch time",
            "Batch of 1 makes batch-norm statistics useless",
            "Oversized batch exhausts device memory on example script",
            "Tiny batch size makes validation loss oscillate wildly",
        ],
    ),
    (
        "suboptimal number of epochs",
        "Assignment",
        ("Enterprise", "Transient", "Systemic"),
        [
            "Tutorial stops at 3 epochs, model far from convergence",
            "Early-stopping patience of zero halts training immediately",
            "Epoch count hardcoded too high, overfits small dataset",
            "Scheduler restarts every epoch due to off-by-one in config",
        ],
    ),
    (
        "wrong loss function calculation",
        "Algorithm",
        ("Enterprise", "Reversible", "Systemic"),
        [
            "Masked loss averages over padded positions, skewing gradients",
        ],
    ),
    (
        "wrong optimization function",
        "Algorithm",
        ("Enterprise", "Irreversible", "Systemic"),
        [
            "Plain SGD used where adaptive optimizer required, training diverges",
            "Optimizer state reset each epoch wipes momentum",
            "Legacy optimizer alias points at wrong implementation",
            "Weight decay applied twice through optimizer and loss term",
        ],
    ),
    (
        "wrong selection of loss function",
        "Algorithm",
        ("Enterprise", "Irreversible", "Systemic"),
        [
            "Binary cross-entropy picked for multi-class labels, model collapses",
            "MSE on categorical targets drives weights to divergence",
            "Hinge loss with probabilistic head never converges",
            "Sparse loss variant used with one-hot targets corrupts training",
            "KL-divergence loss without stop-gradient destabilizes both towers",
        ],
    ),
]

# The four suboptimal-network-structure defects split 1 High / 3 Medium.
SPECIAL_CONTEXTS = {
    "KG-010": ("Enterprise", "Reversible", "Localized"),
    "KG-011": ("Enterprise", "Transient", "Localized"),
    "KG-012": ("Enterprise", "Transient", "Localized"),
    "KG-013": ("Enterprise", "Transient", "Localized"),
}

TENSORFLOW_GITHUB = [
    "Graph mode capture breaks custom training loop",
    "Dataset prefetch deadlocks with interleave on two workers",
    "Checkpoint restore drops optimizer slots silently",
    "XLA compilation rejects dynamic batch dimension",
    "Mixed-precision scale update races with gradient clipping",
    "SavedModel signature loses nested dict structure",
    "tf.function retraces on every call with list arguments",
    "Distribution strategy all-reduce hangs on uneven shards",
    "Sparse tensor gradient returns dense filled with zeros",
    "Autograph mistranslates while-loop with break",
    "Profiler reports negative step time on short runs",
    "Queue runner shutdown leaks threads in estimator path",
    "Ragged tensor concat corrupts row splits",
    "Custom op gradient registered under wrong name",
    "Eager tensor leak in repeated model construction",
    "Summary writer flushes partial records on abort",
    "Lookup table init order wrong under tf.init_scope",
    "Bucketing pipeline drops final short batch",
    "Server def rejects host with uppercase letters",
    "Cond branch pruning removes stateful op",
]

KERAS_SO = [
    "Why does my Keras model output NaN after a few batches?",
    "Keras fit() loss stuck at constant value from epoch one",
    "How to reshape input for LSTM layers correctly?",
    "Validation accuracy higher than training accuracy, is this a bug?",
    "Model.predict returns different results on repeated calls",
    "Custom layer weights not updating during training",
    "Embedding layer index out of range on unseen tokens",
    "Why does load_model fail with custom loss?",
    "GPU memory keeps growing between folds in cross validation",
    "Keras tokenizer produces shifted indices versus docs",
    "Data generator repeats samples within one epoch",
    "How to freeze layers without breaking batch norm statistics?",
    "Class weights appear ignored with one-hot targets",
    "Callback modifies learning rate but optimizer ignores it",
    "Concatenate layer complains about rank mismatch",
    "Why is my convolution output shape off by one?",
    "Dropout still active at inference time",
    "Multi-input model maps inputs in wrong order",
    "Sequence padding changes model accuracy drastically",
    "TimeDistributed wrapper doubles parameter count unexpectedly",
    "Sparse categorical accuracy disagrees with manual computation",
    "Saving weights mid-epoch corrupts checkpoint file",
    "ImageDataGenerator rescales twice with preprocessing function",
    "Custom metric returns tensor instead of scalar",
    "Why does shuffle=False change validation results?",
    "Initial epoch argument restarts scheduler from zero",
    "Masking layer ignored by downstream dense layers",
    "Model summary shows disconnected graph after renaming layers",
    "Stateful LSTM resets states despite stateful=True",
    "Learning rate schedule steps twice per batch",
]

# Cross-platform reposts of KG issues (issue-ID cross-reference).
KERAS_SO_REPOSTS = [
    ("Conv keyword argument crashes after deprecation warning - same as upstream?", "KG-001"),
    ("Binary cross-entropy with multi-class labels collapses model (repost)", "KG-038"),
    ("Training aborts mid-epoch with target shape mismatch", "KG-023"),
    ("Sigmoid head on multi-class output, accuracy stuck", "KG-020"),
    ("Default batch size makes epochs twice as slow", "KG-025"),
]

TENSORFLOW_SO = [
    "tf.data map function runs eagerly despite graph mode",
    "Why does GradientTape return None for embedding lookups?",
    "Session run feeds placeholder with wrong dtype silently",
]


def keras_github_records() -> list[DefectRecord]:
    records = []
    i = 0
    for label, odc_type, _ctx, titles in KERAS_GITHUB:
        for title in titles:
            i += 1
            records.append(
                DefectRecord(
                    id=f"KG-{i:03d}",
                    platform=Platform.GITHUB,
                    framework="keras",
                    title=title,
                    description=f"{title}. Reported against the Keras framework; "
                    f"triaged as: {label}.",
                    defect_type_label=label,
                    odc=ODCBaseAttributes(defect_type=ODCDefectType.parse(odc_type)),
                    created_at=f"2021-{(i - 1) % 12 + 1:02d}-{(i - 1) % 28 + 1:02d}",
                )
            )
    assert len(records) == 42, len(records)
    return records


def contexts_text() -> str:
    lines = [
        "# Severity contexts for the Keras/GitHub case-study subset.",
        "#",
        "# Curated so the severity matrix reproduces the published marginals",
        "# (Catastrophic=9, Critical=10, High=12, Medium=11, Low=0) under",
        "# Enterprise criticality; the study publishes only those totals, so",
        "# the per-defect assignments below are illustrative, not authoritative.",
        "#",
        "# id criticality reversibility scope",
    ]
    i = 0
    for label, _odc, ctx, titles in KERAS_GITHUB:
        for _ in titles:
            i += 1
            defect_id = f"KG-{i:03d}"
            crit, rev, scope = SPECIAL_CONTEXTS.get(defect_id, ctx)
            lines.append(f"{defect_id} {crit} {rev} {scope}  # {label}")
    return "\n".join(lines) + "\n"


def other_records() -> list[DefectRecord]:
    records = []
    for i, title in enumerate(TENSORFLOW_GITHUB, start=1):
        records.append(
            DefectRecord(
                id=f"TG-{i:03d}",
                platform=Platform.GITHUB,
                framework="tensorflow",
                title=title,
                description=f"{title}.",
                defect_type_label="",
                created_at=f"2021-{(i - 1) % 12 + 1:02d}-{i % 28 + 1:02d}",
            )
        )
    for i, title in enumerate(KERAS_SO, start=1):
        records.append(
            DefectRecord(
                id=f"KS-{i:03d}",
                platform=Platform.STACK_OVERFLOW,
                framework="keras",
                title=title,
                description=f"{title}.",
                defect_type_label="",
                created_at=f"2022-{(i - 1) % 12 + 1:02d}-{i % 28 + 1:02d}",
            )
        )
    for j, (title, ref) in enumerate(KERAS_SO_REPOSTS, start=len(KERAS_SO) + 1):
        records.append(
            DefectRecord(
                id=f"KS-{j:03d}",
                platform=Platform.STACK_OVERFLOW,
                framework="keras",
                title=title,
                description=f"{title}. Cross-posted from a GitHub issue.",
                defect_type_label="",
                cross_refs=(ref,),
                created_at=f"2022-{(j - 1) % 12 + 1:02d}-{j % 28 + 1:02d}",
            )
        )
    for i, title in enumerate(TENSORFLOW_SO, start=1):
        records.append(
            DefectRecord(
                id=f"TS-{i:03d}",
                platform=Platform.STACK_OVERFLOW,
                framework="tensorflow",
                title=title,
                description=f"{title}.",
                defect_type_label="",
                created_at=f"2022-{i:02d}-0{i}",
            )
        )
    return records


def main() -> None:
    kg = keras_github_records()
    everything = kg + other_records()
    assert len(everything) == 100, len(everything)

    (DATA_DIR / "benchmark-defects.jsonl").write_text(
        render_canonical(everything), encoding="utf-8"
    )
    (DATA_DIR / "keras-github-defects.jsonl").write_text(
        render_canonical(kg), encoding="utf-8"
    )
    (DATA_DIR / "keras-github-contexts.txt").write_text(
        contexts_text(), encoding="utf-8"
    )
    print(f"wrote {len(everything)} records to {DATA_DIR}")


if __name__ == "__main__":
    main()
