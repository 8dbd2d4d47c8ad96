"""Distribution and association analysis over classification labels.

Everything here is pure: labels in, frozen result objects out. File
rendering lives in the report module. Percentages are rounded half-up
to two decimals; category orders are fixed so tables always print the
same way (AI: Data, Learning, Thinking, NotRelated; severity from
Catastrophic down to Low).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .classify import ClassificationLabel
from .taxonomy import AIAttribute, QualityModel, Severity


class AnalysisError(Exception):
    pass


class EmptyInput(AnalysisError):
    pass


class DegenerateTable(AnalysisError):
    """Fewer than 2 non-empty rows or columns; independence undefined."""


AI_CATEGORY_ORDER: tuple[AIAttribute, ...] = (
    AIAttribute.DATA,
    AIAttribute.LEARNING,
    AIAttribute.THINKING,
    AIAttribute.NOT_RELATED,
)

SEVERITY_CATEGORY_ORDER: tuple[Severity, ...] = (
    Severity.CATASTROPHIC,
    Severity.CRITICAL,
    Severity.HIGH,
    Severity.MEDIUM,
    Severity.LOW,
)


def round_percent(count: int, total: int) -> float:
    """100*count/total, half-up to 2 decimals. 0 when total is 0."""
    if total == 0:
        return 0.0
    exact = Decimal(100 * count) / Decimal(total)
    return float(exact.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Distribution:
    attribute: str
    rows: tuple[tuple[str, int, float], ...]
    total: int
    excluded: int = 0

    def count(self, category: str) -> int:
        for name, count, _ in self.rows:
            if name == category:
                return count
        raise KeyError(category)

    def percent(self, category: str) -> float:
        for name, _, pct in self.rows:
            if name == category:
                return pct
        raise KeyError(category)


@dataclass(frozen=True)
class ContingencyTable:
    row_attribute: str
    col_attribute: str
    row_categories: tuple[str, ...]
    col_categories: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    row_marginals: tuple[int, ...]
    col_marginals: tuple[int, ...]
    total: int
    excluded: int = 0


@dataclass(frozen=True)
class IndependenceTest:
    statistic: float
    dof: int
    p_value: float
    expected: tuple[tuple[float, ...], ...]
    warning: bool


def _ai_category(label: ClassificationLabel) -> str | None:
    if label.ai is AIAttribute.UNCLASSIFIED:
        return None
    return label.ai.value


def _severity_category(label: ClassificationLabel) -> str | None:
    if label.severity is None:
        return None
    return str(label.severity)


_ATTRIBUTES = {
    "ai": (_ai_category, tuple(a.value for a in AI_CATEGORY_ORDER)),
    "severity": (_severity_category, tuple(str(s) for s in SEVERITY_CATEGORY_ORDER)),
}


def _attribute(name: str):
    try:
        return _ATTRIBUTES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown analysis attribute: {name!r}") from None


def category_order(attribute: str) -> tuple[str, ...]:
    """Canonical rendering order for an analysis attribute."""
    return _attribute(attribute)[1]


def one_way(labels: Sequence[ClassificationLabel], attribute: str) -> Distribution:
    """Counts and percents by category, canonical order. Labels without
    the attribute (Unclassified / missing severity) are excluded from
    the total and reported via the excluded field."""
    if not labels:
        raise EmptyInput(f"no labels to distribute over {attribute!r}")
    extract, categories = _attribute(attribute)
    counts: Counter = Counter()
    excluded = 0
    for label in labels:
        cat = extract(label)
        if cat is None:
            excluded += 1
        else:
            counts[cat] += 1
    total = sum(counts.values())
    rows = tuple(
        (cat, counts[cat], round_percent(counts[cat], total)) for cat in categories
    )
    return Distribution(
        attribute=attribute.strip().lower(),
        rows=rows,
        total=total,
        excluded=excluded,
    )


def two_way(
    labels: Sequence[ClassificationLabel],
    row_attr: str = "ai",
    col_attr: str = "severity",
) -> ContingencyTable:
    """Cross-tabulation; only labels carrying both attributes count."""
    if not labels:
        raise EmptyInput("no labels to cross-tabulate")
    row_extract, row_categories = _attribute(row_attr)
    col_extract, col_categories = _attribute(col_attr)
    cells: Counter = Counter()
    excluded = 0
    for label in labels:
        r, c = row_extract(label), col_extract(label)
        if r is None or c is None:
            excluded += 1
        else:
            cells[(r, c)] += 1
    counts = tuple(
        tuple(cells[(r, c)] for c in col_categories) for r in row_categories
    )
    row_marginals = tuple(sum(row) for row in counts)
    col_marginals = tuple(sum(col) for col in zip(*counts))
    return ContingencyTable(
        row_attribute=row_attr.strip().lower(),
        col_attribute=col_attr.strip().lower(),
        row_categories=row_categories,
        col_categories=col_categories,
        counts=counts,
        row_marginals=row_marginals,
        col_marginals=col_marginals,
        total=sum(row_marginals),
        excluded=excluded,
    )


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = Γ(a,x)/Γ(a).

    Series for the lower function when x < a+1, modified Lentz
    continued fraction otherwise; both converge to near machine
    precision for the chi-square arguments seen here.
    """
    if a <= 0.0:
        raise ValueError("shape parameter must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    log_front = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        ap = a
        term = total = 1.0 / a
        for _ in range(1000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(log_front)
        return min(1.0, max(0.0, 1.0 - p))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return min(1.0, max(0.0, math.exp(log_front) * h))


def chi_square_upper_p(statistic: float, dof: int) -> float:
    if statistic <= 0.0:
        return 1.0
    return regularized_gamma_q(dof / 2.0, statistic / 2.0)


def chi_square_independence(table: ContingencyTable) -> IndependenceTest:
    """Pearson test of row/column independence. All-zero rows and
    columns are dropped first; what remains must be at least 2x2."""
    rows = [i for i, m in enumerate(table.row_marginals) if m > 0]
    cols = [j for j, m in enumerate(table.col_marginals) if m > 0]
    if len(rows) < 2 or len(cols) < 2:
        raise DegenerateTable(
            f"need a 2x2 table after dropping empty lines, "
            f"have {len(rows)}x{len(cols)}"
        )
    observed = [[table.counts[i][j] for j in cols] for i in rows]
    row_m = [sum(r) for r in observed]
    col_m = [sum(c) for c in zip(*observed)]
    total = sum(row_m)
    expected = tuple(
        tuple(rm * cm / total for cm in col_m) for rm in row_m
    )
    statistic = sum(
        (observed[i][j] - expected[i][j]) ** 2 / expected[i][j]
        for i in range(len(rows))
        for j in range(len(cols))
    )
    dof = (len(rows) - 1) * (len(cols) - 1)
    return IndependenceTest(
        statistic=statistic,
        dof=dof,
        p_value=chi_square_upper_p(statistic, dof),
        expected=expected,
        warning=any(cell < 5.0 for row in expected for cell in row),
    )


def impact_frequencies(
    labels: Iterable[ClassificationLabel],
) -> list[tuple[QualityModel, str, int]]:
    """How often each quality characteristic is hit, counting every
    layer of every impact path. Sorted by count descending, then
    characteristic name, then model."""
    counts: Counter = Counter()
    for label in labels:
        for path in label.impacts:
            for characteristic in path.characteristics:
                counts[(path.model, characteristic)] += 1
    return sorted(
        ((model, name, count) for (model, name), count in counts.items()),
        key=lambda t: (-t[2], t[1], t[0].value),
    )
