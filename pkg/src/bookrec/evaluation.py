"""Cross-validated evaluation: k-fold plans, ranking metrics, learning
curves, a slot-ablation comparison, and a one-tailed paired t-test.

Nine metrics are reported per test fold: classification accuracy, recall,
precision and F-measure (percent), precision over the top 3 and top 10
ranked items (percent), average rating of the top 3 and top 10, and the
rank correlation between the score ordering and the rating ordering
(midrank-tied Spearman). Metrics whose denominator is empty (for example
precision when nothing is predicted positive, or the top-10 block on a
fold smaller than 10) are reported as absent and excluded from averages.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .learner import POSITIVE_THRESHOLD, Profile, RatedExample, train
from .slots import LEARNER_SLOTS, RELATED_AUTHORS, RELATED_TITLES, canonical_mask

METRIC_FIELDS = ("acc", "rec", "pr", "pr3", "pr10", "f", "rt3", "rt10", "r_s")

DEFAULT_CURVE_POINTS: tuple[object, ...] = (5, 10, 20, 40, 100, "full")
DEFAULT_ABLATED_SLOTS = (RELATED_AUTHORS, RELATED_TITLES)


# ---------------------------------------------------------------------------
# fold plans


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: dict[str, int]

    def fold_ids(self, fold: int) -> list[str]:
        return [i for i, f in self.assignment.items() if f == fold]


def kfold_split(ids: Sequence[str], k: int, seed: int) -> FoldPlan:
    """Seeded shuffle then round-robin assignment; fold sizes differ by <= 1."""
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    if k > len(ids):
        raise ValueError(f"fold count {k} exceeds {len(ids)} examples")
    if len(set(ids)) != len(ids):
        raise ValueError("example ids must be unique")
    shuffled = list(ids)
    random.Random(seed).shuffle(shuffled)
    return FoldPlan(k=k, seed=seed, assignment={i: pos % k for pos, i in enumerate(shuffled)})


# ---------------------------------------------------------------------------
# rank correlation


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with tied values sharing the average of their positions."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Rank correlation: Pearson over midranks. None when either side is constant."""
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    n = len(xs)
    if n < 2:
        return None
    rx = midranks(xs)
    ry = midranks(ys)
    mean = (n + 1) / 2.0
    sxx = math.fsum((r - mean) ** 2 for r in rx)
    syy = math.fsum((r - mean) ** 2 for r in ry)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = math.fsum((a - mean) * (b - mean) for a, b in zip(rx, ry))
    return sxy / math.sqrt(sxx * syy)


# ---------------------------------------------------------------------------
# per-fold metrics


@dataclass(frozen=True)
class MetricsReport:
    acc: float | None = None
    rec: float | None = None
    pr: float | None = None
    pr3: float | None = None
    pr10: float | None = None
    f: float | None = None
    rt3: float | None = None
    rt10: float | None = None
    r_s: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


def compute_metrics(items: Sequence[tuple[int, float]]) -> MetricsReport:
    """Score one test fold given (rating, score) pairs.

    Truth is positive for ratings >= 6; the classifier predicts positive for
    a strictly positive score. Top-3/10 blocks use the score-descending
    order; ties keep input order, so callers pass items in ascending-id
    order to get the deterministic tie rule.
    """
    if not items:
        raise ValueError("cannot compute metrics for an empty test fold")
    n = len(items)
    truth = [rating >= POSITIVE_THRESHOLD for rating, _ in items]
    predicted = [score > 0.0 for _, score in items]

    true_pos = sum(1 for t, p in zip(truth, predicted) if t and p)
    actual_pos = sum(truth)
    predicted_pos = sum(predicted)

    acc = 100.0 * sum(1 for t, p in zip(truth, predicted) if t == p) / n
    rec = 100.0 * true_pos / actual_pos if actual_pos else None
    pr = 100.0 * true_pos / predicted_pos if predicted_pos else None
    if pr is None or rec is None:
        f = None
    elif pr + rec > 0.0:
        f = 2.0 * pr * rec / (pr + rec)
    else:
        f = 0.0

    by_score = sorted(range(n), key=lambda i: -items[i][1])  # stable on ties

    def top_block(size: int) -> tuple[float, float] | tuple[None, None]:
        if n < size:
            return None, None
        top = [items[i][0] for i in by_score[:size]]
        precision = 100.0 * sum(1 for r in top if r >= POSITIVE_THRESHOLD) / size
        return precision, sum(top) / size

    pr3, rt3 = top_block(3)
    pr10, rt10 = top_block(10)

    r_s = spearman([float(r) for r, _ in items], [s for _, s in items])
    return MetricsReport(acc=acc, rec=rec, pr=pr, pr3=pr3, pr10=pr10, f=f, rt3=rt3, rt10=rt10, r_s=r_s)


def mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Field-wise mean over the folds where the field is defined."""
    means: dict[str, float | None] = {}
    for name in METRIC_FIELDS:
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        means[name] = sum(values) / len(values) if values else None
    return MetricsReport(**means)


# ---------------------------------------------------------------------------
# learning curves


@dataclass(frozen=True)
class CurvePoint:
    label: str  # the requested point, e.g. "5" or "full"
    n: int  # guaranteed common training size at this point
    fold_reports: tuple[MetricsReport, ...]
    mean: MetricsReport


def _fold_slices(
    examples: Sequence[RatedExample], plan: FoldPlan
) -> list[tuple[list[RatedExample], list[RatedExample]]]:
    by_id = {ex.book.id: ex for ex in examples}
    if len(by_id) != len(examples):
        raise ValueError("examples must have unique book ids")
    missing = set(by_id) ^ set(plan.assignment)
    if missing:
        raise ValueError(f"fold plan does not cover the dataset exactly: {sorted(missing)[:5]}")
    slices = []
    for fold in range(plan.k):
        test = sorted(
            (ex for ex in examples if plan.assignment[ex.book.id] == fold),
            key=lambda ex: ex.book.id,
        )
        pool = sorted(
            (ex for ex in examples if plan.assignment[ex.book.id] != fold),
            key=lambda ex: ex.book.id,
        )
        # One seeded permutation per fold, shared by every curve point, so
        # smaller training subsets are prefixes of larger ones.
        random.Random(plan.seed * 1_000_003 + fold).shuffle(pool)
        slices.append((pool, test))
    return slices


def training_orders(examples: Sequence[RatedExample], plan: FoldPlan) -> list[list[str]]:
    """Per-fold training-set id order; curve subsets are prefixes of these."""
    return [[ex.book.id for ex in pool] for pool, _ in _fold_slices(examples, plan)]


def _normalize_points(points: Iterable[object], min_train: int) -> list[tuple[str, int]]:
    normalized: list[tuple[str, int]] = []
    for point in points:
        if isinstance(point, str) and point.lower() == "full":
            normalized.append(("full", min_train))
        else:
            value = int(point)  # type: ignore[arg-type]
            if value < 1:
                raise ValueError(f"curve point must be >= 1, got {value}")
            if value > min_train:
                raise ValueError(
                    f"curve point {value} exceeds the smallest training fold ({min_train})"
                )
            normalized.append((str(value), value))
    return normalized


def learning_curve(
    examples: Sequence[RatedExample],
    plan: FoldPlan,
    points: Iterable[object] = DEFAULT_CURVE_POINTS,
    lam: float = 1.0,
    mask: Iterable[str] = LEARNER_SLOTS,
) -> list[CurvePoint]:
    """Per curve point: train each fold on a prefix of its training order,
    test on the held-out fold, and average the metric reports."""
    mask = canonical_mask(mask)
    slices = _fold_slices(examples, plan)
    min_train = min(len(pool) for pool, _ in slices)
    curve: list[CurvePoint] = []
    for label, size in _normalize_points(points, min_train):
        reports = []
        for pool, test in slices:
            subset = pool if label == "full" else pool[:size]
            profile = train(subset, lam=lam, mask=mask)
            reports.append(
                compute_metrics([(ex.rating, profile.log_odds(ex.book)) for ex in test])
            )
        curve.append(
            CurvePoint(label=label, n=size, fold_reports=tuple(reports), mean=mean_report(reports))
        )
    return curve


# ---------------------------------------------------------------------------
# paired t-test


def t_critical(df: int, alpha: float = 0.05) -> float:
    """Upper-tail critical value of Student's t distribution."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    from scipy.stats import t as student_t  # deferred: scipy import is slow

    return float(student_t.ppf(1.0 - alpha, df))


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    critical: float
    significant: bool
    degenerate: bool = False  # zero-variance differences


def paired_t_test(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TTestResult:
    """One-tailed paired t-test of H1: mean(a - b) > 0.

    Zero-variance differences are flagged degenerate: a strictly positive
    constant difference is treated as infinitely significant, a zero or
    negative one as not significant.
    """
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    df = n - 1
    critical = t_critical(df, alpha)
    if var == 0.0:
        if mean > 0.0:
            return TTestResult(t=math.inf, df=df, critical=critical, significant=True, degenerate=True)
        if mean < 0.0:
            return TTestResult(t=-math.inf, df=df, critical=critical, significant=False, degenerate=True)
        return TTestResult(t=0.0, df=df, critical=critical, significant=False, degenerate=True)
    t = mean / math.sqrt(var / n)
    return TTestResult(t=t, df=df, critical=critical, significant=t > critical)


# ---------------------------------------------------------------------------
# slot ablation


@dataclass(frozen=True)
class MetricComparison:
    metric: str
    full_mean: float | None
    reduced_mean: float | None
    mean_diff: float | None
    n_pairs: int
    ttest: TTestResult | None


@dataclass(frozen=True)
class AblationPoint:
    label: str
    n: int
    full: CurvePoint
    reduced: CurvePoint
    comparisons: dict[str, MetricComparison]


@dataclass(frozen=True)
class AblationReport:
    removed: tuple[str, ...]
    points: tuple[AblationPoint, ...]


def ablation_run(
    examples: Sequence[RatedExample],
    plan: FoldPlan,
    points: Iterable[object] = DEFAULT_CURVE_POINTS,
    removed: Iterable[str] = DEFAULT_ABLATED_SLOTS,
    lam: float = 1.0,
    mask: Iterable[str] = LEARNER_SLOTS,
) -> AblationReport:
    """Learning curves for the full mask vs the mask minus ``removed`` slots,
    on identical folds and training subsets, compared point by point with a
    one-tailed paired t-test per metric."""
    full_mask = canonical_mask(mask)
    removed_t = canonical_mask(removed)
    reduced = [slot for slot in full_mask if slot not in removed_t]
    if not reduced:
        raise ValueError("ablation would remove every masked slot")
    points = list(points)
    full_curve = learning_curve(examples, plan, points, lam=lam, mask=full_mask)
    reduced_curve = learning_curve(examples, plan, points, lam=lam, mask=reduced)

    out: list[AblationPoint] = []
    for full_point, reduced_point in zip(full_curve, reduced_curve):
        comparisons: dict[str, MetricComparison] = {}
        for metric in METRIC_FIELDS:
            pairs = [
                (getattr(fr, metric), getattr(rr, metric))
                for fr, rr in zip(full_point.fold_reports, reduced_point.fold_reports)
                if getattr(fr, metric) is not None and getattr(rr, metric) is not None
            ]
            ttest = paired_t_test([p[0] for p in pairs], [p[1] for p in pairs]) if len(pairs) >= 2 else None
            full_mean = getattr(full_point.mean, metric)
            reduced_mean = getattr(reduced_point.mean, metric)
            diff = (
                sum(p[0] - p[1] for p in pairs) / len(pairs) if pairs else None
            )
            comparisons[metric] = MetricComparison(
                metric=metric,
                full_mean=full_mean,
                reduced_mean=reduced_mean,
                mean_diff=diff,
                n_pairs=len(pairs),
                ttest=ttest,
            )
        out.append(
            AblationPoint(
                label=full_point.label,
                n=full_point.n,
                full=full_point,
                reduced=reduced_point,
                comparisons=comparisons,
            )
        )
    return AblationReport(removed=removed_t, points=tuple(out))


# ---------------------------------------------------------------------------
# report serialization


def _point_dict(point: CurvePoint) -> dict:
    return {
        "label": point.label,
        "n": point.n,
        "mean": point.mean.as_dict(),
        "folds": [r.as_dict() for r in point.fold_reports],
    }


def _ttest_dict(result: TTestResult | None) -> dict | None:
    if result is None:
        return None
    t = result.t
    return {
        "t": None if math.isinf(t) else t,
        "t_infinite": math.isinf(t),
        "df": result.df,
        "critical": result.critical,
        "significant": result.significant,
        "degenerate": result.degenerate,
    }


def curve_report(
    curve: Sequence[CurvePoint],
    folds: int,
    seed: int,
    ablation: AblationReport | None = None,
) -> dict:
    doc: dict = {
        "metrics": list(METRIC_FIELDS),
        "folds": folds,
        "seed": seed,
        "points": [_point_dict(p) for p in curve],
    }
    if ablation is not None:
        doc["ablation"] = {
            "removed": list(ablation.removed),
            "points": [
                {
                    "label": p.label,
                    "n": p.n,
                    "full": _point_dict(p.full),
                    "reduced": _point_dict(p.reduced),
                    "comparisons": {
                        metric: {
                            "full_mean": c.full_mean,
                            "reduced_mean": c.reduced_mean,
                            "mean_diff": c.mean_diff,
                            "n_pairs": c.n_pairs,
                            "ttest": _ttest_dict(c.ttest),
                        }
                        for metric, c in p.comparisons.items()
                    },
                }
                for p in ablation.points
            ],
        }
    return doc


def report_to_json(report: Mapping) -> str:
    return json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2)


_CSV_HEADER = "model,N,Acc,Rec,Pr,Pr3,Pr10,F,Rt3,Rt10,r_s"


def _csv_row(model: str, point: CurvePoint) -> str:
    cells = [model, point.label if point.label == "full" else str(point.n)]
    for metric in METRIC_FIELDS:
        value = getattr(point.mean, metric)
        cells.append("" if value is None else repr(value))
    return ",".join(cells)


def curve_csv(curve: Sequence[CurvePoint], ablation: AblationReport | None = None) -> str:
    """CSV of per-point mean metrics for plotting learning curves."""
    lines = [_CSV_HEADER]
    lines += [_csv_row("full", point) for point in curve]
    if ablation is not None:
        lines += [_csv_row("reduced", point.reduced) for point in ablation.points]
    return "\n".join(lines) + "\n"
