"""Boundary evaluation: hit rates, size histograms, and the lambda sweep.

Estimated and annotated boundary lists are compared by maximum-cardinality
matching under a tolerance window, in seconds (absolute) or in bars after
snapping annotations to downbeats.  Precision counts matched estimates,
recall matched annotations.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .segmenter import (
    Segmentation,
    SegmenterConfig,
    SegmentScorer,
    optimal_boundaries_from_scores,
)

KL_EPSILON = 1e-6
DEFAULT_LAMBDA_GRID = tuple(round(i * 0.01, 2) for i in range(1, 21))
ABSOLUTE_REFERENCES = ("original", "aligned")


class HitRate(NamedTuple):
    precision: float
    recall: float
    f_measure: float
    matched: int


@dataclass(frozen=True)
class AnnotationSet:
    """Annotated boundaries in seconds, optionally snapped to bar indices."""

    boundaries_seconds: tuple[float, ...]
    boundaries_bars: tuple[int, ...] | None = None

    def __post_init__(self):
        secs = tuple(float(t) for t in self.boundaries_seconds)
        object.__setattr__(self, "boundaries_seconds", secs)
        if len(secs) < 2:
            raise ValueError("annotations need at least 2 boundaries (start and end)")
        if any(b <= a for a, b in zip(secs, secs[1:])):
            raise ValueError("boundaries_seconds must be strictly increasing")
        if self.boundaries_bars is not None:
            bars = tuple(int(b) for b in self.boundaries_bars)
            object.__setattr__(self, "boundaries_bars", bars)
            if any(b <= a for a, b in zip(bars, bars[1:])):
                raise ValueError("boundaries_bars must be strictly increasing")


def load_annotations(path) -> AnnotationSet:
    """Read annotations from JSON {"boundaries_seconds": [...]} or from a
    two-column CSV of segment start/end times."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            payload = json.loads(text)
            return AnnotationSet(tuple(float(t) for t in payload["boundaries_seconds"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: bad annotation JSON: {exc}") from exc
    times = []
    for i, line in enumerate(text.splitlines()):
        if not line.strip() or line.startswith("#"):
            continue
        parts = [p for p in line.replace("\t", ",").split(",") if p.strip()]
        if len(parts) != 2:
            raise ValueError(f"{path}: line {i + 1}: expected two columns")
        times.append((float(parts[0]), float(parts[1])))
    if not times:
        raise ValueError(f"{path}: no annotation rows")
    bounds = sorted({t for pair in times for t in pair})
    return AnnotationSet(tuple(bounds))


def align_to_downbeats(ann: AnnotationSet, bar_times: Sequence[float]) -> AnnotationSet:
    """Snap each annotated instant to the nearest downbeat.

    Ties go to the earlier downbeat; annotations collapsing onto one
    downbeat are merged.  The result carries both the bar indices and the
    snapped times.
    """
    times = np.asarray(bar_times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("bar_times must be >= 2 strictly increasing instants")
    indices = []
    for t in ann.boundaries_seconds:
        right = int(np.searchsorted(times, t))
        left = right - 1
        if right >= times.size:
            idx = times.size - 1
        elif left < 0:
            idx = 0
        elif t - times[left] <= times[right] - t:  # tie -> earlier downbeat
            idx = left
        else:
            idx = right
        indices.append(idx)
    unique = sorted(set(indices))
    if len(unique) < 2:
        raise ValueError("annotations collapse onto fewer than 2 downbeats")
    return AnnotationSet(
        boundaries_seconds=tuple(float(times[i]) for i in unique),
        boundaries_bars=tuple(i + 1 for i in unique),
    )


def max_matching_size(est: Sequence, ann: Sequence, tolerance) -> int:
    """Maximum-cardinality matching between boundaries within tolerance.

    Augmenting-path search (Kuhn's algorithm); each boundary matches at
    most once.
    """
    adjacency = [
        [j for j, a in enumerate(ann) if abs(e - a) <= tolerance] for e in est
    ]
    owner = [-1] * len(ann)

    def augment(i: int, seen: list[bool]) -> bool:
        for j in adjacency[i]:
            if not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    return sum(augment(i, [False] * len(ann)) for i in range(len(est)))


def hit_rate(est: Sequence, ann: Sequence, tolerance) -> HitRate:
    """Precision/recall/F of est against ann at the given tolerance."""
    est = list(est)
    ann = list(ann)
    if not est or not ann:
        raise ValueError("hit_rate needs nonempty boundary lists")
    matched = max_matching_size(est, ann, tolerance)
    precision = matched / len(est)
    recall = matched / len(ann)
    f_measure = (
        2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    )
    return HitRate(precision, recall, f_measure, matched)


def barwise_hit_rate(
    est_bars: Sequence[int], ann_bars: Sequence[int], tolerance_bars: int = 0
) -> HitRate:
    return hit_rate(est_bars, ann_bars, int(tolerance_bars))


def size_histogram(seg: Segmentation) -> dict[int, int]:
    return dict(Counter(seg.segment_sizes()))


def kl_divergence(
    p: Mapping[int, float], q: Mapping[int, float], eps: float = KL_EPSILON
) -> float:
    """KL(p || q) of two size histograms over their union support.

    q gets additive smoothing eps before normalization so sizes unseen in
    q stay finite; p is normalized as-is and zero-mass sizes contribute
    nothing.
    """
    support = sorted(set(p) | set(q))
    pv = np.array([p.get(s, 0.0) for s in support], dtype=float)
    qv = np.array([q.get(s, 0.0) for s in support], dtype=float) + eps
    if pv.sum() <= 0 or len(support) == 0:
        raise ValueError("p must have positive total mass")
    pv /= pv.sum()
    qv /= qv.sum()
    mask = pv > 0
    return float(np.sum(pv[mask] * np.log(pv[mask] / qv[mask])))


@dataclass(frozen=True)
class EvalReport:
    """Hit rates per tolerance label plus the estimated size histogram."""

    per_tolerance: dict[str, HitRate]
    size_histogram: dict[int, int]
    kl_vs_reference: float | None = None

    def to_dict(self) -> dict:
        return {
            "per_tolerance": {
                label: {
                    "precision": hr.precision,
                    "recall": hr.recall,
                    "f_measure": hr.f_measure,
                    "matched": hr.matched,
                }
                for label, hr in self.per_tolerance.items()
            },
            "size_histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
            "kl_vs_reference": self.kl_vs_reference,
        }


def _trim(bounds: Sequence) -> list:
    return list(bounds)[1:-1]


def _rate_or_zero(est: Sequence, ann: Sequence, tolerance) -> HitRate:
    if not list(est) or not list(ann):
        return HitRate(0.0, 0.0, 0.0, 0)
    return hit_rate(est, ann, tolerance)


def evaluate_boundaries(
    est: Segmentation,
    ann: AnnotationSet,
    bar_times: Sequence[float] | None = None,
    *,
    absolute_reference: str,
    tolerances_seconds: tuple[float, ...] = (0.5, 3.0),
    bar_tolerances: tuple[int, ...] = (0, 1),
    trim_endpoints: bool = False,
    reference_histogram: Mapping[int, float] | None = None,
) -> EvalReport:
    """Full report for one song.

    absolute_reference selects what the absolute-time metrics compare
    against: the "original" annotated instants or the downbeat-"aligned"
    ones.  It must be chosen explicitly; the two disagree whenever
    annotations sit off the downbeat grid.  Barwise metrics always use
    aligned annotations.  Absolute metrics are skipped when no bar_times
    are available to place the estimate in seconds.
    """
    if absolute_reference not in ABSOLUTE_REFERENCES:
        raise ValueError(
            f"absolute_reference must be one of {ABSOLUTE_REFERENCES}"
        )
    per_tolerance: dict[str, HitRate] = {}

    aligned = ann
    if ann.boundaries_bars is None and bar_times is not None:
        aligned = align_to_downbeats(ann, bar_times)

    if bar_times is not None:
        est_seconds = list(est.boundaries_seconds(bar_times))
        ref = (
            list(ann.boundaries_seconds)
            if absolute_reference == "original"
            else list(aligned.boundaries_seconds)
        )
        if trim_endpoints:
            est_seconds, ref = _trim(est_seconds), _trim(ref)
        for tol in tolerances_seconds:
            per_tolerance[f"{tol:g}s"] = _rate_or_zero(est_seconds, ref, tol)

    if aligned.boundaries_bars is not None:
        est_bars = list(est.boundaries)
        ann_bars = list(aligned.boundaries_bars)
        if trim_endpoints:
            est_bars, ann_bars = _trim(est_bars), _trim(ann_bars)
        for tol in bar_tolerances:
            per_tolerance[f"{tol}bar"] = _rate_or_zero(est_bars, ann_bars, tol)

    hist = size_histogram(est)
    kl = None
    if reference_histogram is not None:
        kl = kl_divergence(hist, reference_histogram)
    return EvalReport(per_tolerance, hist, kl)


def aggregate_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Corpus mean: average rates per label, sum matches and histograms."""
    if not reports:
        raise ValueError("nothing to aggregate")
    labels: list[str] = []
    for report in reports:
        for label in report.per_tolerance:
            if label not in labels:
                labels.append(label)
    per_tolerance = {}
    for label in labels:
        rates = [r.per_tolerance[label] for r in reports if label in r.per_tolerance]
        per_tolerance[label] = HitRate(
            float(np.mean([r.precision for r in rates])),
            float(np.mean([r.recall for r in rates])),
            float(np.mean([r.f_measure for r in rates])),
            int(sum(r.matched for r in rates)),
        )
    hist: Counter = Counter()
    for report in reports:
        hist.update(report.size_histogram)
    kls = [r.kl_vs_reference for r in reports if r.kl_vs_reference is not None]
    kl = float(np.mean(kls)) if kls else None
    return EvalReport(per_tolerance, dict(hist), kl)


def lambda_sweep(
    corpus: Sequence[tuple],
    config: SegmenterConfig,
    grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
) -> tuple[float, dict[float, EvalReport]]:
    """Pick the penalty weight maximizing mean exact barwise F.

    corpus holds (ssm, annotations, bar_times) triples.  Kernel scores are
    cached per song across the whole grid, so only the penalty arithmetic
    is repeated.  Ties resolve to the smaller lambda.
    """
    if not corpus:
        raise ValueError("empty corpus")
    prepared = []
    for ssm, ann, bar_times in corpus:
        if ann.boundaries_bars is None:
            if bar_times is None:
                raise ValueError("annotations need bars or bar_times for the sweep")
            ann = align_to_downbeats(ann, bar_times)
        scorer = SegmentScorer(ssm, config.kernel, config.kernel_normalization)
        ann_hist = dict(Counter(np.diff(ann.boundaries_bars).tolist()))
        prepared.append((ssm, ann, bar_times, scorer, ann_hist))

    best_lambda = None
    best_f = -1.0
    reports: dict[float, EvalReport] = {}
    for lam in sorted(float(g) for g in grid):
        penalty = replace(config.penalty, lam=lam)
        song_reports = []
        for ssm, ann, bar_times, scorer, ann_hist in prepared:
            result = optimal_boundaries_from_scores(
                scorer.score_fn(penalty, config.score_form),
                ssm.bar_count,
                config.max_segment_bars,
            )
            seg = Segmentation(result.boundaries, result.total_score)
            song_reports.append(
                evaluate_boundaries(
                    seg,
                    ann,
                    bar_times,
                    absolute_reference="original",
                    reference_histogram=ann_hist,
                )
            )
        report = aggregate_reports(song_reports)
        reports[lam] = report
        mean_f = report.per_tolerance["0bar"].f_measure
        if mean_f > best_f:
            best_f = mean_f
            best_lambda = float(lam)
    return best_lambda, reports
