"""Optimal segmentation of a self-similarity matrix by dynamic programming.

Boundaries form a chain 1 = z_1 < z_2 < ... < z_k = B+1 and the objective
is the sum of penalized segment scores.  Because the objective is additive
over segments, the best segmentation ending at boundary b extends the best
segmentation ending at some earlier boundary, so a single left-to-right
pass with backtracking finds the global optimum.  Segment sizes are capped
(32 bars by default), which bounds the inner loop and the overall cost by
B * max_segment_bars score evaluations.

An exhaustive reference (brute_force_segmentation) enumerates every
admissible boundary subset for small songs; the two must agree on the
optimal score to within accumulation rounding.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .kernels import KernelSpec, kernel_score, max_window8_score, NORMALIZATIONS
from .penalty import PenaltySpec, penalty_value
from .similarity import SIMILARITY_KINDS, SelfSimilarityMatrix, build_ssm
from .barwise import BarwiseTF

SCORE_FORMS = ("normalized", "raw")
BRUTE_FORCE_MAX_BARS = 20


@dataclass(frozen=True)
class Segmentation:
    """Boundary chain over bars 1..B+1 plus the objective value reached."""

    boundaries: tuple[int, ...]
    total_score: float

    def __post_init__(self):
        bounds = tuple(int(b) for b in self.boundaries)
        object.__setattr__(self, "boundaries", bounds)
        if len(bounds) < 2:
            raise ValueError("a segmentation has at least 2 boundaries")
        if bounds[0] != 1:
            raise ValueError("boundaries must start at 1")
        if any(b <= a for a, b in zip(bounds, bounds[1:])):
            raise ValueError("boundaries must be strictly increasing")
        object.__setattr__(self, "total_score", float(self.total_score))

    def segment_sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.boundaries, self.boundaries[1:]))

    def boundaries_seconds(self, bar_times) -> tuple[float, ...]:
        """Map boundary indices onto downbeat times (boundary b -> bar_times[b-1])."""
        times = tuple(float(t) for t in bar_times)
        if self.boundaries[-1] > len(times):
            raise ValueError(
                f"bar_times has {len(times)} entries, need {self.boundaries[-1]}"
            )
        return tuple(times[b - 1] for b in self.boundaries)


@dataclass(frozen=True)
class SegmenterConfig:
    """Everything that determines a segmentation run.

    score_form "normalized" weights the penalty by the song's best
    window-8 kernel score; "raw" subtracts lambda * penalty directly.
    kernel_normalization "kernel_count" divides kernel sums by the nonzero
    kernel count plus the diagonal size instead of the segment length.
    """

    similarity: str = "RBF"
    kernel: KernelSpec = KernelSpec("Band", 7)
    penalty: PenaltySpec = PenaltySpec()
    max_segment_bars: int = 32
    score_form: str = "normalized"
    kernel_normalization: str = "segment_length"

    def __post_init__(self):
        if self.similarity not in SIMILARITY_KINDS:
            raise ValueError(f"unknown similarity {self.similarity!r}")
        if int(self.max_segment_bars) < 1:
            raise ValueError("max_segment_bars must be >= 1")
        object.__setattr__(self, "max_segment_bars", int(self.max_segment_bars))
        if self.score_form not in SCORE_FORMS:
            raise ValueError(f"unknown score_form {self.score_form!r}")
        if self.kernel_normalization not in NORMALIZATIONS:
            raise ValueError(
                f"unknown kernel_normalization {self.kernel_normalization!r}"
            )

    def to_dict(self) -> dict:
        kernel = {"kind": self.kernel.kind}
        if self.kernel.kind == "Band":
            kernel["bands"] = self.kernel.bands
        return {
            "similarity": self.similarity,
            "kernel": kernel,
            "penalty": {
                "kind": self.penalty.kind,
                "tau": self.penalty.tau,
                "alpha": self.penalty.alpha,
                "lambda": self.penalty.lam,
            },
            "max_segment_bars": self.max_segment_bars,
            "score_form": self.score_form,
            "kernel_normalization": self.kernel_normalization,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SegmenterConfig":
        known = {
            "similarity",
            "kernel",
            "penalty",
            "max_segment_bars",
            "score_form",
            "kernel_normalization",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config field(s): {sorted(unknown)}")
        defaults = cls()
        kwargs = {}
        if "similarity" in payload:
            kwargs["similarity"] = payload["similarity"]
        if "kernel" in payload:
            k = dict(payload["kernel"])
            bad = set(k) - {"kind", "bands"}
            if bad:
                raise ValueError(f"unknown kernel field(s): {sorted(bad)}")
            kwargs["kernel"] = KernelSpec(k.get("kind", "Band"), k.get("bands"))
        if "penalty" in payload:
            p = dict(payload["penalty"])
            bad = set(p) - {"kind", "tau", "alpha", "lambda"}
            if bad:
                raise ValueError(f"unknown penalty field(s): {sorted(bad)}")
            kwargs["penalty"] = PenaltySpec(
                kind=p.get("kind", defaults.penalty.kind),
                tau=p.get("tau", defaults.penalty.tau),
                alpha=p.get("alpha", defaults.penalty.alpha),
                lam=p.get("lambda", defaults.penalty.lam),
            )
        for key in ("max_segment_bars", "score_form", "kernel_normalization"):
            if key in payload:
                kwargs[key] = payload[key]
        return replace(defaults, **kwargs)


@dataclass
class DPResult:
    """Raw dynamic-programming output.

    prefix_scores[b] is the best total score of a segmentation of bars
    1..b-1 ending with boundary b (index 0 unused); antecedents[b] is the
    boundary it extends.  candidates_evaluated counts inner-loop score
    evaluations, bounded by n_bars * max_segment_bars.
    """

    boundaries: tuple[int, ...]
    total_score: float
    prefix_scores: np.ndarray
    antecedents: np.ndarray
    candidates_evaluated: int


def optimal_boundaries_from_scores(
    score: Callable[[int, int], float],
    n_bars: int,
    max_segment_bars: int,
) -> DPResult:
    """Best boundary chain for an arbitrary segment score function.

    score(start, end_excl) gives the value of the segment covering bars
    start..end_excl-1; any callable works, which is how tabulated toy
    examples and penalized production scores share one engine.  Exact ties
    between antecedents resolve to the largest antecedent index, i.e. the
    shortest final segment.
    """
    if n_bars < 1:
        raise ValueError("n_bars must be >= 1")
    if max_segment_bars < 1:
        raise ValueError("max_segment_bars must be >= 1")
    prefix = np.full(n_bars + 2, -np.inf)
    prefix[1] = 0.0
    antecedent = np.zeros(n_bars + 2, dtype=int)
    evaluated = 0
    for end in range(2, n_bars + 2):
        best = -np.inf
        best_start = 0
        for start in range(max(1, end - max_segment_bars), end):
            evaluated += 1
            value = prefix[start] + score(start, end)
            if value >= best:
                best = value
                best_start = start
        prefix[end] = best
        antecedent[end] = best_start
    bounds = [n_bars + 1]
    while bounds[-1] != 1:
        bounds.append(int(antecedent[bounds[-1]]))
    bounds.reverse()
    return DPResult(
        boundaries=tuple(bounds),
        total_score=float(prefix[n_bars + 1]),
        prefix_scores=prefix,
        antecedents=antecedent,
        candidates_evaluated=evaluated,
    )


class SegmentScorer:
    """Memoized penalized segment scores for one song.

    Kernel scores are cached per (start, end) and the window-8 ceiling is
    computed once, so sweeps over penalty settings on the same matrix
    reuse all the similarity work.
    """

    def __init__(
        self,
        ssm: SelfSimilarityMatrix,
        kernel: KernelSpec,
        normalization: str = "segment_length",
    ):
        self.ssm = ssm
        self.kernel = kernel
        self.normalization = normalization
        self._memo: dict[tuple[int, int], float] = {}
        self._u8: float | None = None

    def kernel_score(self, start: int, end_excl: int) -> float:
        key = (start, end_excl)
        value = self._memo.get(key)
        if value is None:
            value = kernel_score(
                self.ssm, start, end_excl, self.kernel, self.normalization
            )
            self._memo[key] = value
        return value

    @property
    def u_k8_max(self) -> float:
        if self._u8 is None:
            self._u8 = max_window8_score(self.ssm, self.kernel, self.normalization)
        return self._u8

    def score_fn(
        self, penalty: PenaltySpec, score_form: str = "normalized"
    ) -> Callable[[int, int], float]:
        if score_form not in SCORE_FORMS:
            raise ValueError(f"unknown score_form {score_form!r}")
        if penalty.kind == "None" or penalty.lam == 0.0:
            return self.kernel_score
        weight = 1.0 if score_form == "raw" else self.u_k8_max

        def score(start: int, end_excl: int) -> float:
            return self.kernel_score(start, end_excl) - (
                weight * penalty.lam * penalty_value(penalty, end_excl - start)
            )

        return score


def optimal_segmentation(
    ssm: SelfSimilarityMatrix,
    config: SegmenterConfig = SegmenterConfig(),
    scorer: SegmentScorer | None = None,
) -> Segmentation:
    """Globally optimal segmentation of one self-similarity matrix.

    config.similarity is not consulted here (the matrix is already built);
    it matters to the feature-level pipeline.  Pass a SegmentScorer to
    share cached kernel scores across runs on the same matrix.
    """
    if scorer is None:
        scorer = SegmentScorer(ssm, config.kernel, config.kernel_normalization)
    result = optimal_boundaries_from_scores(
        scorer.score_fn(config.penalty, config.score_form),
        ssm.bar_count,
        config.max_segment_bars,
    )
    return Segmentation(result.boundaries, result.total_score)


def brute_force_segmentation(
    ssm: SelfSimilarityMatrix,
    config: SegmenterConfig = SegmenterConfig(),
    scorer: SegmentScorer | None = None,
) -> Segmentation:
    """Exhaustive maximizer over all admissible boundary subsets.

    Enumerates the 2^(B-1) subsets of interior boundaries (keeping 1 and
    B+1), drops chains with a segment over max_segment_bars, and scores
    the rest left to right.  Only meant for songs of up to 20 bars.
    """
    n_bars = ssm.bar_count
    if n_bars > BRUTE_FORCE_MAX_BARS:
        raise ValueError(
            f"brute force is capped at {BRUTE_FORCE_MAX_BARS} bars, got {n_bars}"
        )
    if scorer is None:
        scorer = SegmentScorer(ssm, config.kernel, config.kernel_normalization)
    score = scorer.score_fn(config.penalty, config.score_form)
    cap = config.max_segment_bars
    interior = range(2, n_bars + 1)
    best_total = -np.inf
    best_bounds: tuple[int, ...] | None = None
    for r in range(0, n_bars):
        for subset in itertools.combinations(interior, r):
            bounds = (1, *subset, n_bars + 1)
            if any(b - a > cap for a, b in zip(bounds, bounds[1:])):
                continue
            total = 0.0
            for a, b in zip(bounds, bounds[1:]):
                total += score(a, b)
            if total > best_total:
                best_total = total
                best_bounds = bounds
    if best_bounds is None:
        raise ValueError(
            f"no admissible segmentation of {n_bars} bars with cap {cap}"
        )
    return Segmentation(best_bounds, best_total)


def segment_barwise_tf(
    tf: BarwiseTF, config: SegmenterConfig = SegmenterConfig()
) -> Segmentation:
    """Feature-level pipeline: build the configured SSM, then segment it."""
    return optimal_segmentation(build_ssm(tf, config.similarity), config)


def segmentation_to_dict(
    seg: Segmentation, bar_times=None
) -> dict:
    payload: dict = {"boundaries_bars": list(seg.boundaries)}
    if bar_times is not None:
        payload["boundaries_seconds"] = list(seg.boundaries_seconds(bar_times))
    payload["total_score"] = seg.total_score
    return payload


def save_segmentation(seg: Segmentation, path, bar_times=None) -> None:
    Path(path).write_text(
        json.dumps(segmentation_to_dict(seg, bar_times)) + "\n"
    )


def load_segmentation(path) -> tuple[Segmentation, tuple[float, ...] | None]:
    """Read a segmentation JSON; returns the segmentation and, when the
    file carries them, the boundary times in seconds."""
    payload = json.loads(Path(path).read_text())
    try:
        seg = Segmentation(
            tuple(payload["boundaries_bars"]), payload.get("total_score", 0.0)
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: bad segmentation JSON: {exc}") from exc
    seconds = payload.get("boundaries_seconds")
    if seconds is not None:
        seconds = tuple(float(s) for s in seconds)
    return seg, seconds
