"""Segment kernels and segment scores.

A kernel weights the entries of a square crop of the self-similarity
matrix.  The Full kernel counts every off-diagonal entry; the v-Band
kernel only the first v sub/superdiagonals.  The main diagonal never
counts.  Scores are computed by direct band-limited summation over the
crop; the dense kernel matrix is only materialized for inspection and
cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .similarity import SelfSimilarityMatrix

KERNEL_KINDS = ("Full", "Band")
NORMALIZATIONS = ("segment_length", "kernel_count")

# Window size for the score floor used by the normalized penalty weighting.
REFERENCE_WINDOW = 8


@dataclass(frozen=True)
class KernelSpec:
    """kind is "Full" or "Band"; bands is the band count (Band only)."""

    kind: str = "Band"
    bands: int | None = 7

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "Band":
            if self.bands is None or int(self.bands) < 1:
                raise ValueError("Band kernel needs bands >= 1")
            object.__setattr__(self, "bands", int(self.bands))
        elif self.bands is not None:
            raise ValueError("Full kernel takes no bands parameter")


def kernel_matrix(spec: KernelSpec, n: int) -> np.ndarray:
    """Dense n x n kernel: K[i][j] = 1 where |i - j| is counted, 0 elsewhere."""
    if n < 1:
        raise ValueError("n must be >= 1")
    offset = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    width = n - 1 if spec.kind == "Full" else spec.bands
    return ((offset >= 1) & (offset <= width)).astype(float)


def _band_width(spec: KernelSpec, n: int) -> int:
    return n - 1 if spec.kind == "Full" else min(spec.bands, n - 1)


def kernel_score(
    ssm: SelfSimilarityMatrix,
    start: int,
    end_excl: int,
    spec: KernelSpec,
    normalization: str = "segment_length",
) -> float:
    """Kernel-weighted sum over the segment crop, normalized.

    The segment covers bars start..end_excl-1 (1-based, 1 <= start <
    end_excl <= B+1).  With the default normalization the sum is divided
    by the segment length n; "kernel_count" divides by the number of
    nonzero kernel entries plus n instead.  Diagonal entries never
    contribute, so the score is invariant to any change of the diagonal.
    """
    n_bars = ssm.bar_count
    if not 1 <= start < end_excl <= n_bars + 1:
        raise ValueError(
            f"bad segment [{start}, {end_excl}) for a song of {n_bars} bars"
        )
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    n = end_excl - start
    s0 = start - 1
    width = _band_width(spec, n)
    total = 0.0
    for d in range(1, width + 1):
        total += float(np.diagonal(ssm.values, d)[s0 : s0 + n - d].sum())
    if normalization == "segment_length":
        denom = n
    else:
        denom = n + sum(2 * (n - d) for d in range(1, width + 1))
    return 2.0 * total / denom


def max_window8_score(
    ssm: SelfSimilarityMatrix,
    spec: KernelSpec,
    normalization: str = "segment_length",
) -> float:
    """Best kernel score over every window of size min(8, B).

    This is the per-song score ceiling used to weight penalties on the
    same scale as the scores themselves.
    """
    n_bars = ssm.bar_count
    w = min(REFERENCE_WINDOW, n_bars)
    return max(
        kernel_score(ssm, s, s + w, spec, normalization)
        for s in range(1, n_bars - w + 2)
    )
