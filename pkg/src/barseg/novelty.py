"""Checkerboard-kernel novelty baseline.

Slides a zero-sum checkerboard kernel along the main diagonal of the
self-similarity matrix; the response peaks where two homogeneous blocks
meet.  Peak picking on the (optionally smoothed) curve yields boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d, median_filter

from .segmenter import Segmentation
from .similarity import SelfSimilarityMatrix


@dataclass(frozen=True)
class NoveltyConfig:
    """kernel_size must be even.  smoothing_sigma 0 and median_width 1
    leave the curve and the matrix untouched."""

    kernel_size: int = 16
    gaussian_taper: bool = True
    smoothing_sigma: float = 0.0
    median_width: int = 1
    peak_threshold: float = 0.1

    def __post_init__(self):
        if self.kernel_size < 2 or self.kernel_size % 2 != 0:
            raise ValueError("kernel_size must be even and >= 2")
        if self.smoothing_sigma < 0:
            raise ValueError("smoothing_sigma must be >= 0")
        if self.median_width < 1:
            raise ValueError("median_width must be >= 1")
        if not 0.0 <= self.peak_threshold <= 1.0:
            raise ValueError("peak_threshold must be in [0, 1]")


def checkerboard_kernel(size: int, taper: bool = True) -> np.ndarray:
    """Checkerboard of +1 same-side / -1 cross quadrants, zero-sum.

    With taper the signs are weighted by a radial Gaussian centered
    mid-kernel with std = size/4, so entries far from the crossing point
    contribute less.
    """
    if size < 2 or size % 2 != 0:
        raise ValueError("size must be even and >= 2")
    half = size // 2
    kernel = np.ones((size, size))
    kernel[:half, half:] = -1.0
    kernel[half:, :half] = -1.0
    if taper:
        center = (size - 1) / 2.0
        sigma = size / 4.0
        grid = np.arange(size) - center
        radial = np.exp(-(grid[:, None] ** 2 + grid[None, :] ** 2) / (2.0 * sigma**2))
        kernel *= radial
    return kernel


def novelty_curve(ssm: SelfSimilarityMatrix, config: NoveltyConfig = NoveltyConfig()) -> np.ndarray:
    """Novelty value at each bar (index b-1 holds bar b).

    The matrix is reflection-padded by half the kernel so every bar gets a
    full window; the kernel's crossing point sits at the boundary between
    bar b-1 and bar b.  Linear in the input as long as median_width is 1.
    """
    values = ssm.values
    if config.median_width > 1:
        values = median_filter(values, size=config.median_width)
    half = config.kernel_size // 2
    kernel = checkerboard_kernel(config.kernel_size, config.gaussian_taper)
    padded = np.pad(values, half, mode="reflect")
    n_bars = values.shape[0]
    curve = np.empty(n_bars)
    for b in range(n_bars):
        window = padded[b : b + config.kernel_size, b : b + config.kernel_size]
        curve[b] = float(np.sum(window * kernel))
    if config.smoothing_sigma > 0:
        curve = gaussian_filter1d(curve, config.smoothing_sigma)
    return curve


def pick_peaks(curve: np.ndarray, config: NoveltyConfig = NoveltyConfig()) -> Segmentation:
    """Boundaries at strict local maxima above a fraction of the global max.

    On a plateau of two equal maxima only the first survives (the rise
    into the plateau must be strict).  Boundaries 1 and B+1 are always
    present; total_score is the sum of the curve at the interior picks,
    recorded for inspection only.
    """
    curve = np.asarray(curve, dtype=float)
    n_bars = curve.size
    peaks = []
    picked_mass = 0.0
    top = float(curve.max()) if n_bars else 0.0
    if top > 0:
        threshold = config.peak_threshold * top
        for i in range(1, n_bars - 1):
            if curve[i] > curve[i - 1] and curve[i] >= curve[i + 1] and curve[i] >= threshold:
                peaks.append(i + 1)  # curve index i sits at boundary i+1
                picked_mass += float(curve[i])
    return Segmentation((1, *peaks, n_bars + 1), picked_mass)


def foote_segmentation(
    ssm: SelfSimilarityMatrix, config: NoveltyConfig = NoveltyConfig()
) -> Segmentation:
    return pick_peaks(novelty_curve(ssm, config), config)
