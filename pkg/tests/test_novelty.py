import numpy as np
import pytest
from scipy.ndimage import gaussian_filter1d

from barseg import (
    NoveltyConfig,
    SelfSimilarityMatrix,
    SyntheticSongSpec,
    checkerboard_kernel,
    cosine_ssm,
    foote_segmentation,
    novelty_curve,
    pick_peaks,
    synth_block_song,
)


def block_ssm(first_block, n):
    values = np.zeros((n, n))
    values[:first_block, :first_block] = 1.0
    values[first_block:, first_block:] = 1.0
    np.fill_diagonal(values, 1.0)
    return SelfSimilarityMatrix(values, kind="Cosine")


def ones_ssm(n):
    return SelfSimilarityMatrix(np.ones((n, n)), kind="Cosine")


class TestCheckerboardKernel:
    def test_plain_size_two(self):
        assert np.array_equal(
            checkerboard_kernel(2, taper=False), np.array([[1.0, -1.0], [-1.0, 1.0]])
        )

    def test_zero_sum(self):
        for size in (2, 4, 8, 16):
            assert checkerboard_kernel(size, taper=False).sum() == 0.0
            assert abs(checkerboard_kernel(size, taper=True).sum()) < 1e-12

    def test_symmetric(self):
        for taper in (False, True):
            kernel = checkerboard_kernel(8, taper)
            assert np.array_equal(kernel, kernel.T)

    def test_taper_downweights_corners(self):
        kernel = checkerboard_kernel(16, taper=True)
        assert abs(kernel[0, 0]) < abs(kernel[7, 7])
        assert abs(kernel[0, 0]) < 0.1

    def test_bad_sizes(self):
        for size in (0, 1, 3, 7):
            with pytest.raises(ValueError):
                checkerboard_kernel(size)


class TestNoveltyConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoveltyConfig(kernel_size=7)
        with pytest.raises(ValueError):
            NoveltyConfig(smoothing_sigma=-1.0)
        with pytest.raises(ValueError):
            NoveltyConfig(median_width=0)
        with pytest.raises(ValueError):
            NoveltyConfig(peak_threshold=1.5)


class TestNoveltyCurve:
    def test_homogeneous_song_is_flat_zero(self):
        for taper in (False, True):
            curve = novelty_curve(ones_ssm(20), NoveltyConfig(gaussian_taper=taper))
            assert np.allclose(curve, 0.0, atol=1e-9)

    def test_crossing_response_value(self):
        # at the block crossing the two +1 quadrants each cover a
        # half-kernel of ones and the -1 quadrants cover zeros, so the
        # plain kernel responds with exactly 2*(K/2)^2
        curve = novelty_curve(
            block_ssm(8, 16), NoveltyConfig(kernel_size=8, gaussian_taper=False)
        )
        assert curve[8] == 32.0
        assert int(np.argmax(curve)) == 8

    def test_two_block_argmax_at_the_seam(self):
        for first, n, size in [(6, 12, 8), (10, 20, 16), (5, 16, 8)]:
            for taper in (False, True):
                config = NoveltyConfig(kernel_size=size, gaussian_taper=taper)
                curve = novelty_curve(block_ssm(first, n), config)
                assert int(np.argmax(curve)) == first

    def test_linear_in_the_matrix(self):
        rng = np.random.default_rng(8)
        a = rng.uniform(-1, 1, (15, 15))
        a = (a + a.T) / 2
        np.fill_diagonal(a, 1.0)
        b = rng.uniform(-1, 1, (15, 15))
        b = (b + b.T) / 2
        np.fill_diagonal(b, 1.0)
        config = NoveltyConfig(kernel_size=8)
        mid = novelty_curve(SelfSimilarityMatrix((a + b) / 2, kind="Cosine"), config)
        ca = novelty_curve(SelfSimilarityMatrix(a, kind="Cosine"), config)
        cb = novelty_curve(SelfSimilarityMatrix(b, kind="Cosine"), config)
        assert np.allclose(mid, (ca + cb) / 2, atol=1e-12)

    def test_smoothing_matches_gaussian_filter(self):
        ssm = block_ssm(6, 14)
        raw = novelty_curve(ssm, NoveltyConfig(kernel_size=8, smoothing_sigma=0.0))
        smoothed = novelty_curve(ssm, NoveltyConfig(kernel_size=8, smoothing_sigma=2.0))
        assert np.allclose(smoothed, gaussian_filter1d(raw, 2.0))

    def test_median_filter_suppresses_outlier(self):
        values = np.ones((20, 20))
        values[4, 8] = values[8, 4] = -1.0
        ssm = SelfSimilarityMatrix(values, kind="Cosine")
        spiky = novelty_curve(ssm, NoveltyConfig(kernel_size=8))
        cleaned = novelty_curve(ssm, NoveltyConfig(kernel_size=8, median_width=3))
        assert np.abs(spiky).max() > 0.1
        assert np.allclose(cleaned, 0.0, atol=1e-9)


class TestPickPeaks:
    def test_plateau_keeps_first(self):
        seg = pick_peaks(np.array([0.0, 5.0, 5.0, 0.0, 0.0]))
        assert seg.boundaries == (1, 2, 6)
        assert seg.total_score == 5.0

    def test_threshold_rejects_small_bumps(self):
        seg = pick_peaks(np.array([0.0, 0.5, 0.0, 10.0, 0.0]), NoveltyConfig(peak_threshold=0.1))
        assert seg.boundaries == (1, 4, 6)

    def test_threshold_zero_keeps_all_rises(self):
        seg = pick_peaks(np.array([0.0, 0.5, 0.0, 10.0, 0.0]), NoveltyConfig(peak_threshold=0.0))
        assert seg.boundaries == (1, 2, 4, 6)

    def test_flat_or_nonpositive_curve_yields_trivial_segmentation(self):
        assert pick_peaks(np.zeros(9)).boundaries == (1, 10)
        assert pick_peaks(np.full(9, -2.0)).boundaries == (1, 10)

    def test_endpoints_never_peaks(self):
        seg = pick_peaks(np.array([9.0, 1.0, 1.0, 9.0]))
        assert seg.boundaries == (1, 5)


class TestFooteSegmentation:
    def test_recovers_two_section_song(self):
        tf, truth = synth_block_song(SyntheticSongSpec((8, 8), noise_level=0.02, seed=3))
        ssm = cosine_ssm(tf)
        for size in (8, 16):
            seg = foote_segmentation(ssm, NoveltyConfig(kernel_size=size))
            assert seg.boundaries == truth

    def test_homogeneous_song_stays_whole(self):
        tf, _ = synth_block_song(SyntheticSongSpec((16,), noise_level=0.0, seed=1))
        seg = foote_segmentation(cosine_ssm(tf), NoveltyConfig(kernel_size=8))
        assert seg.boundaries == (1, 17)
