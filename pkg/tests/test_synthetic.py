import numpy as np
import pytest

from barseg import SyntheticSongSpec, cosine_ssm, synth_block_song


class TestSyntheticSongs:
    def test_bar_count_is_sum_of_sections(self):
        tf, truth = synth_block_song(SyntheticSongSpec((4, 8, 12), seed=0))
        assert tf.bar_count == 24
        assert truth == (1, 5, 13, 25)

    def test_bar_times_cover_all_bars(self):
        tf, _ = synth_block_song(SyntheticSongSpec((3, 3), seed=1))
        assert len(tf.bar_times) == 7
        assert all(b > a for a, b in zip(tf.bar_times, tf.bar_times[1:]))

    def test_deterministic_per_seed(self):
        spec = SyntheticSongSpec((4, 4), noise_level=0.1, seed=42)
        a, _ = synth_block_song(spec)
        b, _ = synth_block_song(spec)
        assert np.array_equal(a.data, b.data)

    def test_noiseless_cosine_is_exactly_block_diagonal(self):
        tf, _ = synth_block_song(SyntheticSongSpec((8, 8), noise_level=0.0, seed=5))
        values = cosine_ssm(tf).values
        assert np.array_equal(values[:8, 8:], np.zeros((8, 8)))
        assert np.array_equal(values[:8, :8], np.ones((8, 8)))
        assert np.array_equal(values[8:, 8:], np.ones((8, 8)))

    def test_archetypes_decorrelated_across_seeds(self):
        for seed in range(25):
            tf, _ = synth_block_song(
                SyntheticSongSpec((1, 1, 1, 1, 1, 1), noise_level=0.0, seed=seed)
            )
            gram = cosine_ssm(tf).values
            off = gram[~np.eye(6, dtype=bool)]
            assert np.abs(off).max() < 0.1

    def test_shared_archetype_labels(self):
        tf, _ = synth_block_song(
            SyntheticSongSpec((2, 2, 2), section_archetypes=(0, 1, 0), noise_level=0.0, seed=9)
        )
        values = cosine_ssm(tf).values
        # sections 1 and 3 share an archetype, section 2 differs
        assert values[0, 4] == pytest.approx(1.0)
        assert abs(values[0, 2]) < 0.1

    def test_validation(self):
        with pytest.raises(ValueError):
            SyntheticSongSpec(())
        with pytest.raises(ValueError):
            SyntheticSongSpec((4, 0))
        with pytest.raises(ValueError):
            SyntheticSongSpec((4, 4), section_archetypes=(0,))
        with pytest.raises(ValueError):
            SyntheticSongSpec((4,), noise_level=-1.0)
