import json

import numpy as np
import pytest

from barseg import (
    BarwiseFileError,
    BarwiseTF,
    center_rows,
    load_barwise_tf,
    row_normalize_l2,
    save_barwise_tf,
)


def small_tf(rows, t=2, f=2, bar_times=None):
    return BarwiseTF(np.asarray(rows, float), frames_per_bar=t, feature_bins=f, bar_times=bar_times)


class TestBarwiseTF:
    def test_shape_contract(self):
        tf = small_tf([[1, 0, 0, 0], [0, 1, 0, 0]])
        assert tf.bar_count == 2
        assert tf.data.shape == (2, 4)

    def test_column_mismatch_rejected(self):
        with pytest.raises(ValueError, match="columns"):
            BarwiseTF(np.ones((2, 5)), frames_per_bar=2, feature_bins=2)

    def test_non_finite_rejected_with_location(self):
        data = np.ones((2, 4))
        data[1, 2] = np.nan
        with pytest.raises(ValueError, match="bar 2, column 3"):
            small_tf(data)

    def test_bar_times_length_checked(self):
        with pytest.raises(ValueError, match="bar_times"):
            small_tf(np.ones((2, 4)), bar_times=(0.0, 1.0))

    def test_bar_times_must_increase(self):
        with pytest.raises(ValueError, match="increasing"):
            small_tf(np.ones((2, 4)), bar_times=(0.0, 1.0, 1.0))


class TestFileRoundTrip:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        tf = BarwiseTF(rng.standard_normal((3, 8)), frames_per_bar=4, feature_bins=2,
                       bar_times=(0.0, 1.5, 3.0, 4.5))
        path = tmp_path / "song.csv"
        save_barwise_tf(tf, path)
        back = load_barwise_tf(path)
        assert np.array_equal(back.data, tf.data)
        assert back.frames_per_bar == 4 and back.feature_bins == 2
        assert back.bar_times == tf.bar_times

    def test_write_is_deterministic(self, tmp_path):
        tf = BarwiseTF(np.linspace(0, 1, 8).reshape(2, 4), frames_per_bar=2, feature_bins=2)
        save_barwise_tf(tf, tmp_path / "a.csv")
        save_barwise_tf(tf, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_header_declares_dims(self, tmp_path):
        tf = small_tf(np.ones((2, 4)))
        save_barwise_tf(tf, tmp_path / "song.csv")
        first = (tmp_path / "song.csv").read_text().splitlines()[0]
        assert first == "# B=2,T=2,F=2"

    def test_missing_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2,3,4\n")
        with pytest.raises(BarwiseFileError, match="header"):
            load_barwise_tf(p)

    def test_row_count_mismatch(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# B=3,T=2,F=2\n1,0,0,0\n0,1,0,0\n")
        with pytest.raises(BarwiseFileError, match="B=3.*2 data rows"):
            load_barwise_tf(p)

    def test_column_count_reported_with_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# B=2,T=2,F=2\n1,0,0,0\n0,1,0\n")
        with pytest.raises(BarwiseFileError, match="row 2"):
            load_barwise_tf(p)

    def test_bad_token_reported_with_row_and_column(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# B=2,T=2,F=2\n1,0,0,0\n0,oops,0,1\n")
        with pytest.raises(BarwiseFileError, match="row 2, column 2"):
            load_barwise_tf(p)

    def test_non_finite_cell_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# B=2,T=2,F=2\n1,0,0,0\n0,inf,0,1\n")
        with pytest.raises(BarwiseFileError, match="row 2, column 2"):
            load_barwise_tf(p)

    def test_extra_comment_lines_tolerated(self, tmp_path):
        p = tmp_path / "song.csv"
        p.write_text("# B=2,T=2,F=2\n# feature=logmel,sr=22050\n1,0,0,0\n0,1,0,0\n")
        assert load_barwise_tf(p).bar_count == 2

    def test_bad_sidecar_reported(self, tmp_path):
        p = tmp_path / "song.csv"
        p.write_text("# B=2,T=2,F=2\n1,0,0,0\n0,1,0,0\n")
        (tmp_path / "song.bars.json").write_text("{}")
        with pytest.raises(BarwiseFileError, match="sidecar"):
            load_barwise_tf(p)


class TestNormalization:
    def test_rows_become_unit(self):
        tf = small_tf([[3, 4, 0, 0], [0, 0, 5, 12]])
        out = row_normalize_l2(tf)
        assert np.allclose(np.linalg.norm(out.data, axis=1), 1.0)

    def test_zero_rows_pass_through(self):
        tf = small_tf([[0, 0, 0, 0], [1, 1, 1, 1]])
        out = row_normalize_l2(tf)
        assert np.array_equal(out.data[0], np.zeros(4))

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            data = rng.standard_normal((5, 4))
            data[rng.integers(0, 5)] = 0.0
            tf = small_tf(data)
            once = row_normalize_l2(tf)
            twice = row_normalize_l2(once)
            np.testing.assert_allclose(twice.data, once.data, rtol=1e-13, atol=0)

    def test_metadata_preserved(self):
        tf = small_tf(np.ones((2, 4)), bar_times=(0.0, 1.0, 2.0))
        assert row_normalize_l2(tf).bar_times == (0.0, 1.0, 2.0)
        assert center_rows(tf).frames_per_bar == 2


class TestCentering:
    def test_rows_sum_to_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            tf = small_tf(rng.uniform(-2, 2, size=(6, 4)))
            out = center_rows(tf)
            scale = max(1.0, float(np.abs(tf.data).max()))
            assert np.all(np.abs(out.data.sum(axis=0)) <= 1e-12 * scale * 6)

    def test_exact_small_case(self):
        tf = small_tf([[1, 0, 0, 0], [0, 1, 0, 0]])
        out = center_rows(tf)
        assert np.array_equal(out.data, np.array([[0.5, -0.5, 0, 0], [-0.5, 0.5, 0, 0]]))
