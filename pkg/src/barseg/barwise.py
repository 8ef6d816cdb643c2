"""Barwise time-frequency representation and its on-disk format.

A song is represented as a matrix with one row per bar.  Each row is the
vectorization of a rectangular time-frequency patch of ``frames_per_bar``
frames by ``feature_bins`` bins, so the matrix has shape
``(bar_count, frames_per_bar * feature_bins)``.  Bars are numbered from 1
throughout the package; a song with B bars has boundary indices 1..B+1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_FRAMES_PER_BAR = 96
DEFAULT_FEATURE_BINS = 80


class BarwiseFileError(ValueError):
    """Raised when a barwise feature file or its sidecar cannot be parsed."""


@dataclass(frozen=True)
class BarwiseTF:
    """Barwise time-frequency matrix.

    Parameters
    ----------
    data : np.ndarray
        Shape (B, frames_per_bar * feature_bins), finite reals.  Treated as
        immutable after construction; operations return new instances.
    frames_per_bar : int
        Frames per bar (T). Default 96.
    feature_bins : int
        Feature bins per frame (F). Default 80.
    bar_times : tuple of float, optional
        Downbeat instants in seconds, length B + 1, strictly increasing.
    """

    data: np.ndarray
    frames_per_bar: int = DEFAULT_FRAMES_PER_BAR
    feature_bins: int = DEFAULT_FEATURE_BINS
    bar_times: tuple[float, ...] | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        object.__setattr__(self, "data", data)
        if self.frames_per_bar < 1 or self.feature_bins < 1:
            raise ValueError("frames_per_bar and feature_bins must be >= 1")
        if data.ndim != 2:
            raise ValueError(f"data must be 2-D, got ndim={data.ndim}")
        tf = self.frames_per_bar * self.feature_bins
        if data.shape[1] != tf:
            raise ValueError(
                f"data has {data.shape[1]} columns, expected "
                f"frames_per_bar*feature_bins = {tf}"
            )
        if not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValueError(
                f"non-finite value at bar {bad[0] + 1}, column {bad[1] + 1}"
            )
        if self.bar_times is not None:
            times = tuple(float(t) for t in self.bar_times)
            object.__setattr__(self, "bar_times", times)
            if len(times) != data.shape[0] + 1:
                raise ValueError(
                    f"bar_times has {len(times)} entries, expected "
                    f"bar_count+1 = {data.shape[0] + 1}"
                )
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError("bar_times must be strictly increasing")

    @property
    def bar_count(self) -> int:
        return self.data.shape[0]


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".bars.json")


def load_barwise_tf(path) -> BarwiseTF:
    """Load a barwise feature matrix from CSV.

    The first line must be a header comment ``# B=<int>,T=<int>,F=<int>``,
    followed by B data rows of T*F comma-separated reals.  Additional
    comment lines (starting with ``#``) between header and data are
    ignored, so producers may embed provenance.  If a sidecar
    ``<name>.bars.json`` with ``{"bar_times": [...]}`` exists next to the
    file it is attached to the result.

    Raises
    ------
    BarwiseFileError
        On a malformed header, row/column count mismatch, an unparsable or
        non-finite cell (the message names the row and column), or a bad
        sidecar.
    """
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise BarwiseFileError(f"{path}: cannot read file: {exc}") from exc

    lines = raw.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise BarwiseFileError(f"{path}: missing '# B=,T=,F=' header on line 1")
    header = lines[0].lstrip("#").strip()
    fields = {}
    try:
        for part in header.split(","):
            key, value = part.split("=")
            fields[key.strip()] = int(value)
        n_bars, t, f = fields["B"], fields["T"], fields["F"]
    except (ValueError, KeyError) as exc:
        raise BarwiseFileError(
            f"{path}: malformed header {lines[0]!r}, expected '# B=<int>,T=<int>,F=<int>'"
        ) from exc

    data_lines = [ln for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    if len(data_lines) != n_bars:
        raise BarwiseFileError(
            f"{path}: header declares B={n_bars} but found {len(data_lines)} data rows"
        )

    rows = np.empty((n_bars, t * f), dtype=float)
    for i, line in enumerate(data_lines):
        parts = line.split(",")
        if len(parts) != t * f:
            raise BarwiseFileError(
                f"{path}: row {i + 1} has {len(parts)} columns, expected T*F = {t * f}"
            )
        try:
            rows[i] = np.asarray(parts, dtype=float)
        except ValueError:
            for j, tok in enumerate(parts):
                try:
                    float(tok)
                except ValueError:
                    raise BarwiseFileError(
                        f"{path}: row {i + 1}, column {j + 1}: cannot parse {tok.strip()!r}"
                    ) from None
            raise
    if not np.all(np.isfinite(rows)):
        i, j = np.argwhere(~np.isfinite(rows))[0]
        raise BarwiseFileError(
            f"{path}: row {i + 1}, column {j + 1}: non-finite value"
        )

    bar_times = None
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        try:
            payload = json.loads(sidecar.read_text())
            bar_times = tuple(float(x) for x in payload["bar_times"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise BarwiseFileError(f"{sidecar}: bad sidecar: {exc}") from exc

    try:
        return BarwiseTF(rows, frames_per_bar=t, feature_bins=f, bar_times=bar_times)
    except ValueError as exc:
        raise BarwiseFileError(f"{path}: {exc}") from exc


def save_barwise_tf(tf: BarwiseTF, path) -> None:
    """Write the CSV contract (and the bar-times sidecar when present).

    Floats are written with shortest round-trip repr, so identical inputs
    produce byte-identical files.
    """
    path = Path(path)
    out = [f"# B={tf.bar_count},T={tf.frames_per_bar},F={tf.feature_bins}"]
    for row in tf.data:
        out.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(out) + "\n")
    if tf.bar_times is not None:
        _sidecar_path(path).write_text(
            json.dumps({"bar_times": list(tf.bar_times)}) + "\n"
        )


def row_normalize_l2(tf: BarwiseTF) -> BarwiseTF:
    """Scale every bar to unit l2 norm; zero bars pass through unchanged.

    Idempotent up to floating-point rounding.
    """
    norms = np.linalg.norm(tf.data, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return BarwiseTF(
        tf.data / safe,
        frames_per_bar=tf.frames_per_bar,
        feature_bins=tf.feature_bins,
        bar_times=tf.bar_times,
    )


def center_rows(tf: BarwiseTF) -> BarwiseTF:
    """Subtract the mean bar, so the rows of the result sum to zero."""
    return BarwiseTF(
        tf.data - tf.data.mean(axis=0),
        frames_per_bar=tf.frames_per_bar,
        feature_bins=tf.feature_bins,
        bar_times=tf.bar_times,
    )
