"""Bar-level self-similarity matrices.

Three similarity functions over the rows of a barwise TF matrix: plain
cosine, cosine of the mean-centered rows (autocorrelation), and a Gaussian
radial basis function over l2-normalized rows with a data-driven bandwidth.
All three return a symmetric matrix with the diagonal forced to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .barwise import BarwiseTF, center_rows, row_normalize_l2

SIMILARITY_KINDS = ("Cosine", "Autocorrelation", "RBF")

# Squared distances of unit vectors live in [0, 4]; a spread below this is
# floating-point residue of identical bars, not signal.
_DEGENERATE_STD = 1e-12


class DegenerateSimilarityError(ValueError):
    """Input has no usable pairwise variation (constant or empty signal)."""


@dataclass(frozen=True)
class SelfSimilarityMatrix:
    """Square symmetric bar-similarity matrix with unit diagonal.

    gamma is present (nonnegative) iff kind is RBF; gamma = 0.0 marks the
    degenerate all-ones fallback.
    """

    values: np.ndarray
    kind: str
    gamma: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.kind not in SIMILARITY_KINDS:
            raise ValueError(f"unknown similarity kind {self.kind!r}")
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"values must be square, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if not np.array_equal(values, values.T):
            raise ValueError("values must be exactly symmetric")
        if not np.all(np.diag(values) == 1.0):
            raise ValueError("diagonal must be exactly 1")
        if self.kind == "RBF":
            if self.gamma is None or self.gamma < 0:
                raise ValueError("RBF requires a nonnegative gamma")
            object.__setattr__(self, "gamma", float(self.gamma))
        elif self.gamma is not None:
            raise ValueError(f"gamma is only meaningful for RBF, not {self.kind}")

    @property
    def bar_count(self) -> int:
        return self.values.shape[0]


def _cosine_values(data: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1, keepdims=True)
    unit = data / np.where(norms == 0.0, 1.0, norms)
    values = unit @ unit.T
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 1.0)
    return values


def cosine_ssm(tf: BarwiseTF) -> SelfSimilarityMatrix:
    """Cosine similarity of the raw bars.

    Zero bars have similarity 0 to everything else; the self-similarity
    diagonal is forced to exactly 1 regardless.  Off-diagonal values lie in
    [-1, 1] up to rounding.
    """
    return SelfSimilarityMatrix(_cosine_values(tf.data), kind="Cosine")


def autocorrelation_ssm(tf: BarwiseTF) -> SelfSimilarityMatrix:
    """Cosine similarity after removing the mean bar.

    Requires at least 2 bars.  A constant input (every centered row is
    zero) carries no pairwise information and raises
    DegenerateSimilarityError.
    """
    if tf.bar_count < 2:
        raise ValueError("autocorrelation needs at least 2 bars")
    centered = center_rows(tf).data
    scale = float(np.linalg.norm(tf.data, axis=1).max())
    if np.all(np.linalg.norm(centered, axis=1) <= _DEGENERATE_STD * max(scale, 1.0)):
        raise DegenerateSimilarityError(
            "all bars are identical; centered similarity is undefined"
        )
    values = _cosine_values(centered)
    return SelfSimilarityMatrix(values, kind="Autocorrelation")


def _normalized_sq_distances(tf: BarwiseTF) -> np.ndarray:
    """Pairwise squared distances of l2-normalized bars.

    A zero bar normalizes to the zero vector, so its squared distance to
    any unit bar is 1 and to another zero bar is 0.
    """
    unit = row_normalize_l2(tf).data
    sq_norms = (np.linalg.norm(unit, axis=1) ** 2).round()  # exactly 0 or ~1
    gram = unit @ unit.T
    gram = (gram + gram.T) / 2.0
    sq = sq_norms[:, None] + sq_norms[None, :] - 2.0 * gram
    return np.maximum(sq, 0.0)


def rbf_gamma(tf: BarwiseTF) -> float:
    """Data-driven RBF bandwidth gamma = 1 / (2 sigma).

    sigma is the population standard deviation of the squared Euclidean
    distances between l2-normalized bars, over all ordered pairs i != j.

    Raises
    ------
    DegenerateSimilarityError
        If sigma is zero (all pairs equidistant, e.g. identical bars).
    """
    if tf.bar_count < 2:
        raise ValueError("rbf_gamma needs at least 2 bars")
    sq = _normalized_sq_distances(tf)
    off_diag = sq[~np.eye(tf.bar_count, dtype=bool)]
    sigma = float(np.std(off_diag))
    if sigma <= _DEGENERATE_STD:
        raise DegenerateSimilarityError(
            "zero spread of pairwise distances; RBF bandwidth is undefined"
        )
    return 1.0 / (2.0 * sigma)


def rbf_ssm(tf: BarwiseTF, gamma: float | None = None) -> SelfSimilarityMatrix:
    """Gaussian RBF similarity exp(-gamma * d^2) of l2-normalized bars.

    When gamma is None it is derived with rbf_gamma; a degenerate input
    falls back to the all-ones matrix, recorded with gamma = 0.0 (the
    parameter under which exp(-gamma * d^2) is identically 1).
    """
    if gamma is None:
        try:
            gamma = rbf_gamma(tf) if tf.bar_count >= 2 else 0.0
        except DegenerateSimilarityError:
            gamma = 0.0
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    values = np.exp(-gamma * _normalized_sq_distances(tf))
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 1.0)
    return SelfSimilarityMatrix(values, kind="RBF", gamma=float(gamma))


def build_ssm(tf: BarwiseTF, kind: str) -> SelfSimilarityMatrix:
    """Dispatch on the similarity kind (case-insensitive)."""
    table = {
        "cosine": cosine_ssm,
        "autocorrelation": autocorrelation_ssm,
        "rbf": rbf_ssm,
    }
    try:
        builder = table[kind.lower()]
    except (KeyError, AttributeError):
        raise ValueError(
            f"unknown similarity kind {kind!r}, expected one of {SIMILARITY_KINDS}"
        ) from None
    return builder(tf)


def save_ssm(ssm: SelfSimilarityMatrix, path) -> None:
    """Write the SSM CSV contract: '# kind=...,gamma=...' then B rows of B reals."""
    gamma = "none" if ssm.gamma is None else repr(float(ssm.gamma))
    out = [f"# kind={ssm.kind},gamma={gamma}"]
    for row in ssm.values:
        out.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def load_ssm(path) -> SelfSimilarityMatrix:
    """Read the SSM CSV contract written by save_ssm."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing '# kind=,gamma=' header")
    try:
        fields = dict(part.split("=") for part in lines[0].lstrip("#").strip().split(","))
        kind = fields["kind"]
        gamma = None if fields["gamma"] == "none" else float(fields["gamma"])
    except (ValueError, KeyError) as exc:
        raise ValueError(f"{path}: malformed header {lines[0]!r}") from exc
    rows = [ln for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    values = np.array([np.asarray(r.split(","), dtype=float) for r in rows])
    return SelfSimilarityMatrix(values, kind=kind, gamma=gamma)
