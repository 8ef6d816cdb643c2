"""Synthetic block-structured songs with known boundaries.

Each section is a run of bars drawn as a shared archetype vector plus
independent Gaussian noise, so the self-similarity matrix of the song is
(near-)block-diagonal and the planted boundaries are the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barwise import BarwiseTF

# Archetypes are unit-norm, so noise_level is relative to the archetype norm.
MAX_PAIRWISE_COSINE = 0.1
SECONDS_PER_BAR = 2.0


@dataclass(frozen=True)
class SyntheticSongSpec:
    """Blueprint for one synthetic song.

    section_lengths gives the bar count of each section, in order.
    section_archetypes optionally maps sections to shared archetype labels
    (integers); by default every section gets its own archetype.  The
    feature dimensionality defaults to a small desk-test size rather than
    the production 96x80.
    """

    section_lengths: tuple[int, ...]
    section_archetypes: tuple[int, ...] | None = None
    noise_level: float = 0.0
    seed: int = 0
    frames_per_bar: int = 8
    feature_bins: int = 12

    def __post_init__(self):
        object.__setattr__(self, "section_lengths", tuple(int(n) for n in self.section_lengths))
        if not self.section_lengths or any(n < 1 for n in self.section_lengths):
            raise ValueError("section_lengths must be nonempty positive integers")
        if self.section_archetypes is not None:
            labels = tuple(int(a) for a in self.section_archetypes)
            object.__setattr__(self, "section_archetypes", labels)
            if len(labels) != len(self.section_lengths):
                raise ValueError("section_archetypes must match section_lengths in length")
        if self.noise_level < 0:
            raise ValueError("noise_level must be >= 0")


def _archetype_bank(n_archetypes: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random nonnegative unit vectors with pairwise cosine < 0.1.

    Disjoint sparse supports make distinct archetypes exactly orthogonal,
    which keeps the noiseless SSM exactly block-diagonal.  When the
    dimension cannot host disjoint supports, fall back to rejection on
    sparse random draws.
    """
    if n_archetypes == 0:
        return np.zeros((0, dim))
    if dim >= 2 * n_archetypes:
        # Entries of 0.5 at four disjoint positions (or a single 1.0 when
        # the slice is narrower) sum to a squared norm of exactly 1.0 in
        # float arithmetic, so the noiseless gram matrix holds exact ones
        # inside blocks and exact zeros outside.
        width = dim // n_archetypes
        perm = rng.permutation(dim)
        vecs = np.zeros((n_archetypes, dim))
        for i in range(n_archetypes):
            support = perm[i * width : (i + 1) * width]
            if width >= 4:
                vecs[i, rng.choice(support, size=4, replace=False)] = 0.5
            else:
                vecs[i, support[0]] = 1.0
    else:
        for _ in range(1000):
            vecs = rng.uniform(0.0, 1.0, size=(n_archetypes, dim))
            vecs *= rng.random(size=(n_archetypes, dim)) < 1.0 / max(2, n_archetypes)
            if np.all(np.linalg.norm(vecs, axis=1) > 0) and _max_offdiag_cosine(vecs) < MAX_PAIRWISE_COSINE:
                break
        else:
            raise ValueError(
                f"could not decorrelate {n_archetypes} archetypes in dimension {dim}"
            )
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    assert _max_offdiag_cosine(vecs) < MAX_PAIRWISE_COSINE
    return vecs


def _max_offdiag_cosine(vecs: np.ndarray) -> float:
    if vecs.shape[0] < 2:
        return 0.0
    unit = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    gram = unit @ unit.T
    np.fill_diagonal(gram, 0.0)
    return float(np.abs(gram).max())


def synth_block_song(spec: SyntheticSongSpec) -> tuple[BarwiseTF, tuple[int, ...]]:
    """Generate one song and its planted boundaries.

    Returns
    -------
    (BarwiseTF, boundaries)
        The feature matrix (with bar_times at a flat 2 s per bar) and the
        planted boundary indices (1, ..., B+1).  Same spec, same output.
    """
    rng = np.random.default_rng(spec.seed)
    labels = spec.section_archetypes or tuple(range(len(spec.section_lengths)))
    label_to_row = {lab: i for i, lab in enumerate(sorted(set(labels)))}
    bank = _archetype_bank(len(label_to_row), spec.frames_per_bar * spec.feature_bins, rng)

    blocks = []
    for length, label in zip(spec.section_lengths, labels):
        arch = bank[label_to_row[label]]
        noise = spec.noise_level * rng.standard_normal((length, arch.size))
        blocks.append(arch + noise)
    data = np.vstack(blocks)

    n_bars = data.shape[0]
    boundaries = (1,) + tuple(np.cumsum(spec.section_lengths) + 1)
    bar_times = tuple(SECONDS_PER_BAR * i for i in range(n_bars + 1))
    tf = BarwiseTF(
        data,
        frames_per_bar=spec.frames_per_bar,
        feature_bins=spec.feature_bins,
        bar_times=bar_times,
    )
    return tf, tuple(int(b) for b in boundaries)
