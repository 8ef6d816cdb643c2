"""Acceptance suite.

One test per acceptance criterion; each prints a single [PASS]/[FAIL]
line (run with -s to see them all).  The dataset-reproduction checks need
external corpora and skip unless the corresponding environment variables
point at them; the audio-ingestion round trip lives in the ingest/
package and runs under its own test runner.
"""

import os
import time
from collections import Counter
from functools import lru_cache

import numpy as np
import pytest

from barseg import (
    AnnotationSet,
    KernelSpec,
    PenaltySpec,
    SegmenterConfig,
    SegmentScorer,
    SelfSimilarityMatrix,
    SyntheticSongSpec,
    align_to_downbeats,
    barwise_hit_rate,
    brute_force_segmentation,
    hit_rate,
    load_annotations,
    load_barwise_tf,
    max_matching_size,
    modulo8,
    optimal_boundaries_from_scores,
    optimal_segmentation,
    rbf_ssm,
    segment_barwise_tf,
    synth_block_song,
)
from barseg.barwise import BarwiseTF


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def random_unit_diag_ssm(rng, n):
    values = rng.uniform(-1.0, 1.0, size=(n, n))
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 1.0)
    return SelfSimilarityMatrix(values, kind="Cosine")


# sizes are drawn 8-heavy, mirroring how often annotated pop sections
# actually hit the 8-bar archetype; see the CLI synth mode
SECTION_SIZES = (4, 8, 12, 16)
SECTION_WEIGHTS = (0.22, 0.66, 0.06, 0.06)


def draw_corpus(n_songs, rng, noise, sizes=SECTION_SIZES, weights=SECTION_WEIGHTS):
    songs = []
    for _ in range(n_songs):
        n_sections = int(rng.integers(4, 7))
        lengths = tuple(int(rng.choice(sizes, p=weights)) for _ in range(n_sections))
        spec = SyntheticSongSpec(
            section_lengths=lengths,
            noise_level=noise,
            seed=int(rng.integers(0, 2**31)),
        )
        songs.append(synth_block_song(spec))
    return songs


def test_dp_optimality_matches_exhaustive_search():
    started = time.monotonic()
    rng = np.random.default_rng(101)
    kernels = (
        KernelSpec("Full", None),
        KernelSpec("Band", 1),
        KernelSpec("Band", 3),
        KernelSpec("Band", 7),
    )
    penalties = []
    for kind in ("None", "TargetDeviation", "Modulo8"):
        alphas = (0.5, 1.0, 2.0) if kind == "TargetDeviation" else (1.0,)
        for alpha in alphas:
            for lam in (0.0, 0.04, 0.2):
                penalties.append(PenaltySpec(kind=kind, tau=8, alpha=alpha, lam=lam))
    assert len(penalties) == 15

    checked = 0
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 13))
        ssm = random_unit_diag_ssm(rng, n)
        for kernel in kernels:
            scorer = SegmentScorer(ssm, kernel)
            for penalty in penalties:
                for form in ("normalized", "raw"):
                    config = SegmenterConfig(kernel=kernel, penalty=penalty, score_form=form)
                    dp = optimal_segmentation(ssm, config, scorer=scorer)
                    bf = brute_force_segmentation(ssm, config, scorer=scorer)
                    gap = abs(dp.total_score - bf.total_score)
                    worst = max(worst, gap)
                    checked += 1
                    if gap > 1e-9:
                        report(
                            "dp-optimality",
                            False,
                            f"B={n} kernel={kernel} penalty={penalty} form={form}: "
                            f"dp {dp.total_score!r} vs exhaustive {bf.total_score!r}",
                        )
    elapsed = time.monotonic() - started
    report(
        "dp-optimality",
        worst <= 1e-9 and elapsed < 60,
        f"{checked} instances, worst gap {worst:.2e}, {elapsed:.1f}s (budget 60s)",
    )


def test_worked_four_boundary_example():
    arcs = {(1, 2): 2.0, (1, 3): 6.0, (1, 4): 8.0, (2, 3): 1.0, (2, 4): 1.0, (3, 4): 4.0}
    result = optimal_boundaries_from_scores(lambda a, b: arcs[(a, b)], 3, 32)
    ok = result.boundaries == (1, 3, 4) and result.total_score == 10.0
    report(
        "worked-example",
        ok,
        f"boundaries {result.boundaries}, total {result.total_score}",
    )


def test_size_penalty_table():
    expected = {8: 0.0, 4: 0.25, 12: 0.25, 16: 0.25, 2: 0.5, 6: 0.5, 7: 1.0, 9: 1.0}
    got = {n: modulo8(n) for n in expected}
    report("size-penalty-table", got == expected, f"{got}")


def test_planted_structure_recovery():
    started = time.monotonic()
    rng = np.random.default_rng(20240815)
    songs = draw_corpus(50, rng, noise=0.04)
    config = SegmenterConfig()  # RBF, 7-band, size penalty at 0.04
    scores = []
    for tf, truth in songs:
        seg = segment_barwise_tf(tf, config)
        scores.append(barwise_hit_rate(seg.boundaries, truth, 0).f_measure)
    mean_f = float(np.mean(scores))
    elapsed = time.monotonic() - started
    report(
        "planted-recovery",
        mean_f >= 0.95 and elapsed < 120,
        f"mean exact-bar F {mean_f:.4f} over 50 songs (need >= 0.95), "
        f"{elapsed:.1f}s (budget 120s)",
    )


def test_band_count_biases_segment_size():
    rng = np.random.default_rng(77)
    songs = draw_corpus(50, rng, noise=0.04, sizes=(8,), weights=(1.0,))
    fractions = {}
    for v in (3, 7, 15):
        config = SegmenterConfig(
            kernel=KernelSpec("Band", v), penalty=PenaltySpec(kind="None")
        )
        hits = 0
        for tf, _ in songs:
            seg = segment_barwise_tf(tf, config)
            counts = Counter(seg.segment_sizes())
            top = max(counts.values())
            modal = min(size for size, c in counts.items() if c == top)
            hits += modal == v + 1
        fractions[v] = hits / len(songs)
    ok = fractions[3] >= 0.6 and fractions[7] >= 0.6
    report(
        "band-bias",
        ok,
        "modal size v+1 fraction: "
        + ", ".join(f"v={v}: {frac:.2f}" for v, frac in fractions.items())
        + " (need >= 0.60 for v=3 and v=7)",
    )


def exhaustive_matching(est, ann, tolerance):
    allowed = [
        tuple(j for j, a in enumerate(ann) if abs(e - a) <= tolerance) for e in est
    ]

    @lru_cache(maxsize=None)
    def best(i, mask):
        if i == len(est):
            return 0
        top = best(i + 1, mask)
        for j in allowed[i]:
            if not mask & (1 << j):
                top = max(top, 1 + best(i + 1, mask | (1 << j)))
        return top

    return best(0, 0)


def test_matching_oracle_and_metric_properties():
    rng = np.random.default_rng(4242)
    for trial in range(500):
        est = sorted(rng.uniform(0, 40, size=int(rng.integers(1, 13))))
        ann = sorted(rng.uniform(0, 40, size=int(rng.integers(1, 13))))
        tol = float(rng.uniform(0.05, 5.0))
        matched = max_matching_size(est, ann, tol)
        oracle = exhaustive_matching(tuple(est), tuple(ann), tol)
        if matched != oracle:
            report(
                "matching-oracle",
                False,
                f"trial {trial}: matched {matched} vs exhaustive {oracle}",
            )
        wider = max_matching_size(est, ann, tol + float(rng.uniform(0, 3)))
        if wider < matched:
            report("matching-oracle", False, f"trial {trial}: tolerance not monotone")
        fwd = hit_rate(est, ann, tol)
        rev = hit_rate(ann, est, tol)
        if (fwd.precision, fwd.recall) != (rev.recall, rev.precision):
            report("matching-oracle", False, f"trial {trial}: swap asymmetry")
    report(
        "matching-oracle",
        True,
        "500 random pairs: matched == exhaustive max matching, "
        "tolerance monotone, precision/recall swap symmetric",
    )


def normalized_sq_distances(data):
    norms = np.linalg.norm(data, axis=1, keepdims=True)
    unit = np.divide(data, norms, out=np.zeros_like(data), where=norms > 0)
    diff = unit[:, None, :] - unit[None, :, :]
    return np.sum(diff * diff, axis=2)


def test_rbf_matrix_invariants():
    rng = np.random.default_rng(9)
    for trial in range(100):
        n = int(rng.integers(2, 16))
        t, f = int(rng.integers(2, 6)), int(rng.integers(2, 8))
        data = rng.normal(0, float(rng.uniform(0.5, 10)), size=(n, t * f))
        if trial % 7 == 0:
            data[int(rng.integers(0, n))] = 0.0  # silent bar
        if trial % 5 == 0 and n >= 3:
            data[1] = data[0]  # duplicated bar
        ssm = rbf_ssm(BarwiseTF(data, frames_per_bar=t, feature_bins=f))
        values = ssm.values
        ok = (
            np.array_equal(values, values.T)
            and np.all(np.diag(values) == 1.0)
            and np.all(values > 0)
            and np.all(values <= 1)
        )
        if not ok:
            report("rbf-invariants", False, f"trial {trial}: basic invariants broken")
        # monotone: strictly larger normalized distance, strictly smaller value
        dist = normalized_sq_distances(data)
        iu = np.triu_indices(n, k=1)
        order = np.argsort(dist[iu], kind="stable")
        d_sorted = dist[iu][order]
        v_sorted = values[iu][order]
        for a, b in zip(range(len(order) - 1), range(1, len(order))):
            if d_sorted[b] > d_sorted[a] + 1e-12 and not v_sorted[b] < v_sorted[a]:
                report(
                    "rbf-invariants",
                    False,
                    f"trial {trial}: value did not decrease with distance",
                )
    report(
        "rbf-invariants",
        True,
        "100 random inputs: symmetric, unit diagonal, values in (0,1], "
        "monotone in normalized distance",
    )


def _dataset_mean_f(dataset_dir):
    config = SegmenterConfig()
    f0, f1 = [], []
    csvs = sorted(p for p in dataset_dir.glob("*.csv") if not p.name.endswith(".ann.csv"))
    if not csvs:
        raise ValueError(f"no feature files under {dataset_dir}")
    for path in csvs:
        tf = load_barwise_tf(path)
        if tf.bar_times is None:
            raise ValueError(f"{path}: needs a bars sidecar")
        ann_path = None
        for ext in (".ann.json", ".ann.csv"):
            candidate = path.with_name(path.name[: -len(".csv")] + ext)
            if candidate.exists():
                ann_path = candidate
                break
        if ann_path is None:
            raise ValueError(f"{path}: no annotation file")
        ann = align_to_downbeats(load_annotations(ann_path), tf.bar_times)
        seg = segment_barwise_tf(tf, config)
        f0.append(barwise_hit_rate(seg.boundaries, ann.boundaries_bars, 0).f_measure)
        f1.append(barwise_hit_rate(seg.boundaries, ann.boundaries_bars, 1).f_measure)
    return 100 * float(np.mean(f0)), 100 * float(np.mean(f1))


@pytest.mark.parametrize(
    "env_var,expected_f0,expected_f1",
    [
        ("BARSEG_RWC_DIR", 65.17, 81.02),
        ("BARSEG_SALAMI_DIR", 45.44, 60.09),
    ],
)
def test_dataset_reproduction(env_var, expected_f0, expected_f1):
    dataset = os.environ.get(env_var)
    if not dataset:
        print(f"[SKIP] dataset-reproduction: set {env_var} to run")
        pytest.skip(f"{env_var} not set; dataset checks are optional")
    from pathlib import Path

    f0, f1 = _dataset_mean_f(Path(dataset))
    ok = abs(f0 - expected_f0) <= 2.0 and abs(f1 - expected_f1) <= 2.0
    report(
        f"dataset-reproduction[{env_var}]",
        ok,
        f"F0 {f0:.2f} (target {expected_f0}+-2), F1 {f1:.2f} (target {expected_f1}+-2)",
    )


def test_audio_ingest_round_trip_lives_elsewhere():
    print("[SKIP] audio-ingest: covered by the ingest/ package test suite (npm test)")
    pytest.skip("audio ingestion ships as the separate ingest/ package")
