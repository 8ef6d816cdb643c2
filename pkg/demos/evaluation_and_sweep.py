"""Score segmentations against annotations and sweep the penalty weight.

Builds a small synthetic corpus, evaluates the default segmenter at the
usual tolerances, then grid-searches lambda and prints the F curve.
"""

import numpy as np

from barseg import (
    AnnotationSet,
    SegmenterConfig,
    SyntheticSongSpec,
    barwise_hit_rate,
    build_ssm,
    evaluate_boundaries,
    lambda_sweep,
    segment_barwise_tf,
    synth_block_song,
)

rng = np.random.default_rng(5)
config = SegmenterConfig()

corpus = []
for _ in range(12):
    n_sections = int(rng.integers(4, 7))
    lengths = tuple(int(rng.choice((4, 8, 12, 16), p=(0.22, 0.66, 0.06, 0.06))) for _ in range(n_sections))
    tf, truth = synth_block_song(
        SyntheticSongSpec(lengths, noise_level=0.04, seed=int(rng.integers(2**31)))
    )
    corpus.append((tf, truth))

# per-song report for the first song
tf, truth = corpus[0]
seg = segment_barwise_tf(tf, config)
ann = AnnotationSet(tuple(tf.bar_times[b - 1] for b in truth), boundaries_bars=truth)
report = evaluate_boundaries(seg, ann, tf.bar_times, absolute_reference="original")
print("song 0 estimated:", seg.boundaries)
print("song 0 planted:  ", truth)
for label, rate in report.per_tolerance.items():
    print(f"  {label:>5}: P {rate.precision:.2f}  R {rate.recall:.2f}  F {rate.f_measure:.2f}")

# corpus-level exact-bar F with the default lambda
scores = [
    barwise_hit_rate(segment_barwise_tf(tf, config).boundaries, truth, 0).f_measure
    for tf, truth in corpus
]
print(f"\nmean exact-bar F at lambda 0.04: {np.mean(scores):.3f}")

# now let the sweep pick lambda on the same corpus
sweep_corpus = []
for tf, truth in corpus:
    ann = AnnotationSet(tuple(tf.bar_times[b - 1] for b in truth), boundaries_bars=truth)
    sweep_corpus.append((build_ssm(tf, config.similarity), ann, tf.bar_times))

best, reports = lambda_sweep(sweep_corpus, config)
print(f"\nbest lambda on this corpus: {best}")
print("lambda -> mean F (exact bar):")
for lam in sorted(reports):
    f = reports[lam].per_tolerance["0bar"].f_measure
    bar = "#" * int(round(40 * f))
    print(f"  {lam:.2f}  {f:.3f}  {bar}")
