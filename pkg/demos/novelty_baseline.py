"""Checkerboard novelty curve on a block song, with a crude terminal plot."""

import numpy as np

from barseg import (
    NoveltyConfig,
    SyntheticSongSpec,
    cosine_ssm,
    foote_segmentation,
    novelty_curve,
    pick_peaks,
    synth_block_song,
)

tf, truth = synth_block_song(
    SyntheticSongSpec((8, 8, 8, 4), noise_level=0.05, seed=21)
)
ssm = cosine_ssm(tf)
config = NoveltyConfig(kernel_size=8)

curve = novelty_curve(ssm, config)
top = curve.max()
print("planted boundaries:", truth)
print("novelty per bar (one column per bar):\n")
for level in range(8, 0, -1):
    row = "".join("#" if c >= top * level / 8 and c > 0 else " " for c in curve)
    print(f"  {row}")
print("  " + "".join("^" if (i + 1) in truth else "-" for i in range(len(curve))))

seg = pick_peaks(curve, config)
print("\npicked:", seg.boundaries)

# one call does both steps
same = foote_segmentation(ssm, config)
assert same.boundaries == seg.boundaries

# a bigger kernel smooths over the short 4-bar tail section
wide = foote_segmentation(ssm, NoveltyConfig(kernel_size=16))
print("kernel 16:", wide.boundaries)
