"""Build the three self-similarity flavors on one synthetic song and eyeball them."""

import numpy as np

from barseg import (
    SyntheticSongSpec,
    autocorrelation_ssm,
    cosine_ssm,
    rbf_ssm,
    synth_block_song,
)

np.set_printoptions(precision=2, suppress=True, linewidth=140)

# two verses around a bridge, a little noise so nothing is exactly equal
tf, truth = synth_block_song(
    SyntheticSongSpec((8, 4, 8), section_archetypes=(0, 1, 0), noise_level=0.05, seed=11)
)
print("bars:", tf.bar_count, " planted boundaries:", truth)

cos = cosine_ssm(tf)
acf = autocorrelation_ssm(tf)
rbf = rbf_ssm(tf)

print("\ncosine, first 12 bars:")
print(cos.values[:12, :12])

# verse bars should look alike, verse/bridge pairs should not
verse = cos.values[:8, :8][np.triu_indices(8, k=1)].mean()
cross = cos.values[:8, 8:12].mean()
print(f"\nmean within-verse cosine {verse:.3f} vs verse/bridge {cross:.3f}")

# the two verses share an archetype -> the off-diagonal repeat block lights up
repeat = cos.values[:8, 12:].mean()
print(f"verse 1 vs verse 2 (same archetype) {repeat:.3f}")

print(f"\nrbf gamma fitted from the distance spread: {rbf.gamma:.4f}")
print("rbf same rows, first verse block mean:", rbf.values[:8, :8].mean().round(3))

# autocorrelation centers features first, so flat offsets stop mattering
shifted = tf.data + 5.0
from barseg import BarwiseTF

tf_shifted = BarwiseTF(shifted, tf.frames_per_bar, tf.feature_bins, tf.bar_times)
acf_shifted = autocorrelation_ssm(tf_shifted)
print(
    "\nautocorrelation unchanged under a constant feature offset:",
    np.allclose(acf.values, acf_shifted.values, atol=1e-9),
)
