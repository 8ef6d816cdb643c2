"""Segment-size regularization.

Two penalty shapes on the segment size n: distance to a target size
(|n - tau|^alpha) and a modulo-8 ladder that prefers 8, then multiples of
4, then even sizes.  The penalty is subtracted from the kernel score,
weighted by lambda and, in the normalized form, by the song's best
window-8 kernel score so that the two terms share a scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernels import KernelSpec, kernel_score
from .similarity import SelfSimilarityMatrix

PENALTY_KINDS = ("None", "TargetDeviation", "Modulo8")
ALLOWED_ALPHAS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class PenaltySpec:
    kind: str = "Modulo8"
    tau: int = 8
    alpha: float = 1.0
    lam: float = 0.04

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if int(self.tau) < 1:
            raise ValueError("tau must be >= 1")
        object.__setattr__(self, "tau", int(self.tau))
        if float(self.alpha) not in ALLOWED_ALPHAS:
            raise ValueError(f"alpha must be one of {ALLOWED_ALPHAS}")
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        object.__setattr__(self, "lam", float(self.lam))


def target_deviation(n: int, tau: int = 8, alpha: float = 1.0) -> float:
    """|n - tau|^alpha; zero at the target size."""
    if n < 1:
        raise ValueError("segment size must be >= 1")
    return float(abs(n - tau) ** alpha)


def modulo8(n: int) -> float:
    """0 for size 8, 1/4 for other multiples of 4, 1/2 for even, 1 for odd.

    The branches are ordered; 8 must hit the first case even though it is
    also a multiple of 4.
    """
    if n < 1:
        raise ValueError("segment size must be >= 1")
    if n == 8:
        return 0.0
    if n % 4 == 0:
        return 0.25
    if n % 2 == 0:
        return 0.5
    return 1.0


def penalty_value(spec: PenaltySpec, n: int) -> float:
    if spec.kind == "None":
        if n < 1:
            raise ValueError("segment size must be >= 1")
        return 0.0
    if spec.kind == "TargetDeviation":
        return target_deviation(n, spec.tau, spec.alpha)
    return modulo8(n)


def segment_score(
    ssm: SelfSimilarityMatrix,
    start: int,
    end_excl: int,
    kernel: KernelSpec,
    penalty: PenaltySpec,
    u_k8_max: float,
    normalization: str = "segment_length",
) -> float:
    """Penalized score of one segment.

    u_k8_max is the weighting factor in front of the penalty; pass the
    song's max_window8_score for the normalized form, or 1.0 for the raw
    form.  With penalty kind "None" this reduces to the kernel score
    exactly.
    """
    n = end_excl - start
    return kernel_score(ssm, start, end_excl, kernel, normalization) - (
        u_k8_max * penalty.lam * penalty_value(penalty, n)
    )
