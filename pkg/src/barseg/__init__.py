"""Barwise music-structure segmentation.

Feature matrices with one row per bar, self-similarity matrices over
them, an optimal block segmenter with size penalties, a checkerboard
novelty baseline, and boundary-retrieval evaluation.
"""

from .barwise import (
    BarwiseFileError,
    BarwiseTF,
    center_rows,
    load_barwise_tf,
    row_normalize_l2,
    save_barwise_tf,
)
from .evaluation import (
    DEFAULT_LAMBDA_GRID,
    AnnotationSet,
    EvalReport,
    HitRate,
    aggregate_reports,
    align_to_downbeats,
    barwise_hit_rate,
    evaluate_boundaries,
    hit_rate,
    kl_divergence,
    lambda_sweep,
    load_annotations,
    max_matching_size,
    size_histogram,
)
from .kernels import KernelSpec, kernel_matrix, kernel_score, max_window8_score
from .novelty import (
    NoveltyConfig,
    checkerboard_kernel,
    foote_segmentation,
    novelty_curve,
    pick_peaks,
)
from .penalty import (
    PenaltySpec,
    modulo8,
    penalty_value,
    segment_score,
    target_deviation,
)
from .segmenter import (
    DPResult,
    Segmentation,
    SegmenterConfig,
    SegmentScorer,
    brute_force_segmentation,
    load_segmentation,
    optimal_boundaries_from_scores,
    optimal_segmentation,
    save_segmentation,
    segment_barwise_tf,
)
from .similarity import (
    DegenerateSimilarityError,
    SelfSimilarityMatrix,
    autocorrelation_ssm,
    build_ssm,
    cosine_ssm,
    load_ssm,
    rbf_gamma,
    rbf_ssm,
    save_ssm,
)
from .synthetic import SyntheticSongSpec, synth_block_song

__version__ = "0.1.0"
