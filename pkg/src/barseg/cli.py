"""Command-line front end.

Modes: similarity, segment, eval, sweep, foote, synth.  Inputs for
similarity/segment/foote/sweep are barwise feature CSVs (with optional
.bars.json sidecars); eval takes segmentation JSONs and pairs them with
annotations by stem.  One bad file is skipped and reported, the batch
continues; exit code 0 means everything succeeded, 1 means partial
failure, 2 means the invocation itself was invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .barwise import load_barwise_tf, save_barwise_tf
from .evaluation import (
    DEFAULT_LAMBDA_GRID,
    ABSOLUTE_REFERENCES,
    aggregate_reports,
    evaluate_boundaries,
    lambda_sweep,
    load_annotations,
)
from .novelty import NoveltyConfig, foote_segmentation
from .segmenter import (
    SegmenterConfig,
    load_segmentation,
    save_segmentation,
    segment_barwise_tf,
)
from .similarity import build_ssm, save_ssm
from .synthetic import SyntheticSongSpec, synth_block_song

MODES = ("similarity", "segment", "eval", "sweep", "foote", "synth")

_SIMILARITY_NAMES = {"cosine": "Cosine", "autocorrelation": "Autocorrelation", "rbf": "RBF"}
_KERNEL_NAMES = {"full": "Full", "band": "Band"}
_PENALTY_NAMES = {"none": "None", "target-deviation": "TargetDeviation", "modulo8": "Modulo8"}

# Synthetic section sizes are drawn 8-heavy, mirroring annotated corpora.
_SYNTH_SIZES = (4, 8, 12, 16)
_SYNTH_WEIGHTS = (0.22, 0.66, 0.06, 0.06)


@dataclass(frozen=True)
class RunManifest:
    """One resolved invocation: what to run, on what, with which config."""

    mode: str
    input_paths: tuple[str, ...]
    config: SegmenterConfig
    out_dir: str
    novelty: NoveltyConfig = NoveltyConfig()
    ann_dir: str | None = None
    bars_dir: str | None = None
    tolerances: tuple[float, ...] = (0.5, 3.0)
    trim_endpoints: bool = False
    absolute_reference: str = "original"
    jobs: int = 1
    seed: int | None = None
    songs: int = 10
    noise: float = 0.02
    grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "synth" and self.seed is None:
            raise ValueError("synth needs an explicit --seed")
        if self.mode != "synth" and not self.input_paths:
            raise ValueError(f"{self.mode} needs at least one input file")
        if self.jobs < 1:
            raise ValueError("--jobs must be >= 1")
        if self.absolute_reference not in ABSOLUTE_REFERENCES:
            raise ValueError(
                f"--absolute-reference must be one of {ABSOLUTE_REFERENCES}"
            )


def _stem(path: Path) -> str:
    name = path.name
    for suffix in (".seg.json", ".truth.json", ".ssm.csv", ".json", ".csv"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return path.stem


def _find_bar_times(seg_path: Path, stem: str, manifest: RunManifest):
    dirs = [d for d in (manifest.bars_dir, manifest.ann_dir) if d]
    dirs.append(str(seg_path.parent))
    for d in dirs:
        candidate = Path(d) / f"{stem}.bars.json"
        if candidate.exists():
            payload = json.loads(candidate.read_text())
            return tuple(float(t) for t in payload["bar_times"])
    return None


def _find_annotation(stem: str, manifest: RunManifest) -> Path:
    if manifest.ann_dir is None:
        raise ValueError("eval and sweep need --ann")
    for ext in (".ann.json", ".ann.csv"):
        candidate = Path(manifest.ann_dir) / f"{stem}{ext}"
        if candidate.exists():
            return candidate
    raise FileNotFoundError(
        f"no annotation {stem}.ann.json|.ann.csv under {manifest.ann_dir}"
    )


def _process_song(task):
    """Worker for the per-song modes; returns (path, written, error)."""
    mode, path_str, manifest = task
    path = Path(path_str)
    out_dir = Path(manifest.out_dir)
    stem = _stem(path)
    try:
        written = []
        if mode == "similarity":
            tf = load_barwise_tf(path)
            ssm = build_ssm(tf, manifest.config.similarity)
            target = out_dir / f"{stem}.ssm.csv"
            save_ssm(ssm, target)
            written.append(str(target))
        elif mode == "segment":
            tf = load_barwise_tf(path)
            seg = segment_barwise_tf(tf, manifest.config)
            target = out_dir / f"{stem}.seg.json"
            save_segmentation(seg, target, bar_times=tf.bar_times)
            written.append(str(target))
        elif mode == "foote":
            tf = load_barwise_tf(path)
            ssm = build_ssm(tf, manifest.config.similarity)
            seg = foote_segmentation(ssm, manifest.novelty)
            target = out_dir / f"{stem}.seg.json"
            save_segmentation(seg, target, bar_times=tf.bar_times)
            written.append(str(target))
        elif mode == "eval":
            seg, _ = load_segmentation(path)
            ann = load_annotations(_find_annotation(stem, manifest))
            bar_times = _find_bar_times(path, stem, manifest)
            if manifest.tolerances and bar_times is None:
                raise ValueError(
                    f"{path}: absolute-time evaluation needs a {stem}.bars.json "
                    "sidecar (or pass --tolerances '' for barwise only)"
                )
            report = evaluate_boundaries(
                seg,
                ann,
                bar_times,
                absolute_reference=manifest.absolute_reference,
                tolerances_seconds=manifest.tolerances,
                trim_endpoints=manifest.trim_endpoints,
            )
            target = out_dir / f"{stem}.eval.json"
            target.write_text(json.dumps(report.to_dict()) + "\n")
            written.append(str(target))
            return (path_str, written, None, report)
        else:
            raise ValueError(f"bad worker mode {mode!r}")
        return (path_str, written, None, None)
    except Exception as exc:  # per-file isolation: one bad file must not kill the batch
        return (path_str, [], f"{type(exc).__name__}: {exc}", None)


def _run_batch(manifest: RunManifest) -> int:
    tasks = [(manifest.mode, p, manifest) for p in manifest.input_paths]
    if manifest.jobs > 1:
        with ProcessPoolExecutor(max_workers=manifest.jobs) as pool:
            results = list(pool.map(_process_song, tasks))
    else:
        results = [_process_song(t) for t in tasks]

    failures = [(p, err) for p, _, err, _ in results if err]
    for path, err in failures:
        print(f"error: {path}: {err}", file=sys.stderr)

    if manifest.mode == "eval":
        reports = [r for _, _, err, r in results if not err and r is not None]
        if reports:
            mean = aggregate_reports(reports)
            target = Path(manifest.out_dir) / "corpus_mean.eval.json"
            target.write_text(json.dumps(mean.to_dict()) + "\n")

    ok = len(results) - len(failures)
    print(f"{manifest.mode}: {ok}/{len(results)} file(s) processed")
    return 1 if failures else 0


def _run_sweep(manifest: RunManifest) -> int:
    corpus = []
    failures = []
    for path_str in manifest.input_paths:
        path = Path(path_str)
        stem = _stem(path)
        try:
            tf = load_barwise_tf(path)
            bar_times = tf.bar_times or _find_bar_times(path, stem, manifest)
            if bar_times is None:
                raise ValueError(f"{path}: sweep needs bar_times to align annotations")
            ann = load_annotations(_find_annotation(stem, manifest))
            ssm = build_ssm(tf, manifest.config.similarity)
            corpus.append((ssm, ann, bar_times))
        except Exception as exc:
            failures.append((path_str, f"{type(exc).__name__}: {exc}"))
    for path, err in failures:
        print(f"error: {path}: {err}", file=sys.stderr)
    if not corpus:
        print("error: no usable songs for the sweep", file=sys.stderr)
        return 1
    best, reports = lambda_sweep(corpus, manifest.config, manifest.grid)
    payload = {
        "metric": "mean F at 0-bar tolerance",
        "best_lambda": best,
        "per_lambda": {f"{lam:g}": rep.to_dict() for lam, rep in reports.items()},
    }
    target = Path(manifest.out_dir) / "lambda_sweep.json"
    target.write_text(json.dumps(payload) + "\n")
    print(f"sweep: best lambda {best:g} over {len(corpus)} song(s)")
    return 1 if failures else 0


def _run_synth(manifest: RunManifest) -> int:
    rng = np.random.default_rng(manifest.seed)
    out_dir = Path(manifest.out_dir)
    for i in range(manifest.songs):
        n_sections = int(rng.integers(4, 7))
        lengths = tuple(
            int(rng.choice(_SYNTH_SIZES, p=_SYNTH_WEIGHTS)) for _ in range(n_sections)
        )
        spec = SyntheticSongSpec(
            section_lengths=lengths,
            noise_level=manifest.noise,
            seed=int(rng.integers(0, 2**31)),
        )
        tf, truth = synth_block_song(spec)
        stem = f"synth{i:03d}"
        save_barwise_tf(tf, out_dir / f"{stem}.csv")  # also writes the bars sidecar
        seconds = [tf.bar_times[b - 1] for b in truth]
        (out_dir / f"{stem}.truth.json").write_text(
            json.dumps(
                {
                    "boundaries_bars": list(truth),
                    "boundaries_seconds": seconds,
                    "total_score": 0.0,
                }
            )
            + "\n"
        )
        (out_dir / f"{stem}.ann.json").write_text(
            json.dumps({"boundaries_seconds": seconds}) + "\n"
        )
    print(f"synth: wrote {manifest.songs} song(s) to {out_dir}")
    return 0


def run(manifest: RunManifest) -> int:
    """Execute one manifest; returns the process exit code."""
    Path(manifest.out_dir).mkdir(parents=True, exist_ok=True)
    if manifest.mode == "synth":
        return _run_synth(manifest)
    if manifest.mode == "sweep":
        return _run_sweep(manifest)
    return _run_batch(manifest)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="segmenter config JSON; flags override it")
    p.add_argument("--similarity", choices=sorted(_SIMILARITY_NAMES), help="similarity kind")
    p.add_argument("--kernel", choices=sorted(_KERNEL_NAMES), help="kernel kind")
    p.add_argument("--bands", type=int, help="band count for the band kernel")
    p.add_argument("--penalty", choices=sorted(_PENALTY_NAMES), help="penalty kind")
    p.add_argument("--lambda", dest="lambda_", type=float, help="penalty weight")
    p.add_argument("--max-segment", type=int, help="segment size cap in bars")


def _add_common(p: argparse.ArgumentParser, with_inputs: bool = True) -> None:
    if with_inputs:
        p.add_argument("inputs", nargs="+", help="input files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="song-level parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barseg", description="Barwise music-structure segmentation."
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("similarity", help="write self-similarity matrices")
    _add_common(p)
    _add_config_flags(p)

    p = sub.add_parser("segment", help="optimal segmentation of feature files")
    _add_common(p)
    _add_config_flags(p)

    p = sub.add_parser("eval", help="score segmentation JSONs against annotations")
    _add_common(p)
    p.add_argument("--ann", required=True, help="directory of <stem>.ann.json|.ann.csv")
    p.add_argument("--bars", help="directory of <stem>.bars.json sidecars")
    p.add_argument("--tolerances", default="0.5,3", help="absolute tolerances in seconds, comma-separated (empty for barwise only)")
    p.add_argument("--trim-endpoints", action="store_true", help="drop the first and last boundaries before matching")
    p.add_argument("--absolute-reference", choices=ABSOLUTE_REFERENCES, default="original", help="compare absolute metrics against original or downbeat-aligned annotations")

    p = sub.add_parser("sweep", help="grid-search the penalty weight on feature files")
    _add_common(p)
    _add_config_flags(p)
    p.add_argument("--ann", required=True, help="directory of annotations")
    p.add_argument("--bars", help="directory of bar-times sidecars")
    p.add_argument("--grid", help="lambda grid: comma list or start:stop:step")

    p = sub.add_parser("foote", help="checkerboard-novelty baseline segmentation")
    _add_common(p)
    _add_config_flags(p)
    p.add_argument("--kernel-size", type=int, default=16)
    p.add_argument("--no-taper", action="store_true", help="disable the radial Gaussian taper")
    p.add_argument("--smoothing-sigma", type=float, default=0.0)
    p.add_argument("--median-width", type=int, default=1)
    p.add_argument("--peak-threshold", type=float, default=0.1)

    p = sub.add_parser("synth", help="generate synthetic block songs")
    _add_common(p, with_inputs=False)
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument("--songs", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.02)

    return parser


def _config_from_args(args: argparse.Namespace) -> SegmenterConfig:
    payload = {}
    if getattr(args, "config", None):
        try:
            payload = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {args.config}: {exc}") from exc
    config = SegmenterConfig.from_dict(payload)

    if getattr(args, "similarity", None):
        config = replace(config, similarity=_SIMILARITY_NAMES[args.similarity])
    kernel_kind = getattr(args, "kernel", None)
    bands = getattr(args, "bands", None)
    if kernel_kind or bands is not None:
        kind = _KERNEL_NAMES[kernel_kind] if kernel_kind else config.kernel.kind
        if kind == "Full":
            kernel = replace(config.kernel, kind="Full", bands=None)
        else:
            if bands is None:
                bands = config.kernel.bands if config.kernel.kind == "Band" else 7
            kernel = replace(config.kernel, kind="Band", bands=bands)
        config = replace(config, kernel=kernel)
    penalty = config.penalty
    if getattr(args, "penalty", None):
        penalty = replace(penalty, kind=_PENALTY_NAMES[args.penalty])
    if getattr(args, "lambda_", None) is not None:
        penalty = replace(penalty, lam=args.lambda_)
    if penalty is not config.penalty:
        config = replace(config, penalty=penalty)
    if getattr(args, "max_segment", None) is not None:
        config = replace(config, max_segment_bars=args.max_segment)
    return config


def _parse_grid(text: str | None) -> tuple[float, ...]:
    if not text:
        return DEFAULT_LAMBDA_GRID
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(x) for x in text.split(","))


def _parse_tolerances(text: str) -> tuple[float, ...]:
    if not text.strip():
        return ()
    return tuple(float(x) for x in text.split(","))


def _manifest_from_args(args: argparse.Namespace) -> RunManifest:
    novelty = NoveltyConfig()
    if args.mode == "foote":
        novelty = NoveltyConfig(
            kernel_size=args.kernel_size,
            gaussian_taper=not args.no_taper,
            smoothing_sigma=args.smoothing_sigma,
            median_width=args.median_width,
            peak_threshold=args.peak_threshold,
        )
    return RunManifest(
        mode=args.mode,
        input_paths=tuple(getattr(args, "inputs", ()) or ()),
        config=_config_from_args(args),
        out_dir=args.out,
        novelty=novelty,
        ann_dir=getattr(args, "ann", None),
        bars_dir=getattr(args, "bars", None),
        tolerances=_parse_tolerances(getattr(args, "tolerances", "0.5,3")),
        trim_endpoints=getattr(args, "trim_endpoints", False),
        absolute_reference=getattr(args, "absolute_reference", "original"),
        jobs=getattr(args, "jobs", 1),
        seed=getattr(args, "seed", None),
        songs=getattr(args, "songs", 10),
        noise=getattr(args, "noise", 0.02),
        grid=_parse_grid(getattr(args, "grid", None)),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = _manifest_from_args(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
