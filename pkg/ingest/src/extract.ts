/**
 * Barwise time-frequency extraction.
 *
 * An audio file plus B+1 bar-onset times becomes a B x (T*F) matrix:
 * per bar, the spectral frames falling inside the bar are resampled to
 * exactly T frames by linear interpolation over the frame index, then
 * concatenated frame by frame (column t*F + f).  The matrix is written
 * as the CSV-with-header contract the segmentation toolkit loads, plus
 * a `<stem>.bars.json` sidecar carrying the bar times.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { decodeWav, WavError } from "./wav.js";
import { powerSpectrogram } from "./dsp.js";
import {
  CHROMA_BINS,
  LOGMEL_BINS,
  chromaBinMap,
  chromaFrame,
  logMelFrame,
  melFilterbank,
} from "./features.js";

export type FeatureKind = "logmel" | "chroma";

export interface IngestSpec {
  audioPath: string;
  /** B+1 strictly increasing timestamps in seconds */
  barTimes: number[];
  feature: FeatureKind;
  /** frames per bar after resampling; default 96 */
  framesPerBar?: number;
}

/** Analysis defaults; every value is echoed into the CSV provenance line. */
export const ANALYSIS = {
  windowSize: 2048,
  hopSize: 512,
  melFmin: 0,
  chromaFmin: 27.5,
  melScale: "htk",
} as const;

export const DEFAULT_FRAMES_PER_BAR = 96;

export class IngestError extends Error {}

export interface BarwiseMatrix {
  /** B rows of length framesPerBar * featureBins */
  rows: Float64Array[];
  barTimes: number[];
  framesPerBar: number;
  featureBins: number;
  feature: FeatureKind;
  sampleRate: number;
  sourcePath: string;
}

function validateSpec(spec: IngestSpec, durationSeconds: number): void {
  const bt = spec.barTimes;
  if (!Array.isArray(bt) || bt.length < 2) {
    throw new IngestError("bar_times must contain at least two timestamps");
  }
  for (let i = 0; i < bt.length; i++) {
    if (typeof bt[i] !== "number" || !Number.isFinite(bt[i])) {
      throw new IngestError(`bar_times[${i}] is not a finite number`);
    }
    if (i > 0 && bt[i] <= bt[i - 1]) {
      throw new IngestError(
        `bar_times must be strictly increasing (bar_times[${i}] = ${bt[i]} ` +
          `<= bar_times[${i - 1}] = ${bt[i - 1]})`,
      );
    }
  }
  const slack = 1e-6;
  if (bt[0] < -slack || bt[bt.length - 1] > durationSeconds + slack) {
    throw new IngestError(
      `bar_times out of audio range: [${bt[0]}, ${bt[bt.length - 1]}] vs ` +
        `duration ${durationSeconds.toFixed(3)}s`,
    );
  }
  const t = spec.framesPerBar ?? DEFAULT_FRAMES_PER_BAR;
  if (!Number.isInteger(t) || t < 1) {
    throw new IngestError(`frames_per_bar must be a positive integer, got ${t}`);
  }
  if (spec.feature !== "logmel" && spec.feature !== "chroma") {
    throw new IngestError(`unknown feature kind: ${String(spec.feature)}`);
  }
}

/**
 * Resample a sequence of frames to exactly `target` frames, linearly
 * interpolating between neighbours on the frame-index axis.
 */
export function resampleFrames(frames: Float64Array[], target: number): Float64Array[] {
  const source = frames.length;
  if (source === 0) {
    throw new Error("cannot resample an empty frame sequence");
  }
  const bins = frames[0].length;
  const out: Float64Array[] = [];
  for (let j = 0; j < target; j++) {
    const pos =
      target === 1 ? (source - 1) / 2 : (j * (source - 1)) / (target - 1);
    const i0 = Math.min(source - 1, Math.floor(pos));
    const i1 = Math.min(source - 1, i0 + 1);
    const w = pos - i0;
    const row = new Float64Array(bins);
    const a = frames[i0];
    const b = frames[i1];
    for (let f = 0; f < bins; f++) {
      row[f] = (1 - w) * a[f] + w * b[f];
    }
    out.push(row);
  }
  return out;
}

export function extractBarwiseTf(spec: IngestSpec): BarwiseMatrix {
  let audio;
  try {
    audio = decodeWav(fs.readFileSync(spec.audioPath));
  } catch (err) {
    if (err instanceof WavError) {
      throw new IngestError(`${spec.audioPath}: ${err.message}`);
    }
    throw new IngestError(`${spec.audioPath}: cannot read audio: ${String(err)}`);
  }
  const duration = audio.samples.length / audio.sampleRate;
  validateSpec(spec, duration);
  const framesPerBar = spec.framesPerBar ?? DEFAULT_FRAMES_PER_BAR;

  const spec2 = powerSpectrogram(
    audio.samples,
    audio.sampleRate,
    ANALYSIS.windowSize,
    ANALYSIS.hopSize,
  );

  let featureBins: number;
  let frameFeature: (power: Float64Array) => Float64Array;
  if (spec.feature === "logmel") {
    featureBins = LOGMEL_BINS;
    const filters = melFilterbank(
      LOGMEL_BINS,
      spec2.binCount,
      audio.sampleRate,
      ANALYSIS.melFmin,
      audio.sampleRate / 2,
    );
    frameFeature = (power) => logMelFrame(power, filters);
  } else {
    featureBins = CHROMA_BINS;
    const binMap = chromaBinMap(spec2.binCount, audio.sampleRate, ANALYSIS.chromaFmin);
    frameFeature = (power) => chromaFrame(power, binMap);
  }

  // Feature frames are computed lazily per bar slice so we never touch
  // bins outside the requested bars twice.
  const featureCache = new Map<number, Float64Array>();
  const featureAt = (frame: number): Float64Array => {
    let cached = featureCache.get(frame);
    if (cached === undefined) {
      cached = frameFeature(spec2.power[frame]);
      featureCache.set(frame, cached);
    }
    return cached;
  };

  const bt = spec.barTimes;
  const rows: Float64Array[] = [];
  for (let bar = 0; bar < bt.length - 1; bar++) {
    const start = bt[bar];
    const end = bt[bar + 1];
    const slice: Float64Array[] = [];
    for (let frame = 0; frame < spec2.times.length; frame++) {
      if (spec2.times[frame] >= start && spec2.times[frame] < end) {
        slice.push(featureAt(frame));
      }
    }
    if (slice.length === 0) {
      // A bar shorter than the hop can miss every frame center; fall
      // back to the frame nearest the bar midpoint.
      const mid = (start + end) / 2;
      let best = 0;
      for (let frame = 1; frame < spec2.times.length; frame++) {
        if (Math.abs(spec2.times[frame] - mid) < Math.abs(spec2.times[best] - mid)) {
          best = frame;
        }
      }
      slice.push(featureAt(best));
    }
    const resampled = resampleFrames(slice, framesPerBar);
    const row = new Float64Array(framesPerBar * featureBins);
    for (let t = 0; t < framesPerBar; t++) {
      row.set(resampled[t], t * featureBins);
    }
    rows.push(row);
  }

  return {
    rows,
    barTimes: [...bt],
    framesPerBar,
    featureBins,
    feature: spec.feature,
    sampleRate: audio.sampleRate,
    sourcePath: spec.audioPath,
  };
}

function formatFloat(v: number): string {
  // JS number printing is shortest round-trip, so files reload exactly.
  return Object.is(v, -0) ? "-0.0" : String(v);
}

/**
 * Write `<stem>.csv` and `<stem>.bars.json` into `outDir`.
 * Returns the CSV path.
 */
export function writeBarwiseCsv(matrix: BarwiseMatrix, outDir: string, stem: string): string {
  fs.mkdirSync(outDir, { recursive: true });
  const csvPath = path.join(outDir, `${stem}.csv`);
  const lines = [
    `# B=${matrix.rows.length},T=${matrix.framesPerBar},F=${matrix.featureBins}`,
    // provenance: every analysis knob that shaped the numbers
    `# source=${path.basename(matrix.sourcePath)} feature=${matrix.feature} ` +
      `sr=${matrix.sampleRate} window=${ANALYSIS.windowSize} hop=${ANALYSIS.hopSize} ` +
      `fmin=${matrix.feature === "logmel" ? ANALYSIS.melFmin : ANALYSIS.chromaFmin} ` +
      `fmax=${matrix.sampleRate / 2} mel=${ANALYSIS.melScale}`,
  ];
  for (const row of matrix.rows) {
    const cells = new Array<string>(row.length);
    for (let i = 0; i < row.length; i++) cells[i] = formatFloat(row[i]);
    lines.push(cells.join(","));
  }
  fs.writeFileSync(csvPath, lines.join("\n") + "\n");
  const sidecarPath = path.join(outDir, `${stem}.bars.json`);
  fs.writeFileSync(
    sidecarPath,
    `{"bar_times": [${matrix.barTimes.map(formatFloat).join(", ")}]}\n`,
  );
  return csvPath;
}
