#!/usr/bin/env node
/**
 * ingest --audio <wav> --bars <json> --feature logmel|chroma --out <dir>
 *
 * Reads an audio file and a `{"bar_times": [...]}` JSON, writes
 * `<stem>.csv` + `<stem>.bars.json` in the barwise feature contract.
 * Exit codes: 0 success, 1 processing failure, 2 invalid invocation.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";
import {
  DEFAULT_FRAMES_PER_BAR,
  extractBarwiseTf,
  IngestError,
  writeBarwiseCsv,
  type FeatureKind,
} from "./extract.js";

const USAGE =
  "usage: ingest --audio <wav> --bars <json> [--feature logmel|chroma] " +
  "[--frames-per-bar N] [--out <dir>]";

function fail(code: number, message: string): never {
  process.stderr.write(message + "\n");
  process.exit(code);
}

export function stemOf(audioPath: string): string {
  const base = path.basename(audioPath);
  const dot = base.lastIndexOf(".");
  return dot > 0 ? base.slice(0, dot) : base;
}

export function runIngest(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        audio: { type: "string" },
        bars: { type: "string" },
        feature: { type: "string", default: "logmel" },
        "frames-per-bar": { type: "string" },
        out: { type: "string", default: "." },
      },
      allowPositionals: false,
    });
  } catch (err) {
    fail(2, `${String(err instanceof Error ? err.message : err)}\n${USAGE}`);
  }
  const opts = parsed.values;
  if (!opts.audio || !opts.bars) {
    fail(2, `--audio and --bars are required\n${USAGE}`);
  }
  if (opts.feature !== "logmel" && opts.feature !== "chroma") {
    fail(2, `--feature must be logmel or chroma, got '${opts.feature}'\n${USAGE}`);
  }
  let framesPerBar = DEFAULT_FRAMES_PER_BAR;
  if (opts["frames-per-bar"] !== undefined) {
    framesPerBar = Number(opts["frames-per-bar"]);
    if (!Number.isInteger(framesPerBar) || framesPerBar < 1) {
      fail(2, `--frames-per-bar must be a positive integer\n${USAGE}`);
    }
  }

  let barTimes: number[];
  try {
    const payload = JSON.parse(fs.readFileSync(opts.bars, "utf8"));
    if (!Array.isArray(payload.bar_times)) {
      throw new Error("missing 'bar_times' array");
    }
    barTimes = payload.bar_times.map((x: unknown) => Number(x));
  } catch (err) {
    fail(1, `${opts.bars}: bad bar-times file: ${String(err instanceof Error ? err.message : err)}`);
  }

  try {
    const matrix = extractBarwiseTf({
      audioPath: opts.audio,
      barTimes,
      feature: opts.feature as FeatureKind,
      framesPerBar,
    });
    const csvPath = writeBarwiseCsv(matrix, opts.out, stemOf(opts.audio));
    console.log(
      `wrote ${csvPath} (B=${matrix.rows.length}, T=${matrix.framesPerBar}, ` +
        `F=${matrix.featureBins})`,
    );
    return 0;
  } catch (err) {
    if (err instanceof IngestError) {
      fail(1, err.message);
    }
    throw err;
  }
}

process.exit(runIngest(process.argv.slice(2)));
