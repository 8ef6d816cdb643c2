import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { encodeWavPcm16 } from "../src/wav.js";

/** Deterministic uniform noise in [-1, 1) via a 32-bit LCG. */
export function noiseSignal(count: number, seed: number): Float64Array {
  let state = seed >>> 0;
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    out[i] = state / 2147483648 - 1;
  }
  return out;
}

export function toneSignal(count: number, freqHz: number, sampleRate: number): Float64Array {
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = Math.sin((2 * Math.PI * freqHz * i) / sampleRate);
  }
  return out;
}

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

export function writeWav(dir: string, name: string, samples: Float64Array, sampleRate: number): string {
  const p = path.join(dir, name);
  fs.writeFileSync(p, encodeWavPcm16(samples, sampleRate));
  return p;
}

export function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / Math.sqrt(na * nb);
}
