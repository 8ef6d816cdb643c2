/**
 * Frame-level spectral features computed from a power spectrogram:
 * log-compressed mel energies and pitch-class (chroma) energies.
 */

export const LOGMEL_BINS = 80;
export const CHROMA_BINS = 12;

/** HTK-style mel scale. */
export function hzToMel(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

export function melToHz(mel: number): number {
  return 700 * (10 ** (mel / 2595) - 1);
}

/**
 * Triangular mel filterbank with unity-peak filters.
 *
 * Returns `melCount` rows of length `binCount` (binCount = fft/2 + 1);
 * row m holds the weights of filter m over the linear frequency bins.
 */
export function melFilterbank(
  melCount: number,
  binCount: number,
  sampleRate: number,
  fmin: number,
  fmax: number,
): Float64Array[] {
  const fftSize = (binCount - 1) * 2;
  const melLo = hzToMel(fmin);
  const melHi = hzToMel(fmax);
  const edges = new Float64Array(melCount + 2);
  for (let i = 0; i < edges.length; i++) {
    edges[i] = melToHz(melLo + ((melHi - melLo) * i) / (melCount + 1));
  }
  const filters: Float64Array[] = [];
  for (let m = 0; m < melCount; m++) {
    const lo = edges[m];
    const mid = edges[m + 1];
    const hi = edges[m + 2];
    const row = new Float64Array(binCount);
    for (let k = 0; k < binCount; k++) {
      const f = (k * sampleRate) / fftSize;
      if (f > lo && f < hi) {
        row[k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
    }
    filters.push(row);
  }
  return filters;
}

/** Apply a filterbank to one power frame and log-compress: log(1 + energy). */
export function logMelFrame(power: Float64Array, filters: Float64Array[]): Float64Array {
  const out = new Float64Array(filters.length);
  for (let m = 0; m < filters.length; m++) {
    const weights = filters[m];
    let acc = 0;
    for (let k = 0; k < power.length; k++) {
      if (weights[k] !== 0) acc += weights[k] * power[k];
    }
    out[m] = Math.log1p(acc);
  }
  return out;
}

/**
 * Precomputed bin -> pitch-class map. Bins below `fmin` (default A0) or
 * above `fmax` map to -1 and are skipped.
 */
export function chromaBinMap(
  binCount: number,
  sampleRate: number,
  fmin = 27.5,
  fmax = sampleRate / 2,
): Int8Array {
  const fftSize = (binCount - 1) * 2;
  const map = new Int8Array(binCount).fill(-1);
  for (let k = 1; k < binCount; k++) {
    const f = (k * sampleRate) / fftSize;
    if (f < fmin || f > fmax) continue;
    const midi = 69 + 12 * Math.log2(f / 440);
    map[k] = ((Math.round(midi) % 12) + 12) % 12;
  }
  return map;
}

/** Sum power into 12 pitch classes (C=0 .. B=11), log-compressed. */
export function chromaFrame(power: Float64Array, binMap: Int8Array): Float64Array {
  const out = new Float64Array(CHROMA_BINS);
  for (let k = 0; k < power.length; k++) {
    const pc = binMap[k];
    if (pc >= 0) out[pc] += power[k];
  }
  for (let pc = 0; pc < CHROMA_BINS; pc++) {
    out[pc] = Math.log1p(out[pc]);
  }
  return out;
}
