/**
 * Spectral front end: Hann-windowed STFT on a radix-2 FFT.
 */

export function hannWindow(size: number): Float64Array {
  const w = new Float64Array(size);
  for (let i = 0; i < size; i++) {
    w[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / size);
  }
  return w;
}

/**
 * In-place iterative radix-2 FFT (decimation in time).
 * Length must be a power of two.
 */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if (n !== im.length || (n & (n - 1)) !== 0 || n === 0) {
    throw new Error(`fft length must be a power of two, got ${n}`);
  }
  // bit-reversal permutation
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      const tr = re[i];
      re[i] = re[j];
      re[j] = tr;
      const ti = im[i];
      im[i] = im[j];
      im[j] = ti;
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const ang = (-2 * Math.PI) / len;
    const wr = Math.cos(ang);
    const wi = Math.sin(ang);
    for (let start = 0; start < n; start += len) {
      let curR = 1;
      let curI = 0;
      const half = len >> 1;
      for (let k = 0; k < half; k++) {
        const a = start + k;
        const b = a + half;
        const xr = re[b] * curR - im[b] * curI;
        const xi = re[b] * curI + im[b] * curR;
        re[b] = re[a] - xr;
        im[b] = im[a] - xi;
        re[a] += xr;
        im[a] += xi;
        const nextR = curR * wr - curI * wi;
        curI = curR * wi + curI * wr;
        curR = nextR;
      }
    }
  }
}

export interface Spectrogram {
  /** frames x (windowSize/2 + 1) power values */
  power: Float64Array[];
  /** center time of each frame in seconds */
  times: Float64Array;
  binCount: number;
}

/**
 * Power spectrogram of a mono signal.
 *
 * Only windows lying fully inside the signal are analysed, so every
 * frame is computed from real samples; padded edge windows would put a
 * hard cut (or a reflection kink) under the window and smear broadband
 * energy across every band, which log compression then magnifies.
 * Audio shorter than one window degenerates to a single zero-padded
 * frame.  Frame k starts at k*hopSize and is stamped with the time of
 * its centre sample.
 */
export function powerSpectrogram(
  samples: Float64Array,
  sampleRate: number,
  windowSize: number,
  hopSize: number,
): Spectrogram {
  if ((windowSize & (windowSize - 1)) !== 0 || windowSize <= 0) {
    throw new Error(`window size must be a power of two, got ${windowSize}`);
  }
  if (hopSize <= 0) {
    throw new Error(`hop size must be positive, got ${hopSize}`);
  }
  if (samples.length === 0) {
    throw new Error("cannot analyse empty audio");
  }
  const window = hannWindow(windowSize);
  const binCount = windowSize / 2 + 1;
  const frameCount =
    samples.length >= windowSize
      ? Math.floor((samples.length - windowSize) / hopSize) + 1
      : 1;
  const power: Float64Array[] = [];
  const times = new Float64Array(frameCount);
  const re = new Float64Array(windowSize);
  const im = new Float64Array(windowSize);
  for (let frame = 0; frame < frameCount; frame++) {
    const start = frame * hopSize;
    for (let i = 0; i < windowSize; i++) {
      re[i] = start + i < samples.length ? samples[start + i] * window[i] : 0;
      im[i] = 0;
    }
    fft(re, im);
    const row = new Float64Array(binCount);
    for (let k = 0; k < binCount; k++) {
      row[k] = re[k] * re[k] + im[k] * im[k];
    }
    power.push(row);
    times[frame] = (start + windowSize / 2) / sampleRate;
  }
  return { power, times, binCount };
}
