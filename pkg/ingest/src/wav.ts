/**
 * Minimal WAV codec: decodes RIFF/WAVE files containing 16-bit PCM or
 * 32-bit IEEE float samples, mixing multi-channel audio down to mono.
 * Enough for ingesting rendered stems and test fixtures; compressed
 * formats are rejected with a clear error.
 */

export interface DecodedAudio {
  sampleRate: number;
  /** mono samples in [-1, 1] (float inputs are passed through as-is) */
  samples: Float64Array;
}

export class WavError extends Error {}

function readTag(view: DataView, offset: number): string {
  return String.fromCharCode(
    view.getUint8(offset),
    view.getUint8(offset + 1),
    view.getUint8(offset + 2),
    view.getUint8(offset + 3),
  );
}

export function decodeWav(buffer: ArrayBuffer | Uint8Array): DecodedAudio {
  const bytes =
    buffer instanceof Uint8Array
      ? buffer
      : new Uint8Array(buffer);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  if (bytes.byteLength < 44) {
    throw new WavError("not a WAV file: shorter than a RIFF header");
  }
  if (readTag(view, 0) !== "RIFF" || readTag(view, 8) !== "WAVE") {
    throw new WavError("not a WAV file: missing RIFF/WAVE magic");
  }

  let formatCode = 0;
  let channels = 0;
  let sampleRate = 0;
  let bitsPerSample = 0;
  let dataOffset = -1;
  let dataLength = 0;

  // Walk the chunk list; chunks are word-aligned.
  let pos = 12;
  while (pos + 8 <= bytes.byteLength) {
    const tag = readTag(view, pos);
    const size = view.getUint32(pos + 4, true);
    const body = pos + 8;
    if (tag === "fmt ") {
      formatCode = view.getUint16(body, true);
      channels = view.getUint16(body + 2, true);
      sampleRate = view.getUint32(body + 4, true);
      bitsPerSample = view.getUint16(body + 14, true);
    } else if (tag === "data") {
      dataOffset = body;
      dataLength = Math.min(size, bytes.byteLength - body);
    }
    pos = body + size + (size % 2);
  }

  if (formatCode === 0 || dataOffset < 0) {
    throw new WavError("not a WAV file: missing fmt or data chunk");
  }
  if (channels < 1 || sampleRate <= 0) {
    throw new WavError(`corrupt fmt chunk: channels=${channels} rate=${sampleRate}`);
  }

  let frames: number;
  let read: (frame: number, channel: number) => number;
  if (formatCode === 1 && bitsPerSample === 16) {
    frames = Math.floor(dataLength / (2 * channels));
    read = (frame, channel) =>
      view.getInt16(dataOffset + 2 * (frame * channels + channel), true) / 32768;
  } else if (formatCode === 3 && bitsPerSample === 32) {
    frames = Math.floor(dataLength / (4 * channels));
    read = (frame, channel) =>
      view.getFloat32(dataOffset + 4 * (frame * channels + channel), true);
  } else {
    throw new WavError(
      `unsupported WAV encoding: format=${formatCode} bits=${bitsPerSample} ` +
        "(only 16-bit PCM and 32-bit float are handled)",
    );
  }

  const samples = new Float64Array(frames);
  for (let i = 0; i < frames; i++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) acc += read(i, c);
    samples[i] = acc / channels;
  }
  return { sampleRate, samples };
}

/** Encode mono samples as 16-bit PCM. Used by tests and fixture scripts. */
export function encodeWavPcm16(samples: ArrayLike<number>, sampleRate: number): Uint8Array {
  const n = samples.length;
  const out = new Uint8Array(44 + 2 * n);
  const view = new DataView(out.buffer);
  const writeTag = (offset: number, tag: string) => {
    for (let i = 0; i < 4; i++) view.setUint8(offset + i, tag.charCodeAt(i));
  };
  writeTag(0, "RIFF");
  view.setUint32(4, 36 + 2 * n, true);
  writeTag(8, "WAVE");
  writeTag(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeTag(36, "data");
  view.setUint32(40, 2 * n, true);
  for (let i = 0; i < n; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]));
    view.setInt16(44 + 2 * i, Math.round(clamped * 32767), true);
  }
  return out;
}
