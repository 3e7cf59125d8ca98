/** Canvas panels: waveform of the chunks already fetched, bit-band
 * activity, and a pitch readout line. */

import { BitBandMatrix, NoteEvent } from "./api.js";

export function drawWaveform(
  ctx: CanvasRenderingContext2D,
  bytes: Uint8Array,
  width: number,
  height: number,
): void {
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  if (bytes.length === 0) {
    return;
  }
  ctx.strokeStyle = "#53d18a";
  ctx.lineWidth = 1;
  ctx.beginPath();
  const step = bytes.length / width;
  for (let x = 0; x < width; x++) {
    const sample = bytes[Math.floor(x * step)];
    const y = height - 1 - (sample / 255) * (height - 1);
    if (x === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  }
  ctx.stroke();
}

export function drawBitBands(
  ctx: CanvasRenderingContext2D,
  matrix: BitBandMatrix,
  width: number,
  height: number,
): void {
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  const rowHeight = height / 8;
  for (let bit = 0; bit < matrix.rows.length; bit++) {
    const row = matrix.rows[bit];
    const y = height - (bit + 1) * rowHeight; // bit 0 at the bottom
    const cellWidth = width / Math.max(1, row.length);
    for (let i = 0; i < row.length; i++) {
      const { duty, toggles } = row[i];
      if (toggles === 0) {
        continue;
      }
      const level = Math.round(60 + 195 * Math.min(1, duty * 2));
      ctx.fillStyle = `rgb(${level},${Math.round(level * 0.75)},40)`;
      ctx.fillRect(i * cellWidth, y + 1, Math.ceil(cellWidth), rowHeight - 2);
    }
  }
}

export function pitchLabel(events: NoteEvent[]): string {
  for (let i = events.length - 1; i >= 0; i--) {
    const ev = events[i];
    if (ev.freq !== null && ev.note !== null) {
      const sign = (ev.cents ?? 0) >= 0 ? "+" : "";
      return `${ev.freq.toFixed(1)} Hz ≈ ${ev.note}${ev.octave} ${sign}${ev.cents}¢`;
    }
  }
  return "unvoiced";
}
