/** Gapless playback: pulls chunks from the session and schedules them
 * back to back on an audio sink, keeping at least two chunks of
 * lookahead.  A failed fetch is retried once, then playback pauses
 * with a banner.
 */

import { Chunk, Session } from "./session.js";

export interface AudioSink {
  readonly currentTime: number;
  schedule(samples: Float32Array, when: number): void;
}

export function u8ToFloat(bytes: Uint8Array): Float32Array {
  const out = new Float32Array(bytes.length);
  for (let i = 0; i < bytes.length; i++) {
    out[i] = (bytes[i] - 128) / 128;
  }
  return out;
}

export interface PlayerOptions {
  lookaheadChunks?: number;
  pollMs?: number;
  startDelaySec?: number;
}

export class Player {
  private cursor: number | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private pumping = false;
  readonly lookaheadChunks: number;
  private readonly pollMs: number;
  private readonly startDelaySec: number;
  onChunk: ((chunk: Chunk) => void) | null = null;
  onStall: ((reason: unknown) => void) | null = null;

  constructor(
    private session: Session,
    private sink: AudioSink,
    options: PlayerOptions = {},
  ) {
    this.lookaheadChunks = options.lookaheadChunks ?? 2;
    this.pollMs = options.pollMs ?? 50;
    this.startDelaySec = options.startDelaySec ?? 0.05;
  }

  chunkSeconds(): number {
    return this.session.chunkSamples / this.session.state.rate;
  }

  /** Seconds of audio scheduled beyond the sink clock. */
  scheduledAhead(): number {
    if (this.cursor === null) {
      return 0;
    }
    return Math.max(0, this.cursor - this.sink.currentTime);
  }

  /** Top up the schedule to the lookahead horizon.  Returns false when
   * a chunk could not be fetched even after the retry. */
  async pump(): Promise<boolean> {
    if (this.pumping || !this.session.state.playing) {
      return true;
    }
    this.pumping = true;
    try {
      while (this.scheduledAhead() < this.lookaheadChunks * this.chunkSeconds()) {
        let chunk: Chunk;
        try {
          chunk = await this.session.nextChunk();
        } catch {
          try {
            chunk = await this.session.nextChunk(); // one retry
          } catch (err) {
            this.session.pause();
            this.session.state.banner = `stream stalled: ${String(err)}`;
            this.onStall?.(err);
            return false;
          }
        }
        if (this.cursor === null || this.cursor < this.sink.currentTime) {
          this.cursor = this.sink.currentTime + this.startDelaySec;
        }
        this.sink.schedule(u8ToFloat(chunk.bytes), this.cursor);
        this.cursor += chunk.bytes.length / this.session.state.rate;
        this.onChunk?.(chunk);
      }
      return true;
    } finally {
      this.pumping = false;
    }
  }

  start(): void {
    this.session.play();
    if (this.timer === null) {
      this.timer = setInterval(() => void this.pump(), this.pollMs);
    }
    void this.pump();
  }

  pause(): void {
    this.session.pause();
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Rate or device changes invalidate the scheduling cursor. */
  resetCursor(): void {
    this.cursor = null;
  }
}

/** Web Audio implementation used by the real page. */
export class WebAudioSink implements AudioSink {
  private ctx: AudioContext;

  constructor(private rate: number) {
    this.ctx = new AudioContext();
  }

  get currentTime(): number {
    return this.ctx.currentTime;
  }

  schedule(samples: Float32Array, when: number): void {
    const buffer = this.ctx.createBuffer(1, samples.length, this.rate);
    buffer.getChannelData(0).set(samples);
    const source = this.ctx.createBufferSource();
    source.buffer = buffer;
    source.connect(this.ctx.destination);
    source.start(Math.max(when, this.ctx.currentTime));
  }

  async resume(): Promise<void> {
    if (this.ctx.state === "suspended") {
      await this.ctx.resume();
    }
  }

  async close(): Promise<void> {
    await this.ctx.close();
  }
}
