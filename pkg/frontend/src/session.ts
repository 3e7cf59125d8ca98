/** Session state machine for live editing.
 *
 * Edits debounce, then validate against POST /expr/parse.  A valid edit
 * swaps the playing expression at the current play head, so t keeps
 * running and the edit lands musically instead of restarting the tune.
 * An invalid edit keeps the previous expression playing and surfaces
 * the error with a caret position.
 */

import { ApiError, Mode, ParseResult } from "./api.js";

/** The slice of the API the session depends on; tests supply fakes. */
export interface SessionClient {
  parseExpr(expr: string, mode: Mode): Promise<ParseResult>;
  fetchChunk(expr: string, mode: Mode, t0: number, n: number): Promise<Uint8Array>;
}

export interface SessionState {
  expr: string;
  mode: Mode;
  playing: boolean;
  playHead: number;
  rate: number;
  lastError: ApiError | null;
  banner: string | null;
}

export interface SessionOptions {
  debounceMs?: number;
  chunkSamples?: number;
}

export interface Chunk {
  t0: number;
  bytes: Uint8Array;
}

export const DEFAULT_DEBOUNCE_MS = 150;
export const DEFAULT_CHUNK_SAMPLES = 8192;

export function caretLine(pos: number): string {
  return " ".repeat(Math.max(0, pos)) + "^";
}

export class Session {
  readonly state: SessionState;
  readonly chunkSamples: number;
  private readonly debounceMs: number;
  private activeExpr: string | null = null;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private pendingResolve: (() => void) | null = null;
  private editSeq = 0;
  private listeners: Array<(state: SessionState) => void> = [];

  constructor(
    private client: SessionClient,
    options: SessionOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.chunkSamples = options.chunkSamples ?? DEFAULT_CHUNK_SAMPLES;
    this.state = {
      expr: "",
      mode: "c32",
      playing: false,
      playHead: 0,
      rate: 8000,
      lastError: null,
      banner: null,
    };
  }

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** The expression currently feeding the audio stream, if any. */
  get playingExpr(): string | null {
    return this.activeExpr;
  }

  /** Debounced live edit; resolves when this edit was validated or
   * superseded by a newer one. */
  edit(text: string): Promise<void> {
    this.state.expr = text;
    this.emit();
    if (this.debounceTimer !== null) {
      clearTimeout(this.debounceTimer);
      this.pendingResolve?.();
    }
    const seq = ++this.editSeq;
    return new Promise((resolve) => {
      this.pendingResolve = resolve;
      this.debounceTimer = setTimeout(() => {
        this.debounceTimer = null;
        this.pendingResolve = null;
        void this.commit(text, seq).finally(resolve);
      }, this.debounceMs);
    });
  }

  /** Validate and adopt an expression immediately (presets, startup). */
  async load(text: string): Promise<boolean> {
    this.state.expr = text;
    const seq = ++this.editSeq;
    await this.commit(text, seq);
    return this.state.lastError === null;
  }

  private async commit(text: string, seq: number): Promise<void> {
    if (seq !== this.editSeq) {
      return; // superseded
    }
    if (text.trim() === "") {
      this.state.lastError = null;
      this.emit();
      return; // empty expression: no request, panels go blank
    }
    let result;
    try {
      result = await this.client.parseExpr(text, this.state.mode);
    } catch (err) {
      this.state.banner = `network: ${String(err)}`;
      this.emit();
      return; // buffered audio keeps playing
    }
    if (seq !== this.editSeq) {
      return;
    }
    if (result.ok) {
      this.activeExpr = text;
      this.state.lastError = null;
      this.state.banner = null;
    } else {
      this.state.lastError = result.error;
    }
    this.emit();
  }

  /** Switch semantics mode; the stream swaps only if the playing
   * expression is valid under the new mode. */
  async setMode(mode: Mode): Promise<void> {
    const candidate = this.activeExpr ?? this.state.expr;
    if (candidate === null || candidate.trim() === "") {
      this.state.mode = mode;
      this.emit();
      return;
    }
    const result = await this.client.parseExpr(candidate, mode);
    if (result.ok) {
      this.state.mode = mode;
      this.state.lastError = null;
    } else {
      this.state.lastError = result.error;
    }
    this.emit();
  }

  setRate(rate: number): void {
    this.state.rate = rate;
    this.emit();
  }

  play(): void {
    if (this.activeExpr !== null) {
      this.state.playing = true;
      this.emit();
    }
  }

  pause(): void {
    this.state.playing = false;
    this.emit();
  }

  restart(): void {
    this.state.playHead = 0;
    this.emit();
  }

  /** Fetch the next chunk for the playing expression and advance the
   * play head.  On failure the head does not move, so a retry fetches
   * the same range. */
  async nextChunk(): Promise<Chunk> {
    if (this.activeExpr === null) {
      throw new Error("nothing playable yet");
    }
    const t0 = this.state.playHead;
    const bytes = await this.client.fetchChunk(
      this.activeExpr,
      this.state.mode,
      t0,
      this.chunkSamples,
    );
    this.state.playHead = t0 + bytes.length;
    this.emit();
    return { t0, bytes };
  }
}
