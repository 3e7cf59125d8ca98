/** Typed client for the workbench HTTP API.  The UI never computes
 * samples itself: every audio byte comes from /render. */

export type Mode = "c32" | "c64" | "js";

export interface ApiError {
  kind: string;
  pos: number | null;
  msg: string;
}

export type ParseResult =
  | { ok: true; canonical: string }
  | { ok: false; error: ApiError };

export interface Preset {
  id: string;
  source: string;
  family: string;
  credit: string | null;
  modes: Mode[];
  status: string;
}

export interface NoteEvent {
  t_start: number;
  t_len: number;
  freq: number | null;
  note: string | null;
  octave: number | null;
  cents: number | null;
}

export interface BandActivity {
  duty: number;
  toggles: number;
}

export interface BitBandMatrix {
  window_len: number;
  rows: BandActivity[][];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  async parseExpr(expr: string, mode: Mode): Promise<ParseResult> {
    const resp = await this.fetchFn(`${this.baseUrl}/expr/parse`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ expr, mode }),
    });
    if (!resp.ok) {
      throw new Error(`parse endpoint returned ${resp.status}`);
    }
    return (await resp.json()) as ParseResult;
  }

  renderUrl(expr: string, mode: Mode, t0: number, n: number): string {
    const query = new URLSearchParams({
      expr,
      mode,
      t0: String(t0),
      n: String(n),
    });
    return `${this.baseUrl}/render?${query}`;
  }

  async fetchChunk(expr: string, mode: Mode, t0: number, n: number): Promise<Uint8Array> {
    const resp = await this.fetchFn(this.renderUrl(expr, mode, t0, n));
    if (!resp.ok) {
      throw new Error(`render returned ${resp.status}`);
    }
    return new Uint8Array(await resp.arrayBuffer());
  }

  async presets(): Promise<Preset[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/presets`);
    if (!resp.ok) {
      throw new Error(`presets returned ${resp.status}`);
    }
    return (await resp.json()) as Preset[];
  }

  async analyzeBits(
    expr: string,
    mode: Mode,
    t0: number,
    n: number,
    window: number,
  ): Promise<BitBandMatrix> {
    const query = new URLSearchParams({
      expr,
      mode,
      t0: String(t0),
      n: String(n),
      window: String(window),
    });
    const resp = await this.fetchFn(`${this.baseUrl}/analyze/bits?${query}`);
    if (!resp.ok) {
      throw new Error(`analyze/bits returned ${resp.status}`);
    }
    return (await resp.json()) as BitBandMatrix;
  }

  async analyzePitch(
    expr: string,
    mode: Mode,
    t0: number,
    n: number,
    window: number,
    ref: "a440" | "c256",
  ): Promise<NoteEvent[]> {
    const query = new URLSearchParams({
      expr,
      mode,
      t0: String(t0),
      n: String(n),
      window: String(window),
      ref,
    });
    const resp = await this.fetchFn(`${this.baseUrl}/analyze/pitch?${query}`);
    if (!resp.ok) {
      throw new Error(`analyze/pitch returned ${resp.status}`);
    }
    return (await resp.json()) as NoteEvent[];
  }
}
