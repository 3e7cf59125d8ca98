/** DOM wiring for the playground page. */

import { ApiClient, Mode } from "./api.js";
import { Player, WebAudioSink } from "./player.js";
import { Session, caretLine } from "./session.js";
import { drawBitBands, drawWaveform, pitchLabel } from "./visuals.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const client = new ApiClient("");
const session = new Session(client);
let sink = new WebAudioSink(session.state.rate);
let player = new Player(session, sink);

const exprInput = $<HTMLInputElement>("expr");
const errorPane = $<HTMLPreElement>("error");
const banner = $<HTMLDivElement>("banner");
const modeSelect = $<HTMLSelectElement>("mode");
const rateInput = $<HTMLInputElement>("rate");
const presetSelect = $<HTMLSelectElement>("presets");
const playButton = $<HTMLButtonElement>("play");
const restartButton = $<HTMLButtonElement>("restart");
const headLabel = $<HTMLSpanElement>("head");
const pitchOut = $<HTMLSpanElement>("pitch");
const waveCanvas = $<HTMLCanvasElement>("wave");
const bitsCanvas = $<HTMLCanvasElement>("bits");

let lastBytes: Uint8Array = new Uint8Array(0);

function refresh(): void {
  const state = session.state;
  playButton.textContent = state.playing ? "pause" : "play";
  headLabel.textContent = `t = ${state.playHead}`;
  banner.textContent = state.banner ?? "";
  banner.style.display = state.banner ? "block" : "none";
  if (state.lastError && state.lastError.pos !== null) {
    errorPane.textContent =
      `${state.lastError.kind}: ${state.lastError.msg}\n` +
      `${state.expr}\n${caretLine(state.lastError.pos)}`;
    errorPane.style.display = "block";
  } else if (state.lastError) {
    errorPane.textContent = `${state.lastError.kind}: ${state.lastError.msg}`;
    errorPane.style.display = "block";
  } else {
    errorPane.style.display = "none";
  }
}

session.onChange(refresh);

player.onChunk = (chunk) => {
  lastBytes = chunk.bytes;
  const ctx = waveCanvas.getContext("2d");
  if (ctx) {
    drawWaveform(ctx, lastBytes, waveCanvas.width, waveCanvas.height);
  }
};

player.onStall = () => refresh();

async function pollPanels(): Promise<void> {
  const expr = session.playingExpr;
  if (!expr || !session.state.playing) {
    return;
  }
  const { mode, playHead } = session.state;
  const t0 = Math.max(0, playHead - session.chunkSamples);
  try {
    const matrix = await client.analyzeBits(expr, mode, t0, session.chunkSamples, 256);
    const ctx = bitsCanvas.getContext("2d");
    if (ctx) {
      drawBitBands(ctx, matrix, bitsCanvas.width, bitsCanvas.height);
    }
    const events = await client.analyzePitch(expr, mode, t0, session.chunkSamples, 1024, "a440");
    pitchOut.textContent = pitchLabel(events);
  } catch {
    // analysis hiccups degrade panels without stopping audio
  }
}

async function loadPresets(): Promise<void> {
  const entries = await client.presets();
  for (const preset of entries) {
    if (preset.status === "truncated") {
      continue;
    }
    const option = document.createElement("option");
    option.value = preset.source;
    option.textContent = `${preset.id} — ${preset.source}`;
    presetSelect.appendChild(option);
  }
}

function rebuildSink(): void {
  void sink.close();
  sink = new WebAudioSink(session.state.rate);
  player.pause();
  player = new Player(session, sink);
  player.onChunk = (chunk) => {
    lastBytes = chunk.bytes;
    const ctx = waveCanvas.getContext("2d");
    if (ctx) {
      drawWaveform(ctx, lastBytes, waveCanvas.width, waveCanvas.height);
    }
  };
}

exprInput.addEventListener("input", () => void session.edit(exprInput.value));

modeSelect.addEventListener("change", () => void session.setMode(modeSelect.value as Mode));

rateInput.addEventListener("change", () => {
  const rate = Number(rateInput.value) || 8000;
  session.setRate(rate);
  rebuildSink();
  if (session.state.playing) {
    player.start();
  }
});

presetSelect.addEventListener("change", async () => {
  if (!presetSelect.value) {
    return;
  }
  exprInput.value = presetSelect.value;
  await session.load(presetSelect.value);
});

playButton.addEventListener("click", () => {
  if (session.state.playing) {
    player.pause();
  } else {
    void sink.resume();
    player.start();
  }
});

restartButton.addEventListener("click", () => {
  session.restart();
});

setInterval(() => void pollPanels(), 500);
void loadPresets();
refresh();
