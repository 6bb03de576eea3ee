/**
 * Operator console entry point: wires the socket, renderer, camera, charts
 * and ack-gated controls to the DOM. Pure logic lives in the sibling
 * modules; this file is deliberately all glue.
 */

import { OrbitCamera } from './camera.js';
import { ScrollingChart, TriggerMatrix, CellLike } from './charts.js';
import { AckGate, ControlRequest, ParamName, Reply } from './controls.js';
import { FramePacket } from './packet.js';
import { SessionSocket } from './net.js';
import { FpsCounter, PointRenderer } from './renderer.js';

interface ParamSpec {
  name: ParamName;
  label: string;
  min: number;
  max: number;
  step: number;
}

const PARAM_SPECS: ParamSpec[] = [
  { name: 'num-points-to-average', label: 'Averaging window (hops)', min: 1, max: 32, step: 1 },
  { name: 'num-points-to-average-vol', label: 'Volatility window (hops)', min: 1, max: 32, step: 1 },
  { name: 'trigger-val', label: 'Trigger level (%)', min: 0, max: 100, step: 1 },
  { name: 'max-average', label: 'Average ceiling', min: 0.05, max: 2, step: 0.01 },
  { name: 'max-trigger', label: 'Trigger ceiling', min: 0.01, max: 1, step: 0.01 },
  { name: 'color-sensitivity', label: 'Color sensitivity', min: 0.1, max: 8, step: 0.1 },
  { name: 'range_max', label: 'Bin range max', min: 0.01, max: 1, step: 0.01 },
];

const PRESETS = ['default', 'oceanic', 'scriabin'];

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const canvas = byId<HTMLCanvasElement>('view');
  const statusEl = byId<HTMLSpanElement>('status');
  const fpsEl = byId<HTMLSpanElement>('fps');
  const frameEl = byId<HTMLSpanElement>('frame-info');
  const warningsEl = byId<HTMLDivElement>('warnings');

  const gl = canvas.getContext('webgl2');
  if (!gl) {
    warningsEl.textContent = 'WebGL2 is unavailable; cannot render particles.';
    return;
  }

  const renderer = new PointRenderer(gl);
  const camera = new OrbitCamera();
  const fpsCounter = new FpsCounter();
  const gate = new AckGate();

  function toast(message: string): void {
    const note = document.createElement('div');
    note.className = 'toast';
    note.textContent = message;
    warningsEl.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }

  // ---- charts and trigger matrix -------------------------------------
  const chartDefs: Array<[string, string]> = [
    ['chart-bins', 'frequency values'],
    ['chart-avg', 'averaged frequency values'],
    ['chart-vol', 'volatility'],
    ['chart-avg-vol', 'averaged volatility'],
  ];
  const charts = chartDefs.map(([id, label]) => ({
    canvas: byId<HTMLCanvasElement>(id),
    chart: new ScrollingChart({ label, min: 0, max: 1 }),
  }));

  const matrixHost = byId<HTMLDivElement>('trigger-matrix');
  const cells: CellLike[] = [];
  for (let i = 0; i < 12; i++) {
    const cell = document.createElement('div');
    cell.className = 'trigger-cell';
    cell.title = `bin ${i}`;
    matrixHost.appendChild(cell);
    cells.push(cell);
  }
  const matrix = new TriggerMatrix(cells);

  // ---- controls -------------------------------------------------------
  const sliderInputs = new Map<ParamName, HTMLInputElement>();
  const sliderLabels = new Map<ParamName, HTMLSpanElement>();
  const slidersHost = byId<HTMLDivElement>('sliders');
  for (const spec of PARAM_SPECS) {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const title = document.createElement('span');
    title.textContent = spec.label;
    const value = document.createElement('span');
    value.className = 'slider-value';
    const input = document.createElement('input');
    input.type = 'range';
    input.min = String(spec.min);
    input.max = String(spec.max);
    input.step = String(spec.step);
    input.addEventListener('input', () => {
      value.textContent = input.value;
    });
    input.addEventListener('change', () => {
      sendRequest({ type: 'set_param', name: spec.name,
                    value: Number(input.value) });
    });
    row.append(title, input, value);
    slidersHost.appendChild(row);
    sliderInputs.set(spec.name, input);
    sliderLabels.set(spec.name, value);
  }

  const pickerInputs: HTMLInputElement[] = [];
  const pickersHost = byId<HTMLDivElement>('pickers');
  for (let i = 0; i < 12; i++) {
    const input = document.createElement('input');
    input.type = 'color';
    input.title = `bin ${i} base color`;
    input.addEventListener('change', () => {
      sendRequest({ type: 'set_param', name: `bin-color-${i}`,
                    value: input.value });
    });
    pickersHost.appendChild(input);
    pickerInputs.push(input);
  }

  const presetSelect = byId<HTMLSelectElement>('preset');
  for (const name of PRESETS) {
    const option = document.createElement('option');
    option.value = name;
    option.textContent = name;
    presetSelect.appendChild(option);
  }
  presetSelect.addEventListener('change', () => {
    sendRequest({ type: 'set_preset', name: presetSelect.value });
  });

  const playBtn = byId<HTMLButtonElement>('play');
  const pauseBtn = byId<HTMLButtonElement>('pause');
  const resetSimBtn = byId<HTMLButtonElement>('reset-sim');
  const resetCamBtn = byId<HTMLButtonElement>('reset-camera');
  const songInput = byId<HTMLInputElement>('song-path');
  const loadBtn = byId<HTMLButtonElement>('load-song');

  playBtn.addEventListener('click', () => sendRequest({ type: 'play' }));
  pauseBtn.addEventListener('click', () => sendRequest({ type: 'pause' }));
  resetSimBtn.addEventListener('click', () => sendRequest({ type: 'reset_sim' }));
  resetCamBtn.addEventListener('click', () => camera.reset());
  loadBtn.addEventListener('click', () => {
    const path = songInput.value.trim();
    if (path) sendRequest({ type: 'load_song', path });
  });

  function refreshControls(): void {
    const view = gate.view();
    for (const spec of PARAM_SPECS) {
      const input = sliderInputs.get(spec.name)!;
      input.value = String(view.params[spec.name]);
      sliderLabels.get(spec.name)!.textContent = input.value;
    }
    view.colors.forEach((hex, i) => {
      pickerInputs[i].value = hex;
    });
    presetSelect.value = view.presetName;
    playBtn.disabled = view.playing;
    pauseBtn.disabled = !view.playing;
  }

  // ---- transport ------------------------------------------------------
  const socket = new SessionSocket(`ws://${location.host}/ws`, {
    onStatus: (status) => {
      statusEl.textContent = status;
      statusEl.className = `status-${status}`;
      if (status === 'closed' && gate.abandonPending().length) {
        toast('connection lost; unacked changes discarded');
        refreshControls();
      }
    },
    onReply: (reply: Reply) => {
      const outcome = gate.handleReply(reply);
      if (outcome.kind === 'error') {
        toast(`rejected: ${outcome.message}`);
      } else if (outcome.kind === 'unmatched') {
        toast('server reply did not match any request');
      }
      refreshControls();
    },
    onWarning: toast,
  });

  function sendRequest(request: ControlRequest): void {
    if (socket.send(request)) {
      gate.track(request);
    } else {
      toast('not connected; control ignored');
      refreshControls();
    }
  }

  // ---- camera keys ----------------------------------------------------
  const held = new Set<string>();
  const CAMERA_KEYS = new Set(['a', 's', 'd', 'w', 'q', 'z']);
  canvas.tabIndex = 0;
  canvas.addEventListener('keydown', (event) => {
    const key = event.key.toLowerCase();
    if (CAMERA_KEYS.has(key)) {
      held.add(key);
      event.preventDefault();
    } else if (key === 'r') {
      camera.reset();
    }
  });
  canvas.addEventListener('keyup', (event) => {
    held.delete(event.key.toLowerCase());
  });
  canvas.addEventListener('blur', () => held.clear());
  canvas.addEventListener('click', () => canvas.focus());

  // ---- frame loop -----------------------------------------------------
  let lastPacket: FramePacket | null = null;
  let lastTime = performance.now();
  let lastHud = 0;

  function resize(): void {
    const dpr = window.devicePixelRatio || 1;
    const w = Math.round(canvas.clientWidth * dpr);
    const h = Math.round(canvas.clientHeight * dpr);
    if (canvas.width !== w || canvas.height !== h) {
      canvas.width = w;
      canvas.height = h;
    }
  }

  function tick(now: number): void {
    const dt = Math.min(0.1, (now - lastTime) / 1000);
    lastTime = now;
    camera.update(held, dt);

    const packet = socket.frames.takeLatest();
    if (packet) {
      lastPacket = packet;
      charts[0].chart.push(packet.bins);
      charts[1].chart.push(packet.avgBins);
      charts[2].chart.push(packet.volatility);
      charts[3].chart.push(packet.avgVolatility);
      matrix.update(packet.triggers);
      frameEl.textContent =
        `frame ${packet.frameIndex} · t=${packet.timestamp.toFixed(2)}s · ` +
        `${packet.count.toLocaleString()} pts · dyn ${packet.dynamics.toFixed(0)}%`;
      for (const { canvas: c, chart } of charts) {
        const ctx = c.getContext('2d');
        if (ctx) chart.draw(ctx, c.width, c.height);
      }
    }

    resize();
    if (lastPacket) {
      const aspect = canvas.width / Math.max(1, canvas.height);
      renderer.draw(lastPacket, camera.viewProjection(aspect),
                    canvas.width, canvas.height);
    }

    fpsCounter.tick(now);
    if (now - lastHud > 250) {
      lastHud = now;
      fpsEl.textContent = `${fpsCounter.fps()} fps`;
    }
    requestAnimationFrame(tick);
  }

  refreshControls();
  socket.connect();
  canvas.focus();
  requestAnimationFrame(tick);
}

main();
