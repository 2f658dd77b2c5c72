/**
 * Browser entry point: loads a lens document, wires pointer and control
 * events into the recorder, and redraws on every state change.
 *
 * Documents come from the file picker or a ?doc= URL parameter. The
 * current state exports as CLI-compatible --order/--filter values, and
 * the full interaction log exports for replay.
 */

import { createRecorder } from './log.js';
import { serializeLog } from './log.js';
import { drawScene, legendRects, toWorld, fitViewport } from './render.js';
import { exportStateFlags, hitTest } from './state.js';
import type { ViewerEvent } from './state.js';
import { parseLensDocument } from './types.js';
import type { LensDocument } from './types.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

const canvas = byId<HTMLCanvasElement>('lens');
const ctx = canvas.getContext('2d')!;
const readout = byId<HTMLDivElement>('readout');
const orderingSelect = byId<HTMLSelectElement>('ordering');
const modeButton = byId<HTMLButtonElement>('mode');
const fileInput = byId<HTMLInputElement>('file');

let recorder: ReturnType<typeof createRecorder> | null = null;

function canvasSize(): [number, number] {
  const rect = canvas.getBoundingClientRect();
  if (canvas.width !== rect.width || canvas.height !== rect.height) {
    canvas.width = rect.width;
    canvas.height = rect.height;
  }
  return [canvas.width, canvas.height];
}

function redraw(): void {
  if (recorder === null) {
    return;
  }
  const [w, h] = canvasSize();
  drawScene(ctx, recorder.state, w, h);
  modeButton.textContent = `radial: ${recorder.state.radialMode}`;
  modeButton.title = recorder.state.doc.cyclic
    ? 'toggle between time navigation and wrapped reordering'
    : 'wrapped reordering needs a cyclic series';
}

function dispatch(event: ViewerEvent): void {
  if (recorder === null) {
    return;
  }
  recorder.dispatch(event);
  redraw();
}

function loadDocument(text: string): void {
  const doc: LensDocument = parseLensDocument(text);
  recorder = createRecorder(doc);
  redraw();
}

function pointerWorld(ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const vp = fitViewport(recorder!.state.doc, canvas.width, canvas.height);
  return toWorld(vp, ev.clientX - rect.left, ev.clientY - rect.top);
}

canvas.addEventListener('pointerdown', (ev) => {
  if (recorder === null) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const sx = ev.clientX - rect.left;
  const sy = ev.clientY - rect.top;
  const hitLegend = legendRects(recorder.state, canvas.width, canvas.height)
    .find((r) => sx >= r.x && sx <= r.x + r.w && sy >= r.y && sy <= r.y + r.h);
  if (hitLegend !== undefined) {
    dispatch({ kind: 'toggle-legend', segment: hitLegend.segment });
    return;
  }
  canvas.setPointerCapture(ev.pointerId);
  const [x, y] = pointerWorld(ev);
  dispatch({ kind: 'pointer-down', x, y });
});

canvas.addEventListener('pointermove', (ev) => {
  if (recorder === null) {
    return;
  }
  const [x, y] = pointerWorld(ev);
  if (recorder.state.gesture.anchor !== null) {
    dispatch({ kind: 'pointer-move', x, y });
  }
  const hit = hitTest(recorder.state, x, y);
  readout.textContent = hit === null
    ? ''
    : `facade ${hit.facade} · ribbon ${hit.ribbon} · value ${hit.value}`;
});

canvas.addEventListener('pointerup', (ev) => {
  if (recorder === null || recorder.state.gesture.anchor === null) {
    return;
  }
  const [x, y] = pointerWorld(ev);
  dispatch({ kind: 'pointer-up', x, y });
});

orderingSelect.addEventListener('change', () => {
  dispatch({ kind: 'set-ordering', spec: orderingSelect.value });
});

modeButton.addEventListener('click', () => {
  if (recorder === null) {
    return;
  }
  const next = recorder.state.radialMode === 'navigate' ? 'reorder' : 'navigate';
  dispatch({ kind: 'set-radial-mode', mode: next });
});

byId<HTMLButtonElement>('clear-axis').addEventListener('click', () => {
  dispatch({ kind: 'clear-axis' });
});

byId<HTMLButtonElement>('clear-selection').addEventListener('click', () => {
  dispatch({ kind: 'clear-selection' });
});

function download(name: string, text: string): void {
  const url = URL.createObjectURL(new Blob([text], { type: 'application/json' }));
  const a = document.createElement('a');
  a.href = url;
  a.download = name;
  a.click();
  URL.revokeObjectURL(url);
}

byId<HTMLButtonElement>('export-state').addEventListener('click', () => {
  if (recorder !== null) {
    download('lens-state.json', JSON.stringify(exportStateFlags(recorder.state)));
  }
});

byId<HTMLButtonElement>('export-log').addEventListener('click', () => {
  if (recorder !== null) {
    download('lens-log.json', serializeLog([...recorder.events]));
  }
});

fileInput.addEventListener('change', async () => {
  const file = fileInput.files?.[0];
  if (file !== undefined) {
    loadDocument(await file.text());
  }
});

window.addEventListener('resize', redraw);

const docUrl = new URLSearchParams(window.location.search).get('doc');
if (docUrl !== null) {
  fetch(docUrl)
    .then((res) => res.text())
    .then(loadDocument)
    .catch((err) => {
      readout.textContent = `failed to load ${docUrl}: ${err}`;
    });
}
