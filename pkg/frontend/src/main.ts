import { ReviewApi } from './api.js';
import { ReviewSession } from './session.js';
import { Point, nearestVertex } from './geometry.js';
import { drawViewer, maskBits, overlayRaster, rasterFromImage } from './overlay.js';

const api = new ReviewApi('');
const session = new ReviewSession(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>('viewer');
const ctx = canvas.getContext('2d')!;
const worklist = el<HTMLUListElement>('worklist');
const banner = el<HTMLDivElement>('banner');
const validation = el<HTMLDivElement>('validation');
const retryBtn = el<HTMLButtonElement>('retry');
const slider = el<HTMLInputElement>('slider');
const candReadout = el<HTMLSpanElement>('cand-readout');
const opacitySlider = el<HTMLInputElement>('opacity');
const opacityReadout = el<HTMLSpanElement>('opacity-readout');
const reviewerInput = el<HTMLInputElement>('reviewer');
const submitBtn = el<HTMLButtonElement>('submit');
const labelToggle = el<HTMLButtonElement>('label-toggle');
const labelValue = el<HTMLSpanElement>('label-value');
const clearPolyBtn = el<HTMLButtonElement>('clear-poly');
const statusLine = el<HTMLSpanElement>('status');

let baseImage: HTMLImageElement | null = null;
let scale = 4;
let dragIndex = -1;
let redrawToken = 0;

const images = new Map<string, Promise<HTMLImageElement>>();
const bitsCache = new Map<string, Uint8Array>();

function loadImage(url: string): Promise<HTMLImageElement> {
  let p = images.get(url);
  if (!p) {
    p = new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () => resolve(img);
      img.onerror = () => reject(new Error(`cannot load ${url}`));
      img.src = url;
    });
    images.set(url, p);
  }
  return p;
}

async function bitsFor(maskUrl: string): Promise<Uint8Array> {
  const hit = bitsCache.get(maskUrl);
  if (hit) return hit;
  const img = await loadImage(maskUrl);
  const bits = maskBits(rasterFromImage(img));
  bitsCache.set(maskUrl, bits);
  return bits;
}

/** Canvas pixel -> image pixel, clamped to the ROI. */
function toImagePoint(ev: MouseEvent): Point {
  const side = baseImage ? baseImage.naturalWidth : 1;
  const clamp = (v: number) => Math.min(side - 1, Math.max(0, Math.round(v)));
  return [clamp(ev.offsetX / scale - 0.5), clamp(ev.offsetY / scale - 0.5)];
}

async function redraw(): Promise<void> {
  const token = ++redrawToken;
  const cand = session.chosenCandidate();
  let overlay = null;
  if (cand && baseImage) {
    const bits = await bitsFor(cand.maskUrl);
    if (token !== redrawToken) return; // a newer frame superseded this one
    overlay = overlayRaster(
      bits,
      baseImage.naturalWidth,
      baseImage.naturalHeight,
      session.overlayOpacity,
    );
  }
  drawViewer(ctx, baseImage, overlay, session.polygon, scale);
}

function renderWorklist(): void {
  worklist.textContent = '';
  for (const roi of session.rois) {
    const item = document.createElement('li');
    const btn = document.createElement('button');
    btn.textContent = roi.roi_id;
    btn.className = session.current?.roiId === roi.roi_id ? 'active' : '';
    btn.onclick = () => void openRoi(roi.roi_id);
    item.appendChild(btn);
    if (roi.reviewed) {
      const badge = document.createElement('span');
      badge.className = 'badge';
      badge.textContent = 'reviewed';
      item.appendChild(badge);
    }
    worklist.appendChild(item);
  }
}

function render(): void {
  renderWorklist();
  banner.textContent = session.errorBanner ?? '';
  banner.hidden = session.errorBanner === null;
  validation.textContent = session.validationMessage ?? '';
  validation.hidden = session.validationMessage === null;
  retryBtn.hidden = !session.retryAvailable;

  const cur = session.current;
  const cand = session.chosenCandidate();
  if (cur && cand) {
    slider.max = String(cur.candidates.length - 1);
    slider.value = String(session.chosenIndex);
    slider.disabled = false;
    candReadout.textContent =
      `candidate ${session.chosenIndex + 1} of ${cur.candidates.length}  ` +
      `threshold ${cand.threshold.toFixed(1)}  pixels ${cand.pixelCount}`;
    statusLine.textContent = `${cur.roiId} (${cur.view}, ${cur.spacingMm} mm/px)`;
  } else {
    slider.disabled = true;
    candReadout.textContent = '';
    statusLine.textContent = 'no case loaded';
  }
  labelValue.textContent = session.showLabel
    ? (session.biradsOfCurrent() ?? 'n/a')
    : 'hidden';
  labelToggle.textContent = session.showLabel ? 'hide label' : 'show label';
  opacityReadout.textContent = `${Math.round(session.overlayOpacity * 100)}%`;
  void redraw();
}

async function openRoi(roiId: string): Promise<void> {
  const ok = await session.open(roiId);
  if (ok && session.current) {
    baseImage = await loadImage(session.current.imageUrl);
    scale = Math.max(1, Math.floor(512 / baseImage.naturalWidth));
    canvas.width = baseImage.naturalWidth * scale;
    canvas.height = baseImage.naturalHeight * scale;
  }
  render();
}

async function submit(): Promise<void> {
  const before = session.current?.roiId;
  const ok = await session.submit(reviewerInput.value.trim() || 'anonymous');
  if (ok && session.current && session.current.roiId !== before) {
    baseImage = await loadImage(session.current.imageUrl);
    scale = Math.max(1, Math.floor(512 / baseImage.naturalWidth));
    canvas.width = baseImage.naturalWidth * scale;
    canvas.height = baseImage.naturalHeight * scale;
  }
  render();
}

slider.addEventListener('input', () => {
  session.choose(Number(slider.value));
  render();
});

opacitySlider.addEventListener('input', () => {
  session.overlayOpacity = Number(opacitySlider.value) / 100;
  render();
});

submitBtn.addEventListener('click', () => void submit());
retryBtn.addEventListener('click', () => void submit());
clearPolyBtn.addEventListener('click', () => {
  session.clearPolygon();
  render();
});
labelToggle.addEventListener('click', () => {
  session.showLabel = !session.showLabel;
  render();
});

canvas.addEventListener('mousedown', (ev) => {
  if (!session.current) return;
  const p = toImagePoint(ev);
  const near = nearestVertex(session.polygon, p, Math.max(2, 8 / scale));
  if (near >= 0) {
    dragIndex = near;
  } else {
    session.addVertex(p);
    render();
  }
});

canvas.addEventListener('mousemove', (ev) => {
  if (dragIndex < 0) return;
  session.moveVertex(dragIndex, toImagePoint(ev));
  render();
});

window.addEventListener('mouseup', () => {
  dragIndex = -1;
});

// Keyboard-only path: arrows step candidates, Enter accepts, brackets set
// opacity, n/p walk the worklist. Typing in the reviewer box is left alone.
document.addEventListener('keydown', (ev) => {
  const inText =
    ev.target instanceof HTMLInputElement && ev.target.type === 'text';
  if (ev.key === 'Enter') {
    void submit();
    return;
  }
  if (inText) return;
  switch (ev.key) {
    case 'ArrowLeft':
      session.step(-1);
      render();
      break;
    case 'ArrowRight':
      session.step(1);
      render();
      break;
    case '[':
      session.overlayOpacity = Math.max(0, session.overlayOpacity - 0.05);
      opacitySlider.value = String(Math.round(session.overlayOpacity * 100));
      render();
      break;
    case ']':
      session.overlayOpacity = Math.min(1, session.overlayOpacity + 0.05);
      opacitySlider.value = String(Math.round(session.overlayOpacity * 100));
      render();
      break;
    case 'Backspace':
      session.removeLastVertex();
      render();
      break;
    case 'Escape':
      session.clearPolygon();
      render();
      break;
    case 'n':
    case 'p': {
      const ids = session.rois.map((r) => r.roi_id);
      if (ids.length === 0 || !session.current) break;
      const at = ids.indexOf(session.current.roiId);
      const next = ids[(at + (ev.key === 'n' ? 1 : ids.length - 1)) % ids.length];
      void openRoi(next);
      break;
    }
  }
});

// Worklist flags can go stale if the selections file changes on disk while
// the tab is in the background; re-pull on focus.
window.addEventListener('focus', () => {
  void session.refresh().then(render);
});

async function boot(): Promise<void> {
  try {
    await session.refresh();
  } catch (err) {
    session.errorBanner = `service unreachable: ${String(err)}`;
    render();
    return;
  }
  opacitySlider.value = String(Math.round(session.overlayOpacity * 100));
  const first = session.nextUnreviewed(null) ?? session.rois[0]?.roi_id;
  if (first) {
    await openRoi(first);
  } else {
    render();
  }
}

void boot();
