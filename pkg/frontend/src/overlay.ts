import { Point } from './geometry.js';

/** RGBA pixel buffer, layout-compatible with canvas ImageData. */
export interface Raster {
  width: number;
  height: number;
  data: Uint8ClampedArray;
}

/** Single hue used for every candidate overlay; margins stay readable when
 *  only opacity varies. */
export const FILL_RGB: [number, number, number] = [255, 170, 0];

/** Binary mask from a decoded mask PNG: 1 where the pixel is in the mass. */
export function maskBits(img: Raster): Uint8Array {
  const n = img.width * img.height;
  const bits = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    if (img.data[i * 4] > 127) bits[i] = 1;
  }
  return bits;
}

/** Mask pixels that touch the outside through a 4-neighbour or the image
 *  edge; these form the 1-pixel contour outline. */
export function outlineBits(bits: Uint8Array, width: number, height: number): Uint8Array {
  const out = new Uint8Array(bits.length);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = y * width + x;
      if (!bits[i]) continue;
      if (
        x === 0 || x === width - 1 || y === 0 || y === height - 1 ||
        !bits[i - 1] || !bits[i + 1] || !bits[i - width] || !bits[i + width]
      ) {
        out[i] = 1;
      }
    }
  }
  return out;
}

/**
 * Build the translucent overlay image for one candidate: a single-hue fill
 * at the given opacity plus a fully opaque 1-pixel outline. Pixels outside
 * the mask stay transparent, so the equalized ROI underneath is untouched.
 */
export function overlayRaster(
  bits: Uint8Array,
  width: number,
  height: number,
  opacity: number,
): Raster {
  const outline = outlineBits(bits, width, height);
  const data = new Uint8ClampedArray(width * height * 4);
  const fillAlpha = Math.round(Math.min(1, Math.max(0, opacity)) * 255);
  const [r, g, b] = FILL_RGB;
  for (let i = 0; i < bits.length; i++) {
    if (!bits[i]) continue;
    data[i * 4] = r;
    data[i * 4 + 1] = g;
    data[i * 4 + 2] = b;
    data[i * 4 + 3] = outline[i] ? 255 : fillAlpha;
  }
  return { width, height, data };
}

/** Decode an already-loaded image element into raw RGBA. */
export function rasterFromImage(img: HTMLImageElement): Raster {
  const canvas = document.createElement('canvas');
  canvas.width = img.naturalWidth;
  canvas.height = img.naturalHeight;
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('2d canvas unavailable');
  ctx.drawImage(img, 0, 0);
  const data = ctx.getImageData(0, 0, canvas.width, canvas.height);
  return { width: data.width, height: data.height, data: data.data };
}

/**
 * Paint one frame of the viewer: the ROI image, the candidate overlay, and
 * the draft polygon with its vertex handles. `scale` is the integer zoom
 * factor from image pixels to canvas pixels.
 */
export function drawViewer(
  ctx: CanvasRenderingContext2D,
  base: HTMLImageElement | null,
  overlay: Raster | null,
  polygon: Point[],
  scale: number,
): void {
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  if (base) {
    ctx.drawImage(base, 0, 0, base.naturalWidth * scale, base.naturalHeight * scale);
  }
  if (overlay) {
    const off = document.createElement('canvas');
    off.width = overlay.width;
    off.height = overlay.height;
    const octx = off.getContext('2d');
    if (octx) {
      const frame = octx.createImageData(overlay.width, overlay.height);
      frame.data.set(overlay.data);
      octx.putImageData(frame, 0, 0);
      ctx.drawImage(off, 0, 0, overlay.width * scale, overlay.height * scale);
    }
  }
  if (polygon.length > 0) {
    ctx.strokeStyle = '#27d0ff';
    ctx.fillStyle = '#27d0ff';
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    polygon.forEach(([x, y], i) => {
      const cx = (x + 0.5) * scale;
      const cy = (y + 0.5) * scale;
      if (i === 0) ctx.moveTo(cx, cy);
      else ctx.lineTo(cx, cy);
    });
    if (polygon.length >= 3) ctx.closePath();
    ctx.stroke();
    for (const [x, y] of polygon) {
      ctx.fillRect((x + 0.5) * scale - 2, (y + 0.5) * scale - 2, 5, 5);
    }
  }
}
