/** Geometry for the ROI bounding box and the 3x3 location grid, plus the
 * canvas painting that uses it. Cell boundaries sit at floor(extent/3) and
 * 2*floor(extent/3), matching the indexer's grid math. */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function bboxRect(bbox: readonly number[]): Rect {
  const [x1, y1, x2, y2] = bbox;
  return { x: x1, y: y1, w: x2 - x1 + 1, h: y2 - y1 + 1 };
}

export function gridBoundaries(extent: number): [number, number] {
  const c = Math.floor(extent / 3);
  return [c, 2 * c];
}

export function cellRect(cell: number, width: number, height: number): Rect {
  const cw = Math.floor(width / 3);
  const ch = Math.floor(height / 3);
  const row = Math.floor(cell / 3);
  const col = cell % 3;
  // the last row/column extends to the image edge
  const w = col === 2 ? width - 2 * cw : cw;
  const h = row === 2 ? height - 2 * ch : ch;
  return { x: col * cw, y: row * ch, w, h };
}

export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource,
  width: number,
  height: number,
  bbox: readonly number[] | null,
  highlightCell: number | null,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.drawImage(image, 0, 0, width, height);

  ctx.strokeStyle = "rgba(120, 180, 255, 0.55)";
  ctx.lineWidth = 1;
  const [vx1, vx2] = gridBoundaries(width);
  const [hy1, hy2] = gridBoundaries(height);
  for (const x of [vx1, vx2]) {
    ctx.beginPath();
    ctx.moveTo(x + 0.5, 0);
    ctx.lineTo(x + 0.5, height);
    ctx.stroke();
  }
  for (const y of [hy1, hy2]) {
    ctx.beginPath();
    ctx.moveTo(0, y + 0.5);
    ctx.lineTo(width, y + 0.5);
    ctx.stroke();
  }

  if (highlightCell !== null) {
    const r = cellRect(highlightCell, width, height);
    ctx.fillStyle = "rgba(120, 180, 255, 0.18)";
    ctx.fillRect(r.x, r.y, r.w, r.h);
  }

  if (bbox) {
    const r = bboxRect(bbox);
    ctx.strokeStyle = "rgb(255, 64, 64)";
    ctx.lineWidth = 2;
    ctx.strokeRect(r.x, r.y, r.w, r.h);
  }
}
