// SVG path construction for curve panels.
//
// Points come straight from service curve samples; the only arithmetic
// here is coordinate projection onto the viewport.

import type { CurveSample } from "./types.js";

export interface ChartBox {
  width: number;
  height: number;
  pad: number;
}

export function curvePoints(curve: CurveSample, logAxis: boolean): [number[], number[]] {
  const xs = logAxis && curve.xs_log1p ? curve.xs_log1p : curve.xs;
  return [xs, curve.cs];
}

export function pathFor(
  xs: number[],
  ys: number[],
  box: ChartBox,
  xRange?: [number, number],
  yRange?: [number, number],
): string {
  if (xs.length === 0 || xs.length !== ys.length) return "";
  const [x0, x1] = xRange ?? [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = yRange ?? [Math.min(...ys), Math.max(...ys)];
  const spanX = x1 - x0 || 1;
  const spanY = y1 - y0 || 1;
  const inner = { w: box.width - 2 * box.pad, h: box.height - 2 * box.pad };
  const parts = xs.map((x, i) => {
    const px = box.pad + ((x - x0) / spanX) * inner.w;
    const py = box.height - box.pad - ((ys[i] - y0) / spanY) * inner.h;
    return `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`;
  });
  return parts.join(" ");
}
