// Slider detents for the smoothness parameter.
//
// The service owns the grid; the slider is just an index into it, so the
// detent set and the service grid are the same values by construction.

export interface Detent {
  index: number;
  value: number;
  label: string;
}

export function detentLabel(value: number): string {
  if (value === 0) return "0";
  const exponent = Math.log10(value);
  const rounded = Math.round(exponent * 2) / 2;
  if (Number.isInteger(rounded) && rounded <= 3) return String(10 ** rounded);
  return `10^${rounded}`;
}

export function buildDetents(grid: number[]): Detent[] {
  return grid.map((value, index) => ({ index, value, label: detentLabel(value) }));
}

export function detentFor(detents: Detent[], value: number): Detent {
  const hit = detents.find((d) => d.value === value);
  if (!hit) throw new Error(`value ${value} is not on the service grid`);
  return hit;
}

export function valueAt(detents: Detent[], index: number): number {
  if (index < 0 || index >= detents.length) {
    throw new Error(`detent index ${index} out of range 0..${detents.length - 1}`);
  }
  return detents[index].value;
}
