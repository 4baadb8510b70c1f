/** Compact perceptual colormap for heatmaps (dark blue to yellow). */

const STOPS: [number, number, number][] = [
  [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
];

export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(x));
  const f = x - i;
  const c = STOPS[i].map((a, k) => Math.round(a + f * (STOPS[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Quantized bucket index in 0..levels-1 (run-merging relies on this). */
export function quantize(t: number, levels = 64): number {
  return Math.min(levels - 1, Math.max(0, Math.floor(t * levels)));
}
