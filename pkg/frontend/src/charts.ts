// Pure geometry for the trajectory chart and density views: everything DOM
// renders is computed here so tests can pin the mapping down without a
// browser.

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: number[], pad = 0.05): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === Infinity) return { min: 0, max: 1 };
  if (min === max) {
    const bump = Math.abs(min) || 1;
    return { min: min - 0.5 * bump, max: max + 0.5 * bump };
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export interface Scale {
  (value: number): number;
  invert(px: number): number;
}

/** Linear scale; flip=true maps min to the high pixel (SVG y axis). */
export function linearScale(domain: Extent, rangePx: number, flip = false): Scale {
  const span = domain.max - domain.min || 1;
  const scale = ((value: number) => {
    const t = (value - domain.min) / span;
    return (flip ? 1 - t : t) * rangePx;
  }) as Scale;
  scale.invert = (px: number) => {
    const t = px / rangePx;
    return domain.min + (flip ? 1 - t : t) * span;
  };
  return scale;
}

/** SVG polyline points attribute for one series. */
export function polylinePoints(
  xs: number[],
  ys: number[],
  xScale: Scale,
  yScale: Scale,
): string {
  const parts: string[] = [];
  const n = Math.min(xs.length, ys.length);
  for (let i = 0; i < n; i++) {
    if (!Number.isFinite(ys[i])) continue;
    parts.push(`${xScale(xs[i]).toFixed(2)},${yScale(ys[i]).toFixed(2)}`);
  }
  return parts.join(" ");
}

/** Thin long series so the SVG stays light; keeps first and last points. */
export function decimate<T>(values: T[], maxPoints: number): T[] {
  if (values.length <= maxPoints) return values;
  const stride = Math.ceil(values.length / maxPoints);
  const out: T[] = [];
  for (let i = 0; i < values.length; i += stride) out.push(values[i]);
  if (out[out.length - 1] !== values[values.length - 1]) out.push(values[values.length - 1]);
  return out;
}

export function axisTicks(domain: Extent, count = 5): number[] {
  const span = domain.max - domain.min;
  if (!(span > 0)) return [domain.min];
  const step = span / (count - 1);
  const ticks: number[] = [];
  for (let i = 0; i < count; i++) ticks.push(domain.min + i * step);
  return ticks;
}

// The figure convention everywhere: truth in blue, filter estimate in red.
export const TRUTH_COLOR = "#1f77b4";
export const ESTIMATE_COLOR = "#d62728";
