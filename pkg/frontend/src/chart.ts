// SVG trend chart: one point per successful sample, line segments broken at
// error samples. Pure string/geometry functions, no DOM.

import type { SampleJson, TrendJson } from './api.js';

export interface ChartPoint {
  x: number;
  y: number;
  value: number;
}

const WIDTH = 560;
const HEIGHT = 180;
const PAD = 24;

/** Successful samples mapped into chart space, split into segments at errors. */
export function chartSegments(
  samples: SampleJson[],
  width = WIDTH,
  height = HEIGHT,
  pad = PAD,
): ChartPoint[][] {
  const ok = samples.filter((s) => s.value !== null);
  if (ok.length === 0) return [];
  const times = ok.map((s) => Date.parse(s.taken_at));
  const values = ok.map((s) => s.value as number);
  const tMin = Math.min(...times);
  const tMax = Math.max(...times);
  const vMin = Math.min(...values);
  const vMax = Math.max(...values);

  const x = (t: number) => (tMax === tMin ? width / 2 : pad + ((t - tMin) / (tMax - tMin)) * (width - 2 * pad));
  const y = (v: number) =>
    vMax === vMin ? height / 2 : height - pad - ((v - vMin) / (vMax - vMin)) * (height - 2 * pad);

  const segments: ChartPoint[][] = [];
  let current: ChartPoint[] = [];
  for (const sample of samples) {
    if (sample.value === null) {
      if (current.length > 0) segments.push(current);
      current = [];
      continue;
    }
    current.push({ x: x(Date.parse(sample.taken_at)), y: y(sample.value), value: sample.value });
  }
  if (current.length > 0) segments.push(current);
  return segments;
}

export function pointCount(segments: ChartPoint[][]): number {
  return segments.reduce((n, segment) => n + segment.length, 0);
}

export const ARROWS: Record<string, string> = { up: '↑', down: '↓', flat: '→' };

export function trendBadge(trend: TrendJson | undefined): string {
  if (!trend || trend.delta === null || trend.direction === null) return 'no data yet';
  const sign = trend.delta > 0 ? '+' : '';
  return `Δ${sign}${trend.delta} ${ARROWS[trend.direction]}`;
}

/** Render the SVG markup for a series; empty-state text when nothing succeeded. */
export function renderTrendSvg(samples: SampleJson[], trend: TrendJson | undefined): string {
  const segments = chartSegments(samples);
  if (segments.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="trend-chart">` +
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" class="empty">no samples yet</text></svg>`;
  }
  const parts: string[] = [];
  for (const segment of segments) {
    if (segment.length > 1) {
      const coords = segment.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(' ');
      parts.push(`<polyline points="${coords}" fill="none" class="trend-line"/>`);
    }
    for (const point of segment) {
      parts.push(
        `<circle cx="${point.x.toFixed(1)}" cy="${point.y.toFixed(1)}" r="3.5" class="trend-dot">` +
          `<title>${point.value}</title></circle>`,
      );
    }
  }
  const badge = `<text x="${WIDTH - PAD}" y="${PAD}" text-anchor="end" class="badge">${trendBadge(trend)}</text>`;
  return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="trend-chart">${parts.join('')}${badge}</svg>`;
}
