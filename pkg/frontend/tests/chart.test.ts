import { describe, expect, it } from 'vitest';

import type { SampleJson } from '../src/api.js';
import { chartSegments, pointCount, renderTrendSvg, trendBadge } from '../src/chart.js';

function ok(at: string, value: number): SampleJson {
  return { item_id: 1, taken_at: at, value, error: null };
}

function failed(at: string): SampleJson {
  return { item_id: 1, taken_at: at, value: null, error: 'boom' };
}

describe('chart geometry', () => {
  it('one point per successful sample', () => {
    const segments = chartSegments([
      ok('2019-01-12T00:00:00Z', 3),
      ok('2019-01-13T00:00:00Z', 4),
      ok('2019-01-14T00:00:00Z', 5),
    ]);
    expect(pointCount(segments)).toBe(3);
    expect(segments.length).toBe(1);
  });

  it('breaks the line at error samples', () => {
    const segments = chartSegments([
      ok('2019-01-12T00:00:00Z', 3),
      failed('2019-01-13T00:00:00Z'),
      ok('2019-01-14T00:00:00Z', 5),
      ok('2019-01-15T00:00:00Z', 6),
    ]);
    expect(segments.length).toBe(2);
    expect(pointCount(segments)).toBe(3);
  });

  it('returns nothing for error-only series', () => {
    expect(chartSegments([failed('2019-01-12T00:00:00Z')])).toEqual([]);
  });

  it('centers a constant series vertically', () => {
    const [segment] = chartSegments([ok('2019-01-12T00:00:00Z', 7), ok('2019-01-13T00:00:00Z', 7)], 560, 180);
    expect(segment.every((p) => p.y === 90)).toBe(true);
  });

  it('x positions grow with time', () => {
    const [segment] = chartSegments([
      ok('2019-01-12T00:00:00Z', 1),
      ok('2019-01-13T00:00:00Z', 2),
      ok('2019-01-20T00:00:00Z', 3),
    ]);
    expect(segment[0].x).toBeLessThan(segment[1].x);
    expect(segment[1].x).toBeLessThan(segment[2].x);
  });
});

describe('rendering', () => {
  it('empty series renders the placeholder', () => {
    expect(renderTrendSvg([], undefined)).toContain('no samples yet');
  });

  it('dots carry their value as a tooltip', () => {
    const svg = renderTrendSvg([ok('2019-01-12T00:00:00Z', 3), ok('2019-01-14T00:00:00Z', 5)], undefined);
    expect(svg).toContain('<title>3</title>');
    expect(svg).toContain('<title>5</title>');
  });

  it('badge mirrors the API trend verbatim', () => {
    expect(
      trendBadge({ item_id: 1, baseline: null, latest: null, delta: 2, direction: 'up', sample_count: 3 }),
    ).toBe('Δ+2 ↑');
    expect(
      trendBadge({ item_id: 1, baseline: null, latest: null, delta: -1, direction: 'down', sample_count: 2 }),
    ).toBe('Δ-1 ↓');
    expect(trendBadge(undefined)).toBe('no data yet');
  });
});
