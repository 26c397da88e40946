// Dependency-free SVG charts. Every bar/point carries data-value so tests
// (and curious users) can read the plotted numbers straight out of the DOM.

export type LabeledCounts = [string, number][];

const WIDTH = 460;
const HEIGHT = 200;
const GUTTER = 120;

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function noData(label: string): string {
  return `<div class="no-data">No data for ${escapeXml(label)}</div>`;
}

/** Horizontal bar chart; one bar per entry, datum count equals input size. */
export function barChart(rows: LabeledCounts, title: string): string {
  if (rows.length === 0) return noData(title);
  const max = Math.max(...rows.map(([, n]) => n), 1);
  const barHeight = 18;
  const gap = 6;
  const height = rows.length * (barHeight + gap) + 28;
  const bars = rows
    .map(([label, count], i) => {
      const y = 24 + i * (barHeight + gap);
      const w = Math.max(2, Math.round(((WIDTH - GUTTER - 60) * count) / max));
      return (
        `<text x="${GUTTER - 6}" y="${y + 13}" text-anchor="end" class="bar-label">` +
        `${escapeXml(truncate(label, 18))}</text>` +
        `<rect class="bar" data-value="${count}" x="${GUTTER}" y="${y}"` +
        ` width="${w}" height="${barHeight}"></rect>` +
        `<text x="${GUTTER + w + 4}" y="${y + 13}" class="bar-count">${count}</text>`
      );
    })
    .join("");
  return (
    `<svg class="chart bar-chart" role="img" viewBox="0 0 ${WIDTH} ${height}"` +
    ` aria-label="${escapeXml(title)}">` +
    `<text x="0" y="14" class="chart-title">${escapeXml(title)}</text>${bars}</svg>`
  );
}

/** Line chart over (label, value) points; one circle per datum. */
export function lineChart(rows: LabeledCounts, title: string): string {
  if (rows.length === 0) return noData(title);
  const max = Math.max(...rows.map(([, n]) => n), 1);
  const innerW = WIDTH - 70;
  const innerH = HEIGHT - 60;
  const step = rows.length > 1 ? innerW / (rows.length - 1) : 0;
  const points = rows.map(([, value], i) => {
    const x = 40 + i * step;
    const y = 30 + innerH - (innerH * value) / max;
    return [x, y, value] as const;
  });
  const polyline = points.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
  const dots = points
    .map(
      ([x, y, value]) =>
        `<circle class="dot" data-value="${value}" cx="${x.toFixed(1)}"` +
        ` cy="${y.toFixed(1)}" r="3"></circle>`,
    )
    .join("");
  const firstLabel = rows[0]?.[0] ?? "";
  const lastLabel = rows[rows.length - 1]?.[0] ?? "";
  return (
    `<svg class="chart line-chart" role="img" viewBox="0 0 ${WIDTH} ${HEIGHT}"` +
    ` aria-label="${escapeXml(title)}">` +
    `<text x="0" y="14" class="chart-title">${escapeXml(title)}</text>` +
    `<polyline fill="none" class="line" points="${polyline}"></polyline>${dots}` +
    `<text x="40" y="${HEIGHT - 8}" class="axis-label">${escapeXml(firstLabel)}</text>` +
    `<text x="${WIDTH - 30}" y="${HEIGHT - 8}" text-anchor="end" class="axis-label">` +
    `${escapeXml(lastLabel)}</text></svg>`
  );
}

/** Grouped two-series bar chart for topic comparison. */
export function comparisonChart(
  years: number[],
  a: { label: string; counts: number[] },
  b: { label: string; counts: number[] },
): string {
  if (years.length === 0) return noData("comparison");
  const max = Math.max(...a.counts, ...b.counts, 1);
  const innerH = HEIGHT - 70;
  const group = (WIDTH - 80) / years.length;
  const barW = Math.min(22, group / 2 - 4);
  const bars = years
    .map((year, i) => {
      const x = 50 + i * group;
      const ha = (innerH * (a.counts[i] ?? 0)) / max;
      const hb = (innerH * (b.counts[i] ?? 0)) / max;
      return (
        `<rect class="bar series-a" data-value="${a.counts[i] ?? 0}" x="${x}"` +
        ` y="${30 + innerH - ha}" width="${barW}" height="${ha}"></rect>` +
        `<rect class="bar series-b" data-value="${b.counts[i] ?? 0}" x="${x + barW + 2}"` +
        ` y="${30 + innerH - hb}" width="${barW}" height="${hb}"></rect>` +
        `<text x="${x + barW}" y="${HEIGHT - 22}" text-anchor="middle" class="axis-label">${year}</text>`
      );
    })
    .join("");
  return (
    `<svg class="chart compare-chart" role="img" viewBox="0 0 ${WIDTH} ${HEIGHT}">` +
    `<text x="0" y="14" class="chart-title">${escapeXml(a.label)} vs ${escapeXml(b.label)}</text>` +
    `${bars}<text x="0" y="${HEIGHT - 8}" class="legend">` +
    `<tspan class="series-a">■</tspan> ${escapeXml(a.label)} ` +
    `<tspan class="series-b">■</tspan> ${escapeXml(b.label)}</text></svg>`
  );
}

function truncate(text: string, max: number): string {
  return text.length > max ? `${text.slice(0, max - 1)}…` : text;
}
