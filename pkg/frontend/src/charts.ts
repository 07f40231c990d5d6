/** Dependency-free SVG charts. Null samples render as gaps, never as 0. */

export interface SeriesPoint {
  x: number;
  y: number | null;
}

/** Build the `points` attribute runs for a polyline chart with gaps. */
export function polylineRuns(
  points: SeriesPoint[],
  width: number,
  height: number,
  maxX: number,
  maxY: number,
): string[] {
  if (maxX <= 0 || maxY <= 0) {
    return [];
  }
  const runs: string[] = [];
  let current: string[] = [];
  for (const point of points) {
    if (point.y === null) {
      if (current.length > 0) {
        runs.push(current.join(" "));
        current = [];
      }
      continue;
    }
    const px = (point.x / maxX) * width;
    const py = height - (point.y / maxY) * height;
    current.push(`${round2(px)},${round2(py)}`);
  }
  if (current.length > 0) {
    runs.push(current.join(" "));
  }
  return runs;
}

export function seriesMax(points: SeriesPoint[]): number {
  let max = 0;
  for (const point of points) {
    if (point.y !== null && point.y > max) {
      max = point.y;
    }
  }
  return max;
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

export function lineChartSvg(
  title: string,
  points: SeriesPoint[],
  maxX: number,
  width = 220,
  height = 60,
): string {
  const maxY = Math.max(seriesMax(points), 1);
  const runs = polylineRuns(points, width, height, Math.max(maxX, 1), maxY);
  const polylines = runs
    .map(
      (run) =>
        `<polyline fill="none" stroke="currentColor" stroke-width="1.5" points="${run}"/>`,
    )
    .join("");
  return (
    `<figure class="chart"><figcaption>${escapeHtml(title)}</figcaption>` +
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
    `role="img" aria-label="${escapeHtml(title)}">${polylines}</svg></figure>`
  );
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
