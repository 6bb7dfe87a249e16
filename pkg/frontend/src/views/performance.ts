// Personal performance screen: per-decade bars (guesses and images shown,
// left axis) with a correct-percentage line (right axis, 0-100). Decades
// with no guesses leave a gap in the line rather than dropping to zero.

import { ApiClient, DecadeRow, PerformanceReport } from "../api.js";
import { el, escapeHtml } from "../dom.js";
import { pctToNumber } from "../format.js";

const WIDTH = 640;
const HEIGHT = 280;
const MARGIN = { top: 16, right: 44, bottom: 28, left: 44 };

export class PerformanceView {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = `<p class="loading">Loading performance…</p>`;
    let report: PerformanceReport;
    try {
      report = await this.api.performance();
    } catch {
      this.root.innerHTML = `<p class="load-error">Could not load performance data.</p>`;
      return;
    }
    const anyPlays = report.decades.some((d) => d.total_images_shown > 0);
    if (!anyPlays) {
      this.root.innerHTML = `
        <p class="empty-state">No plays yet. Your per-decade results will appear here.</p>`;
      return;
    }
    this.root.innerHTML = `
      <div class="performance">
        <h2>Your performance by decade</h2>
        ${renderDecadeChart(report.decades)}
        <table class="decade-table">
          <thead><tr>
            <th>Decade</th><th>Guesses</th><th>Images shown</th><th>Correct %</th>
          </tr></thead>
          <tbody>
            ${report.decades
              .map(
                (d) => `
                  <tr>
                    <td>${escapeHtml(d.decade)}</td>
                    <td>${d.total_guesses}</td>
                    <td>${d.total_images_shown}</td>
                    <td class="pct">${d.correct_pct === null ? "–" : escapeHtml(d.correct_pct)}</td>
                  </tr>`,
              )
              .join("")}
          </tbody>
        </table>
        <p class="mode-summary">
          Guess the Year accuracy: <span class="acc-year">${fmtMode(report.modes.guess_year)}</span>
          · Timeline accuracy: <span class="acc-timeline">${fmtMode(report.modes.timeline)}</span>
        </p>
      </div>`;
  }
}

function fmtMode(pct: string | null): string {
  return pct === null ? "no plays" : `${escapeHtml(pct)}%`;
}

export function renderDecadeChart(decades: DecadeRow[]): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const maxCount = Math.max(1, ...decades.map((d) => Math.max(d.total_guesses, d.total_images_shown)));
  const slot = plotW / decades.length;
  const barW = slot * 0.28;

  const x = (i: number) => MARGIN.left + i * slot + slot / 2;
  const yCount = (v: number) => MARGIN.top + plotH * (1 - v / maxCount);
  const yPct = (v: number) => MARGIN.top + plotH * (1 - v / 100);

  const bars = decades
    .map((d, i) => {
      const guessesH = plotH - (yCount(d.total_guesses) - MARGIN.top);
      const shownH = plotH - (yCount(d.total_images_shown) - MARGIN.top);
      return `
        <rect class="bar-guesses" x="${x(i) - barW}" y="${yCount(d.total_guesses)}"
              width="${barW}" height="${guessesH}" />
        <rect class="bar-shown" x="${x(i)}" y="${yCount(d.total_images_shown)}"
              width="${barW}" height="${shownH}" />`;
    })
    .join("");

  // Null percentages split the line into separate segments: a gap, not zero.
  const segments: string[][] = [];
  let current: string[] = [];
  decades.forEach((d, i) => {
    const pct = pctToNumber(d.correct_pct);
    if (pct === null) {
      if (current.length) segments.push(current);
      current = [];
    } else {
      current.push(`${x(i)},${yPct(pct)}`);
    }
  });
  if (current.length) segments.push(current);
  const line = segments
    .filter((points) => points.length > 0)
    .map((points) =>
      points.length === 1
        ? `<circle class="pct-point" cx="${points[0].split(",")[0]}" cy="${points[0].split(",")[1]}" r="3" />`
        : `<polyline class="pct-line" fill="none" points="${points.join(" ")}" />`,
    )
    .join("");

  const labels = decades
    .map((d, i) => `<text class="x-label" x="${x(i)}" y="${HEIGHT - 8}" text-anchor="middle">${escapeHtml(d.decade)}</text>`)
    .join("");

  return `
    <svg class="decade-chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img"
         aria-label="per-decade guesses, images shown, and correct percentage">
      <text class="axis-label left" x="12" y="${MARGIN.top}" text-anchor="start">${maxCount}</text>
      <text class="axis-label right" x="${WIDTH - 12}" y="${MARGIN.top}" text-anchor="end">100%</text>
      ${bars}
      ${line}
      ${labels}
    </svg>`;
}
