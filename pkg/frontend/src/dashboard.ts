/** Analyst dashboard: correlation heatmap, 7x7 confusion matrix with
 * counts and column percentages, and the crowd-size curve with its CI
 * band. Renderers are pure string builders so they are testable without
 * a browser; main.ts injects the strings into the page. */

import { ConfusionDto, CurvePoint, IrrReportDto } from "./api.js";

export const EMPTY_PLACEHOLDER =
  `<div class="placeholder">No data yet. Ingest a dataset and collect annotations.</div>`;

// -- IRR heatmap -------------------------------------------------------------

export interface HeatmapModel {
  methods: string[];
  rho: (number | null)[][];   // null on the diagonal's missing pairs
}

export function heatmapModel(report: IrrReportDto): HeatmapModel {
  const index = new Map(report.methods.map((m, i) => [m, i]));
  const n = report.methods.length;
  const rho: (number | null)[][] = Array.from({ length: n },
    (_, i) => Array.from({ length: n }, (_, j) => (i === j ? 1.0 : null)));
  for (const entry of report.rho) {
    const i = index.get(entry.a);
    const j = index.get(entry.b);
    if (i === undefined || j === undefined) continue;
    rho[i][j] = entry.rho;
    rho[j][i] = entry.rho;
  }
  return { methods: report.methods, rho };
}

function heatColor(value: number): string {
  // 0 -> light, 1 -> saturated blue; linear ramp is enough for rho in [0,1]
  const t = Math.max(0, Math.min(1, value));
  const light = 95 - Math.round(t * 55);
  return `hsl(215, 65%, ${light}%)`;
}

export function renderHeatmap(model: HeatmapModel): string {
  if (model.methods.length === 0) return EMPTY_PLACEHOLDER;
  const head = model.methods.map((m) => `<th>${escapeHtml(m)}</th>`).join("");
  const rows = model.methods.map((rowName, i) => {
    const cells = model.rho[i].map((value) => {
      if (value === null) return `<td class="missing">–</td>`;
      return `<td style="background:${heatColor(value)}">${value.toFixed(2)}</td>`;
    }).join("");
    return `<tr><th>${escapeHtml(rowName)}</th>${cells}</tr>`;
  }).join("");
  return `<table class="heatmap"><thead><tr><th></th>${head}</tr></thead>`
    + `<tbody>${rows}</tbody></table>`;
}

// -- Confusion matrix ----------------------------------------------------------

export function renderConfusion(dto: ConfusionDto): string {
  if (dto.total === 0) return EMPTY_PLACEHOLDER;
  const klass = (label: string) => (label === "NA" ? "na-label" : "fst-label");
  const head = dto.labels
    .map((l) => `<th class="${klass(l)}">${escapeHtml(l)}</th>`).join("");
  const rows = dto.labels.map((rowLabel, i) => {
    const cells = dto.labels.map((_, j) => {
      const count = dto.counts[i][j];
      const pct = dto.column_percent[i][j];
      const shade = Math.min(85, Math.round(pct * 0.85));
      return `<td style="background:hsl(0, 0%, ${100 - shade}%)">`
        + `<b>${count}</b><br><small>${pct.toFixed(0)}%</small></td>`;
    }).join("");
    return `<tr><th class="${klass(rowLabel)}">${escapeHtml(rowLabel)}</th>${cells}</tr>`;
  }).join("");
  return `<table class="confusion" aria-label="confusion ${escapeHtml(dto.a)} vs ${escapeHtml(dto.b)}">`
    + `<caption>${escapeHtml(dto.a)} (rows) vs ${escapeHtml(dto.b)} (columns), `
    + `n=${dto.total}, exact ${(100 * dto.exact_match_rate).toFixed(1)}%; cell % of column</caption>`
    + `<thead><tr><th></th>${head}</tr></thead><tbody>${rows}</tbody></table>`;
}

// -- Crowd-size curve ----------------------------------------------------------

export function renderCrowdCurve(points: CurvePoint[], width = 560, height = 260): string {
  if (points.length === 0) return EMPTY_PLACEHOLDER;
  const pad = 42;
  const xs = points.map((p) => Math.log2(p.sample_size));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yValues = points.flatMap((p) => [p.ci_low, p.ci_high, p.mean_rho]);
  const yMin = Math.min(...yValues, 0.0);
  const yMax = Math.max(...yValues, 1.0);
  const sx = (x: number) =>
    pad + ((x - xMin) / Math.max(xMax - xMin, 1e-9)) * (width - 2 * pad);
  const sy = (y: number) =>
    height - pad - ((y - yMin) / Math.max(yMax - yMin, 1e-9)) * (height - 2 * pad);

  const band = points.map((p, i) => `${i ? "L" : "M"}${sx(xs[i])},${sy(p.ci_high)}`).join(" ")
    + " " + [...points].reverse()
      .map((p, i) => `L${sx(xs[points.length - 1 - i])},${sy(p.ci_low)}`).join(" ")
    + " Z";
  const line = points.map((p, i) => `${i ? "L" : "M"}${sx(xs[i])},${sy(p.mean_rho)}`).join(" ");
  const dots = points.map((p, i) =>
    `<circle cx="${sx(xs[i])}" cy="${sy(p.mean_rho)}" r="3" class="dot"/>`).join("");
  const ticks = points.map((p, i) =>
    `<text x="${sx(xs[i])}" y="${height - pad + 16}" text-anchor="middle" class="tick">`
    + `${p.sample_size}</text>`).join("");
  const yTicks = [0, 0.25, 0.5, 0.75, 1].map((v) =>
    `<text x="${pad - 6}" y="${sy(v) + 4}" text-anchor="end" class="tick">${v}</text>`).join("");
  return `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="crowd size curve">`
    + `<path d="${band}" class="ci-band" fill="#bbb" opacity="0.45"/>`
    + `<path d="${line}" class="mean-line" fill="none" stroke="#1f6fb5" stroke-width="2"/>`
    + dots + ticks + yTicks
    + `<text x="${width / 2}" y="${height - 6}" text-anchor="middle" class="axis">annotations per image</text>`
    + `</svg>`;
}

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) =>
    ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;" }[c] as string));
}
