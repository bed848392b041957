import { describe, expect, it } from "vitest";

import { ConfusionDto, CurvePoint, IrrReportDto } from "../src/api.js";
import {
  EMPTY_PLACEHOLDER,
  heatmapModel,
  renderConfusion,
  renderCrowdCurve,
  renderHeatmap,
} from "../src/dashboard.js";

const IRR: IrrReportDto = {
  methods: ["expert1", "expert2", "crowd"],
  experts: ["expert1", "expert2"],
  rho: [
    { a: "expert1", b: "expert2", rho: 0.84, n: 296 },
    { a: "crowd", b: "expert1", rho: 0.88, n: 296 },
    { a: "crowd", b: "expert2", rho: 0.86, n: 290 },
  ],
  min_p: [{ expert: "expert1", method: "crowd", p: 0.08 }],
};

describe("irr heatmap", () => {
  it("builds a symmetric matrix with unit diagonal", () => {
    const model = heatmapModel(IRR);
    expect(model.rho[0][0]).toBe(1);
    expect(model.rho[0][1]).toBe(0.84);
    expect(model.rho[1][0]).toBe(0.84);
    expect(model.rho[2][0]).toBe(0.88);
    expect(model.rho[0][2]).toBe(0.88);
  });

  it("renders every method and every correlation", () => {
    const html = renderHeatmap(heatmapModel(IRR));
    for (const m of IRR.methods) expect(html).toContain(m);
    expect(html).toContain("0.84");
    expect(html).toContain("0.88");
  });

  it("self-comparison renders a pure diagonal", () => {
    const html = renderHeatmap(heatmapModel({
      methods: ["crowd"], experts: [], rho: [], min_p: [],
    }));
    expect(html).toContain("1.00");
  });
});

const CONFUSION: ConfusionDto = {
  a: "expert1",
  b: "crowd",
  labels: ["NA", "I", "II", "III", "IV", "V", "VI"],
  counts: [
    [2, 0, 0, 0, 0, 0, 0],
    [0, 3, 1, 0, 0, 0, 0],
    [0, 1, 8, 2, 0, 0, 0],
    [0, 0, 1, 6, 1, 0, 0],
    [0, 0, 0, 1, 5, 1, 0],
    [0, 0, 0, 0, 1, 4, 1],
    [0, 0, 0, 0, 0, 1, 3],
  ],
  column_percent: Array.from({ length: 7 }, () => Array(7).fill(10)),
  row_percent: Array.from({ length: 7 }, () => Array(7).fill(10)),
  total: 42,
  exact_match_rate: 0.738,
};

describe("confusion matrix", () => {
  it("renders a 7x7 with counts and percentages", () => {
    const html = renderConfusion(CONFUSION);
    const cells = html.match(/<td/g) ?? [];
    expect(cells).toHaveLength(49);
    expect(html).toContain("<b>8</b>");
    expect(html).toContain("n=42");
    expect(html).toContain("73.8%");
  });

  it("renders the NA row and column distinctly from I..VI", () => {
    const html = renderConfusion(CONFUSION);
    expect(html.match(/class="na-label"/g)).toHaveLength(2);   // row + column head
    expect(html.match(/class="fst-label"/g)).toHaveLength(12); // 6 rows + 6 columns
  });

  it("shows the placeholder on empty data", () => {
    expect(renderConfusion({ ...CONFUSION, total: 0 })).toBe(EMPTY_PLACEHOLDER);
  });
});

const POINTS: CurvePoint[] = [3, 6, 12, 24, 48, 96].map((size, i) => ({
  sample_size: size,
  mean_rho: 0.74 + i * 0.028,
  sd_rho: 0.026 - i * 0.004,
  ci_low: 0.74 + i * 0.028 - 0.05,
  ci_high: 0.74 + i * 0.028 + 0.05,
}));

describe("crowd curve", () => {
  it("plots six points with a CI band", () => {
    const svg = renderCrowdCurve(POINTS);
    expect(svg.match(/<circle/g)).toHaveLength(6);
    expect(svg).toContain("ci-band");
    expect(svg).toContain("mean-line");
    for (const size of [3, 6, 12, 24, 48, 96]) {
      expect(svg).toContain(`>${size}</text>`);
    }
  });

  it("shows the placeholder with no points", () => {
    expect(renderCrowdCurve([])).toBe(EMPTY_PLACEHOLDER);
  });
});
