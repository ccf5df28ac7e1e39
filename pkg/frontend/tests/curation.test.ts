import { describe, expect, it } from "vitest";

import { BadReport, parseCurationReport } from "../src/curation.js";

// Mirrors the JSON the dataset pipeline writes to curation_report.json.
function reportFixture(): Record<string, unknown> {
  const demo = (id: string, top: number, wrist: number) => ({
    id,
    score_top: top,
    score_wrist: wrist,
    outlier_score: (top + wrist) / 2,
    label_top: 0,
    label_wrist: 0,
  });
  return {
    demos: [
      demo("ep0000", 0.1, 0.3),
      demo("ep0001", 0.9, 0.7),
      demo("ep0002", 0.2, 0.2),
      demo("ep0003", 0.5, 0.5),
    ],
    ranking: ["ep0001", "ep0003", "ep0000", "ep0002"],
    percentiles: {
      p50: ["ep0002", "ep0000"],
      p70: ["ep0002", "ep0000", "ep0003"],
      p90: ["ep0002", "ep0000", "ep0003", "ep0001"],
    },
  };
}

describe("parseCurationReport", () => {
  it("orders demos by the published ranking, worst first", () => {
    const view = parseCurationReport(reportFixture());
    expect(view.demos.map((d) => d.id)).toEqual(["ep0001", "ep0003", "ep0000", "ep0002"]);
    expect(view.demos[0].outlierScore).toBeCloseTo(0.8, 12);
    expect(view.demos[0].scoreTop).toBe(0.9);
    expect(view.demos[0].scoreWrist).toBe(0.7);
    expect(view.demos[0].labelTop).toBe(0);
  });

  it("exposes percentile retention per demo", () => {
    const view = parseCurationReport(reportFixture());
    const byId = new Map(view.demos.map((d) => [d.id, d]));
    expect(byId.get("ep0002")?.retainedAt).toEqual([50, 70, 90]);
    expect(byId.get("ep0003")?.retainedAt).toEqual([70, 90]);
    expect(byId.get("ep0001")?.retainedAt).toEqual([90]);
    expect(view.percentiles.get(70)).toEqual(["ep0002", "ep0000", "ep0003"]);
  });

  it("parses percentile keys of the form p<number>", () => {
    const view = parseCurationReport(reportFixture());
    expect([...view.percentiles.keys()].sort((a, b) => a - b)).toEqual([50, 70, 90]);
  });

  const bad: Array<[string, (r: Record<string, unknown>) => unknown]> = [
    ["a non-object payload", () => "nope"],
    ["missing demos", (r) => ({ ...r, demos: undefined })],
    ["missing ranking", (r) => ({ ...r, ranking: undefined })],
    ["missing percentiles", (r) => ({ ...r, percentiles: undefined })],
    ["a ranking that is not a permutation", (r) => ({ ...r, ranking: ["ep0000"] })],
    ["a ranking with unknown ids", (r) => ({
      ...r,
      ranking: ["ep0001", "ep0003", "ep0000", "ep9999"],
    })],
    ["a demo without an id", (r) => ({
      ...r,
      demos: [...(r["demos"] as unknown[]), { score_top: 1 }],
    })],
    ["a demo with a non-numeric score", (r) => {
      const demos = (r["demos"] as Array<Record<string, unknown>>).map((d) => ({ ...d }));
      demos[1]["score_wrist"] = "high";
      return { ...r, demos };
    }],
    ["a malformed percentile key", (r) => ({
      ...r,
      percentiles: { "top-half": ["ep0000"] },
    })],
  ];

  it.each(bad)("rejects %s", (_label, mutate) => {
    expect(() => parseCurationReport(mutate(reportFixture()))).toThrow(BadReport);
  });
});
