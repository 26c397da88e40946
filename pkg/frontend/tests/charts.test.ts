import { describe, expect, it } from "vitest";

import { barChart, comparisonChart, lineChart } from "../src/charts.js";

function dataValues(svg: string): number[] {
  return [...svg.matchAll(/data-value="(\d+)"/g)].map((m) => Number(m[1]));
}

describe("barChart", () => {
  it("renders one bar per map entry", () => {
    const svg = barChart(
      [
        ["Management Science", 4],
        ["MIS Quarterly", 6],
      ],
      "Year distribution",
    );
    expect(dataValues(svg)).toEqual([4, 6]);
    expect((svg.match(/<rect/g) ?? []).length).toBe(2);
  });

  it("escapes labels", () => {
    const svg = barChart([['<img src=x onerror="pwn">', 1]], "t");
    expect(svg).not.toContain("<img");
    expect(svg).toContain("&lt;img");
  });

  it("renders the no-data placeholder for an empty map", () => {
    const html = barChart([], "Journal distribution");
    expect(html).toContain("no-data");
    expect(html).not.toContain("<svg");
  });
});

describe("lineChart", () => {
  it("renders one point per datum", () => {
    const rows: [string, number][] = [
      ["2025-06-01", 4],
      ["2025-06-02", 6],
      ["2025-06-03", 8],
    ];
    const svg = lineChart(rows, "Cumulative visits");
    expect((svg.match(/<circle/g) ?? []).length).toBe(3);
    expect(dataValues(svg)).toEqual([4, 6, 8]);
    expect(svg).toContain("polyline");
  });

  it("ten cumulative points draw a ten-point line", () => {
    const totals = [4, 6, 8, 11, 13, 16, 20, 23, 27, 31];
    const rows = totals.map((t, i): [string, number] => [`D-${9 - i}`, t]);
    const svg = lineChart(rows, "Cumulative visits");
    expect(dataValues(svg)).toEqual(totals);
  });

  it("empty series renders a placeholder", () => {
    expect(lineChart([], "Cumulative visits")).toContain("no-data");
  });
});

describe("comparisonChart", () => {
  it("renders two bars per year", () => {
    const svg = comparisonChart(
      [2022, 2023],
      { label: "ai", counts: [3, 5] },
      { label: "supply chain", counts: [2, 7] },
    );
    expect(dataValues(svg)).toEqual([3, 2, 5, 7]);
  });
});
