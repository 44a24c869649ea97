import type { GraphDoc, ReportDoc } from "../src/types.js";

/** The bundled one-source-two-sinks example graph, as served. */
export function starGraph(): GraphDoc {
  return {
    schema_version: "1",
    title: "One source, two sinks",
    scenario: "unit",
    factors: [
      { id: "a", name: "A", controllability: "easy" },
      { id: "b", name: "B", controllability: "medium" },
      { id: "c", name: "C", controllability: "hard" },
    ],
    influences: [
      { source: "a", target: "b", sign: "positive", strength: "medium" },
      { source: "a", target: "c", sign: "positive", strength: "medium" },
    ],
    perspectives: [
      { label: "optimist", overrides: { c: "easy" } },
      { label: "pessimist", overrides: { b: "hard" } },
    ],
    metadata: {},
  };
}

/** Analysis of the star graph, scored under its own labels. */
export function starReport(): ReportDoc {
  return {
    schema_version: "1",
    graph: starGraph(),
    m: 1,
    D: 2,
    classification: { always: ["a"], never: [], sometimes: ["b", "c"] },
    configurations: [
      { members: ["a", "b"], score: 3.0, warnings: [] },
      { members: ["a", "c"], score: 4.0, warnings: [] },
    ],
    frequencies: { a: 2, b: 1, c: 1 },
    truncated: false,
    truncated_reason: null,
    warnings: [],
  };
}
