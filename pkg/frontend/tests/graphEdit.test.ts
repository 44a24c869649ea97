import { describe, expect, it } from "vitest";

import {
  addFactor,
  deleteFactor,
  detectSelfLoops,
  emptyGraph,
  layoutOf,
  nextFactorId,
  removeInfluence,
  renameFactor,
  setControllability,
  setLayout,
  setPerspectiveOverride,
  upsertInfluence,
} from "../src/graphEdit.js";
import { starGraph } from "./fixtures.js";

describe("factor editing", () => {
  it("adds with a fresh id and never mutates the input", () => {
    const doc = emptyGraph();
    const id = nextFactorId(doc);
    const next = addFactor(doc, id, "Flood Risk", "hard");
    expect(doc.factors).toHaveLength(0);
    expect(next.factors).toEqual([
      { id: "f1", name: "Flood Risk", controllability: "hard" },
    ]);
    expect(() => addFactor(next, "f1", "again")).toThrow(/already exists/);
  });

  it("renames and recolours", () => {
    let doc = starGraph();
    doc = renameFactor(doc, "a", "Source");
    doc = setControllability(doc, "a", "hard");
    const factor = doc.factors.find((f) => f.id === "a")!;
    expect(factor.name).toBe("Source");
    expect(factor.controllability).toBe("hard");
  });

  it("delete cascades to influences, overrides, and layout", () => {
    let doc = starGraph();
    doc = setLayout(doc, "b", { x: 10, y: 20 });
    doc = deleteFactor(doc, "b");
    expect(doc.factors.map((f) => f.id)).toEqual(["a", "c"]);
    expect(doc.influences).toHaveLength(1);
    expect(doc.perspectives.find((p) => p.label === "pessimist")!.overrides).toEqual({});
    expect(layoutOf(doc, "b")).toBeNull();
  });
});

describe("influence editing", () => {
  it("draws a new influence once and restyles on repeat", () => {
    let doc = starGraph();
    doc = upsertInfluence(doc, "b", "c", "negative", "strong");
    expect(doc.influences).toHaveLength(3);
    doc = upsertInfluence(doc, "b", "c", "neutral", "weak");
    expect(doc.influences).toHaveLength(3);
    const edge = doc.influences.find((e) => e.source === "b" && e.target === "c")!;
    expect(edge.sign).toBe("neutral");
    expect(edge.strength).toBe("weak");
  });

  it("rejects unknown endpoints", () => {
    expect(() => upsertInfluence(starGraph(), "a", "zz")).toThrow(/unknown endpoint/);
  });

  it("removes an influence", () => {
    const doc = removeInfluence(starGraph(), "a", "b");
    expect(doc.influences).toHaveLength(1);
  });

  it("detects self-loops for the analysis guard", () => {
    const doc = upsertInfluence(starGraph(), "a", "a");
    expect(detectSelfLoops(doc)).toEqual(["a"]);
  });
});

describe("layout and perspectives", () => {
  it("stores rounded positions under metadata.layout", () => {
    const doc = setLayout(starGraph(), "a", { x: 101.7, y: 55.2 });
    expect(doc.metadata.layout).toEqual({ a: { x: 102, y: 55 } });
  });

  it("override editing creates and clears entries", () => {
    let doc = setPerspectiveOverride(starGraph(), "analyst", "a", "hard");
    expect(doc.perspectives.find((p) => p.label === "analyst")!.overrides).toEqual({
      a: "hard",
    });
    doc = setPerspectiveOverride(doc, "analyst", "a", null);
    expect(doc.perspectives.find((p) => p.label === "analyst")!.overrides).toEqual({});
  });
});
