/**
 * Pure editing operations over graph documents.
 *
 * Every operation returns a new document; the canvas model never mutates
 * in place, which keeps undo and dirty-tracking trivial. Layout positions
 * live under metadata.layout so the server stays layout-agnostic.
 */

import type {
  ControllabilityLevel,
  GraphDoc,
  InfluenceSign,
  InfluenceStrength,
  LayoutPoint,
} from "./types.js";

export function emptyGraph(title = "Untitled map"): GraphDoc {
  return {
    schema_version: "1",
    title,
    scenario: "",
    factors: [],
    influences: [],
    perspectives: [],
    metadata: {},
  };
}

function clone(doc: GraphDoc): GraphDoc {
  return JSON.parse(JSON.stringify(doc)) as GraphDoc;
}

export function nextFactorId(doc: GraphDoc): string {
  let i = doc.factors.length + 1;
  const taken = new Set(doc.factors.map((f) => f.id));
  while (taken.has(`f${i}`)) {
    i += 1;
  }
  return `f${i}`;
}

export function addFactor(
  doc: GraphDoc,
  id: string,
  name: string,
  controllability: ControllabilityLevel = "medium",
): GraphDoc {
  if (doc.factors.some((f) => f.id === id)) {
    throw new Error(`factor ${id} already exists`);
  }
  const next = clone(doc);
  next.factors.push({ id, name, controllability });
  return next;
}

export function renameFactor(doc: GraphDoc, id: string, name: string): GraphDoc {
  const next = clone(doc);
  const factor = next.factors.find((f) => f.id === id);
  if (!factor) {
    throw new Error(`no factor ${id}`);
  }
  factor.name = name;
  return next;
}

export function setControllability(
  doc: GraphDoc,
  id: string,
  level: ControllabilityLevel,
): GraphDoc {
  const next = clone(doc);
  const factor = next.factors.find((f) => f.id === id);
  if (!factor) {
    throw new Error(`no factor ${id}`);
  }
  factor.controllability = level;
  return next;
}

export function deleteFactor(doc: GraphDoc, id: string): GraphDoc {
  const next = clone(doc);
  next.factors = next.factors.filter((f) => f.id !== id);
  next.influences = next.influences.filter(
    (e) => e.source !== id && e.target !== id,
  );
  for (const perspective of next.perspectives) {
    delete perspective.overrides[id];
  }
  if (next.metadata.layout) {
    delete next.metadata.layout[id];
  }
  return next;
}

/** Draws or restyles the influence source -> target (one per pair). */
export function upsertInfluence(
  doc: GraphDoc,
  source: string,
  target: string,
  sign: InfluenceSign = "positive",
  strength: InfluenceStrength = "medium",
): GraphDoc {
  const ids = new Set(doc.factors.map((f) => f.id));
  if (!ids.has(source) || !ids.has(target)) {
    throw new Error(`unknown endpoint ${source} -> ${target}`);
  }
  const next = clone(doc);
  const existing = next.influences.find(
    (e) => e.source === source && e.target === target,
  );
  if (existing) {
    existing.sign = sign;
    existing.strength = strength;
  } else {
    next.influences.push({ source, target, sign, strength });
  }
  return next;
}

export function removeInfluence(doc: GraphDoc, source: string, target: string): GraphDoc {
  const next = clone(doc);
  next.influences = next.influences.filter(
    (e) => !(e.source === source && e.target === target),
  );
  return next;
}

export function setPerspectiveOverride(
  doc: GraphDoc,
  label: string,
  factorId: string,
  level: ControllabilityLevel | null,
): GraphDoc {
  const next = clone(doc);
  let perspective = next.perspectives.find((p) => p.label === label);
  if (!perspective) {
    perspective = { label, overrides: {} };
    next.perspectives.push(perspective);
    next.perspectives.sort((a, b) => (a.label < b.label ? -1 : 1));
  }
  if (level === null) {
    delete perspective.overrides[factorId];
  } else {
    perspective.overrides[factorId] = level;
  }
  return next;
}

export function setLayout(doc: GraphDoc, id: string, point: LayoutPoint): GraphDoc {
  const next = clone(doc);
  const layout = { ...(next.metadata.layout ?? {}) };
  layout[id] = { x: Math.round(point.x), y: Math.round(point.y) };
  next.metadata = { ...next.metadata, layout };
  return next;
}

export function layoutOf(doc: GraphDoc, id: string): LayoutPoint | null {
  return doc.metadata.layout?.[id] ?? null;
}

export function detectSelfLoops(doc: GraphDoc): string[] {
  return [...new Set(doc.influences.filter((e) => e.source === e.target).map((e) => e.source))].sort();
}
