/**
 * View models for the side-by-side comparison panes.
 */

import type { PerspectiveDiffDoc, RankedEntryDoc, ScenarioDiffDoc } from "./types.js";

export interface ComparisonColumn {
  heading: string;
  rows: { rank: number; score: number; members: string[] }[];
}

export interface PerspectiveComparison {
  highlight: Set<string>;
  columns: [ComparisonColumn, ComparisonColumn];
  sharedBest: boolean;
}

function column(heading: string, ranking: RankedEntryDoc[]): ComparisonColumn {
  return {
    heading,
    rows: ranking.map((entry) => ({
      rank: entry.rank,
      score: entry.score,
      members: entry.members,
    })),
  };
}

export function perspectiveComparison(
  diff: PerspectiveDiffDoc,
  headingA: string,
  headingB: string,
): PerspectiveComparison {
  return {
    highlight: new Set(diff.disagreements.map((d) => d.factor)),
    columns: [column(headingA, diff.ranking_a), column(headingB, diff.ranking_b)],
    sharedBest: diff.shared_best,
  };
}

export interface ScenarioComparison {
  summaryA: string;
  summaryB: string;
  onlyA: string[];
  onlyB: string[];
  shared: string[];
}

export function scenarioComparison(diff: ScenarioDiffDoc): ScenarioComparison {
  return {
    summaryA: `${diff.a.configurations} configurations of size ${diff.a.size}`,
    summaryB: `${diff.b.configurations} configurations of size ${diff.b.size}`,
    onlyA: diff.only_a,
    onlyB: diff.only_b,
    shared: diff.shared,
  };
}
