/**
 * Client-side ease-of-control scoring.
 *
 * Deliberately duplicates the server's formula (sum of easy=1 / medium=2 /
 * hard=3 over members, ascending, ties broken by sorted member names) so a
 * perspective change re-ranks instantly without refetching: configuration
 * structure is label-invariant, only scores move.
 */

import type {
  ConfigurationDoc,
  ControllabilityLevel,
  GraphDoc,
  ReportDoc,
} from "./types.js";

export const SCALE: Record<ControllabilityLevel, number> = {
  easy: 1,
  medium: 2,
  hard: 3,
};

export function effectiveLabels(
  graph: GraphDoc,
  overrides: Record<string, ControllabilityLevel> = {},
): Record<string, ControllabilityLevel> {
  const labels: Record<string, ControllabilityLevel> = {};
  for (const factor of graph.factors) {
    labels[factor.id] = factor.controllability;
  }
  for (const [id, level] of Object.entries(overrides)) {
    if (id in labels) {
      labels[id] = level;
    }
  }
  return labels;
}

export function scoreConfiguration(
  members: readonly string[],
  labels: Record<string, ControllabilityLevel>,
): number {
  let total = 0;
  for (const id of members) {
    total += SCALE[labels[id] ?? "medium"];
  }
  return total;
}

export interface RankedTab {
  rank: number;
  score: number;
  configuration: ConfigurationDoc;
  memberNames: string[];
}

function compareNameLists(a: string[], b: string[]): number {
  const n = Math.min(a.length, b.length);
  for (let i = 0; i < n; i++) {
    if (a[i] !== b[i]) {
      return a[i] < b[i] ? -1 : 1;
    }
  }
  return a.length - b.length;
}

export function rankConfigurations(
  report: ReportDoc,
  overrides: Record<string, ControllabilityLevel> = {},
): RankedTab[] {
  const labels = effectiveLabels(report.graph, overrides);
  const names: Record<string, string> = {};
  for (const factor of report.graph.factors) {
    names[factor.id] = factor.name;
  }
  const scored = report.configurations.map((configuration) => ({
    configuration,
    score: scoreConfiguration(configuration.members, labels),
    memberNames: configuration.members.map((id) => names[id] ?? id).sort(),
  }));
  scored.sort(
    (a, b) => a.score - b.score || compareNameLists(a.memberNames, b.memberNames),
  );
  return scored.map((entry, index) => ({ rank: index + 1, ...entry }));
}
