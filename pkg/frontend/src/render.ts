/**
 * Pure view-model helpers for the SVG canvas.
 *
 * Traffic-light outlines for controllability, green/red/grey strokes for
 * influence sign, thickness for strength; configuration members fill grey
 * and node radius grows linearly with configuration frequency share.
 */

import type {
  ControllabilityLevel,
  FactorDoc,
  InfluenceDoc,
  ReportDoc,
} from "./types.js";
import type { RankedTab } from "./scoring.js";

export const LEVEL_COLOURS: Record<ControllabilityLevel, string> = {
  easy: "#2e9e44",
  medium: "#e8882d",
  hard: "#d1342f",
};

export const SIGN_COLOURS = {
  positive: "#2e9e44",
  negative: "#d1342f",
  neutral: "#8a8a8a",
} as const;

export const STRENGTH_WIDTHS = { weak: 1.5, medium: 2.5, strong: 4 } as const;

const BASE_RADIUS = 18;
const RADIUS_SPREAD = 14;

export interface NodeStyle {
  outline: string;
  fill: string;
  radius: number;
}

export function frequencyShare(report: ReportDoc | null, factorId: string): number {
  if (!report || report.configurations.length === 0) {
    return 0;
  }
  return (report.frequencies[factorId] ?? 0) / report.configurations.length;
}

export function nodeStyle(
  factor: FactorDoc,
  report: ReportDoc | null = null,
  activeMembers: ReadonlySet<string> = new Set(),
  overrides: Record<string, ControllabilityLevel> = {},
): NodeStyle {
  const level = overrides[factor.id] ?? factor.controllability;
  return {
    outline: LEVEL_COLOURS[level],
    fill: activeMembers.has(factor.id) ? "#c9c9c9" : "#ffffff",
    radius: BASE_RADIUS + RADIUS_SPREAD * frequencyShare(report, factor.id),
  };
}

export interface EdgeStyle {
  stroke: string;
  width: number;
}

export function edgeStyle(influence: InfluenceDoc): EdgeStyle {
  return {
    stroke: SIGN_COLOURS[influence.sign],
    width: STRENGTH_WIDTHS[influence.strength],
  };
}

export interface TabViewModel {
  label: string;
  score: number;
  memberNames: string[];
  warnings: string[];
}

export function tabViewModels(tabs: RankedTab[]): TabViewModel[] {
  return tabs.map((tab) => ({
    label: `${tab.rank}`,
    score: tab.score,
    memberNames: tab.memberNames,
    warnings: [...tab.configuration.warnings].sort(),
  }));
}

export function truncationNotice(report: ReportDoc): string | null {
  if (!report.truncated) {
    return null;
  }
  const reason = report.truncated_reason ?? "budget exhausted";
  return `Enumeration incomplete (${reason}); showing the ${report.configurations.length} configurations found.`;
}
