/**
 * Wire types mirroring the levers service JSON schemas.
 */

export type ControllabilityLevel = "easy" | "medium" | "hard";
export type InfluenceSign = "positive" | "negative" | "neutral";
export type InfluenceStrength = "weak" | "medium" | "strong";

export interface FactorDoc {
  id: string;
  name: string;
  controllability: ControllabilityLevel;
}

export interface InfluenceDoc {
  source: string;
  target: string;
  sign: InfluenceSign;
  strength: InfluenceStrength;
}

export interface PerspectiveDoc {
  label: string;
  overrides: Record<string, ControllabilityLevel>;
}

export interface LayoutPoint {
  x: number;
  y: number;
}

export interface GraphDoc {
  schema_version: string;
  title: string;
  scenario: string;
  factors: FactorDoc[];
  influences: InfluenceDoc[];
  perspectives: PerspectiveDoc[];
  metadata: Record<string, unknown> & { layout?: Record<string, LayoutPoint> };
}

export interface StoredGraphSummary {
  id: string;
  version: number;
  title: string;
  scenario: string;
}

export interface StoredGraph extends StoredGraphSummary {
  created_at: string;
  updated_at: string;
  graph: GraphDoc;
}

export interface ConfigurationDoc {
  members: string[];
  score: number;
  warnings: string[];
}

export interface ClassificationDoc {
  always: string[];
  never: string[];
  sometimes: string[];
}

export interface ReportDoc {
  schema_version: string;
  graph: GraphDoc;
  m: number;
  D: number;
  classification: ClassificationDoc;
  configurations: ConfigurationDoc[];
  frequencies: Record<string, number>;
  truncated: boolean;
  truncated_reason: string | null;
  warnings: string[];
}

export type JobStatus = "queued" | "running" | "done" | "failed" | "cancelled";

export interface JobStatusDoc {
  job: string;
  graph: { id: string; version: number };
  status: JobStatus;
  progress: { candidates_tested: number };
  result: ReportDoc | null;
  error: string | null;
}

export interface AnalysisRequest {
  budget?: { max_configs?: number | null; max_millis?: number | null };
  perspective?: string | PerspectiveDoc;
}

export interface DynamicsRequest {
  mapping: "sigmoid" | "linear";
  lambda?: number;
  x0?: number | Record<string, number>;
  tol?: number;
  max_iter?: number;
}

export interface DynamicsResponse {
  converged: boolean;
  steps: number;
  factor_ids: string[];
  trajectory: number[][];
  fixed_point: Record<string, number> | null;
  ranking: string[];
}

export interface RankedEntryDoc {
  rank: number;
  score: number;
  members: string[];
}

export interface PerspectiveDiffDoc {
  disagreements: { factor: string; a: ControllabilityLevel; b: ControllabilityLevel }[];
  ranking_a: RankedEntryDoc[];
  ranking_b: RankedEntryDoc[];
  shared_best: boolean;
}

export interface ScenarioDiffDoc {
  a: { configurations: number; size: number };
  b: { configurations: number; size: number };
  only_a: string[];
  only_b: string[];
  shared: string[];
}
