/**
 * Typed fetch client for the levers HTTP API.
 *
 * Version conflicts and self-loop rejections surface as dedicated error
 * classes so UI state can react to them specifically.
 */

import type {
  AnalysisRequest,
  DynamicsRequest,
  DynamicsResponse,
  GraphDoc,
  JobStatusDoc,
  PerspectiveDiffDoc,
  PerspectiveDoc,
  ScenarioDiffDoc,
  StoredGraph,
  StoredGraphSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class VersionConflictError extends ApiError {
  constructor(readonly currentVersion: number, message: string) {
    super(409, "VERSION_CONFLICT", message);
    this.name = "VersionConflictError";
  }
}

export class SelfLoopsError extends ApiError {
  constructor(readonly ids: string[], message: string) {
    super(422, "SELF_LOOPS", message);
    this.name = "SelfLoopsError";
  }
}

interface ErrorBody {
  code?: string;
  message?: string;
  current?: number;
  ids?: string[];
}

/** The slice of the API a workshop session needs; stubbed in unit tests. */
export interface GraphServiceApi {
  createGraph(doc: GraphDoc): Promise<{ id: string; version: number }>;
  getGraph(id: string): Promise<StoredGraph>;
  putGraph(id: string, doc: GraphDoc, version: number): Promise<{ id: string; version: number }>;
  startAnalysis(id: string, body?: AnalysisRequest): Promise<{ job: string; status: string }>;
  getAnalysis(job: string): Promise<JobStatusDoc>;
}

export class LeversApi implements GraphServiceApi {
  constructor(
    readonly baseUrl: string,
    readonly token: string | null = null,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<T> {
    const allHeaders: Record<string, string> = { ...headers };
    if (body !== undefined) {
      allHeaders["Content-Type"] = "application/json";
    }
    if (this.token) {
      allHeaders["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: allHeaders,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const payload = (await response.json().catch(() => ({}))) as ErrorBody & T;
    if (!response.ok) {
      const message = payload.message ?? `${method} ${path} failed (${response.status})`;
      if (payload.code === "VERSION_CONFLICT") {
        throw new VersionConflictError(payload.current ?? 0, message);
      }
      if (payload.code === "SELF_LOOPS") {
        throw new SelfLoopsError(payload.ids ?? [], message);
      }
      throw new ApiError(response.status, payload.code ?? "ERROR", message);
    }
    return payload;
  }

  createGraph(doc: GraphDoc): Promise<{ id: string; version: number }> {
    return this.request("POST", "/graphs", doc);
  }

  listGraphs(): Promise<{ graphs: StoredGraphSummary[] }> {
    return this.request("GET", "/graphs");
  }

  getGraph(id: string): Promise<StoredGraph> {
    return this.request("GET", `/graphs/${id}`);
  }

  putGraph(id: string, doc: GraphDoc, version: number): Promise<{ id: string; version: number }> {
    return this.request("PUT", `/graphs/${id}`, doc, { "If-Match": String(version) });
  }

  deleteGraph(id: string): Promise<void> {
    return this.request("DELETE", `/graphs/${id}`);
  }

  startAnalysis(id: string, body: AnalysisRequest = {}): Promise<{ job: string; status: string }> {
    return this.request("POST", `/graphs/${id}/analyses`, body);
  }

  getAnalysis(job: string): Promise<JobStatusDoc> {
    return this.request("GET", `/analyses/${job}`);
  }

  cancelAnalysis(job: string): Promise<{ job: string; status: string }> {
    return this.request("DELETE", `/analyses/${job}`);
  }

  runDynamics(id: string, body: DynamicsRequest): Promise<DynamicsResponse> {
    return this.request("POST", `/graphs/${id}/dynamics`, body);
  }

  comparePerspectives(
    graph: string | GraphDoc,
    p1: string | PerspectiveDoc,
    p2: string | PerspectiveDoc,
  ): Promise<PerspectiveDiffDoc> {
    return this.request("POST", "/compare/perspectives", { graph, p1, p2 });
  }

  compareScenarios(analysisA: string, analysisB: string): Promise<ScenarioDiffDoc> {
    return this.request("POST", "/compare/scenarios", { analysisA, analysisB });
  }
}
