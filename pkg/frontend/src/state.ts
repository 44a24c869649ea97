/**
 * Workshop session state.
 *
 * One session edits one stored graph with optimistic concurrency: every
 * save PUTs with If-Match and a stale version flips `conflict` instead of
 * silently overwriting. Analysis results are immutable snapshots; a
 * perspective switch re-ranks the existing report locally and never
 * triggers a new job.
 */

import { SelfLoopsError, VersionConflictError, type GraphServiceApi } from "./api.js";
import { pollAnalysis } from "./poll.js";
import { rankConfigurations, type RankedTab } from "./scoring.js";
import type {
  AnalysisRequest,
  ControllabilityLevel,
  GraphDoc,
  ReportDoc,
} from "./types.js";

export interface ConflictState {
  currentVersion: number;
  message: string;
}

export type SessionListener = () => void;

export class WorkshopSession {
  graphId: string | null = null;
  version = 0;
  doc: GraphDoc | null = null;
  dirty = false;
  conflict: ConflictState | null = null;
  selfLoopGuard: string[] | null = null;
  report: ReportDoc | null = null;
  tabs: RankedTab[] = [];
  activeTab = 0;
  overrides: Record<string, ControllabilityLevel> = {};
  jobsStarted = 0;
  lastJob: string | null = null;
  lastError: string | null = null;

  private listeners: SessionListener[] = [];

  constructor(private readonly api: GraphServiceApi) {}

  subscribe(listener: SessionListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  async open(graphId: string): Promise<void> {
    const stored = await this.api.getGraph(graphId);
    this.graphId = stored.id;
    this.version = stored.version;
    this.doc = stored.graph;
    this.dirty = false;
    this.conflict = null;
    this.report = null;
    this.tabs = [];
    this.notify();
  }

  async create(doc: GraphDoc): Promise<string> {
    const created = await this.api.createGraph(doc);
    this.graphId = created.id;
    this.version = created.version;
    this.doc = doc;
    this.dirty = false;
    this.conflict = null;
    this.notify();
    return created.id;
  }

  /** Apply a pure document transform locally and mark the session dirty. */
  edit(transform: (doc: GraphDoc) => GraphDoc): void {
    if (!this.doc) {
      throw new Error("no graph loaded");
    }
    this.doc = transform(this.doc);
    this.dirty = true;
    this.notify();
  }

  /**
   * PUT the working copy with the known version. A stale version sets the
   * conflict state (for the dialog) and leaves the local copy untouched.
   */
  async save(): Promise<boolean> {
    if (!this.doc || !this.graphId) {
      throw new Error("no graph loaded");
    }
    try {
      const updated = await this.api.putGraph(this.graphId, this.doc, this.version);
      this.version = updated.version;
      this.dirty = false;
      this.conflict = null;
      this.notify();
      return true;
    } catch (error) {
      if (error instanceof VersionConflictError) {
        this.conflict = {
          currentVersion: error.currentVersion,
          message:
            "This map changed on the server since you loaded it. " +
            "Reload to pick up the latest version; your unsaved edits stay on screen until then.",
        };
        this.notify();
        return false;
      }
      throw error;
    }
  }

  /** Discard local edits and reload the server copy (conflict resolution). */
  async reloadFromServer(): Promise<void> {
    if (!this.graphId) {
      throw new Error("no graph loaded");
    }
    await this.open(this.graphId);
  }

  /**
   * Save if needed, then run an analysis job and build the ranked tabs.
   * Self-loop rejections populate the guard with the offending factors.
   */
  async analyze(options: AnalysisRequest = {}, pollIntervalMs = 150): Promise<boolean> {
    if (!this.graphId) {
      throw new Error("no graph loaded");
    }
    if (this.dirty && !(await this.save())) {
      return false;
    }
    this.selfLoopGuard = null;
    this.lastError = null;
    let job: string;
    try {
      const started = await this.api.startAnalysis(this.graphId, options);
      job = started.job;
    } catch (error) {
      if (error instanceof SelfLoopsError) {
        this.selfLoopGuard = error.ids;
        this.notify();
        return false;
      }
      throw error;
    }
    this.jobsStarted += 1;
    this.lastJob = job;
    this.notify();
    const finished = await pollAnalysis(this.api, job, { intervalMs: pollIntervalMs });
    if (finished.status !== "done" || !finished.result) {
      this.lastError = finished.error ?? `analysis ${finished.status}`;
      this.notify();
      return false;
    }
    this.applyReport(finished.result);
    return true;
  }

  /** Install an immutable analysis snapshot and rank it. */
  applyReport(report: ReportDoc): void {
    this.report = report;
    this.tabs = rankConfigurations(report, this.overrides);
    this.activeTab = 0;
    this.notify();
  }

  /**
   * Re-rank the current report under different controllability labels.
   * Purely local: configuration structure is label-invariant, so no new
   * analysis job is needed or started.
   */
  setPerspective(overrides: Record<string, ControllabilityLevel>): void {
    this.overrides = { ...overrides };
    if (this.report) {
      this.tabs = rankConfigurations(this.report, this.overrides);
      this.activeTab = 0;
    }
    this.notify();
  }

  usePerspectiveLabel(label: string | null): void {
    if (!label) {
      this.setPerspective({});
      return;
    }
    const perspective = this.doc?.perspectives.find((p) => p.label === label);
    this.setPerspective(perspective?.overrides ?? {});
  }

  selectTab(index: number): void {
    if (index >= 0 && index < this.tabs.length) {
      this.activeTab = index;
      this.notify();
    }
  }

  activeMembers(): ReadonlySet<string> {
    const tab = this.tabs[this.activeTab];
    return new Set(tab ? tab.configuration.members : []);
  }
}
