/**
 * End-to-end checks against a real running service:
 * tab building, client/server score parity, local re-ranking, and the
 * optimistic-concurrency conflict flow.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { LeversApi } from "../src/api.js";
import { pollAnalysis } from "../src/poll.js";
import { effectiveLabels, scoreConfiguration } from "../src/scoring.js";
import { WorkshopSession } from "../src/state.js";
import type { ControllabilityLevel } from "../src/types.js";
import { starGraph } from "./fixtures.js";
import { startService, type RunningService } from "./serviceProcess.js";

let service: RunningService;
let api: LeversApi;

beforeAll(async () => {
  service = await startService();
  api = new LeversApi(service.baseUrl);
});

afterAll(() => {
  service?.stop();
});

// deterministic PRNG so failures reproduce
function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

describe("star fixture end to end", () => {
  it("loads, analyzes, and shows two configuration tabs", async () => {
    const session = new WorkshopSession(api);
    await session.create(starGraph());
    expect(await session.analyze()).toBe(true);
    expect(session.tabs).toHaveLength(2);
    expect(session.tabs.map((t) => t.configuration.members)).toEqual([
      ["a", "b"],
      ["a", "c"],
    ]);
    expect(session.report!.classification.always).toEqual(["a"]);
  });

  it("client scores equal server scores for 20 random labelings", async () => {
    const created = await api.createGraph(starGraph());
    const random = lcg(20260810);
    const levels: ControllabilityLevel[] = ["easy", "medium", "hard"];
    for (let trial = 0; trial < 20; trial++) {
      const overrides: Record<string, ControllabilityLevel> = {};
      for (const id of ["a", "b", "c"]) {
        overrides[id] = levels[Math.floor(random() * 3)];
      }
      const started = await api.startAnalysis(created.id, {
        perspective: { label: `trial ${trial}`, overrides },
      });
      const finished = await pollAnalysis(api, started.job, { intervalMs: 25 });
      expect(finished.status).toBe("done");
      const report = finished.result!;
      const labels = effectiveLabels(report.graph, overrides);
      for (const configuration of report.configurations) {
        expect(scoreConfiguration(configuration.members, labels)).toBe(
          configuration.score,
        );
      }
    }
  });

  it("perspective flip reorders tabs without a new analysis job", async () => {
    const session = new WorkshopSession(api);
    await session.create(starGraph());
    await session.analyze();
    const jobBefore = session.lastJob;
    expect(session.tabs[0].configuration.members).toEqual(["a", "b"]);

    session.setPerspective({ b: "hard", c: "easy" });

    expect(session.tabs[0].configuration.members).toEqual(["a", "c"]);
    expect(session.jobsStarted).toBe(1);
    expect(session.lastJob).toBe(jobBefore);
    // the job on the server is untouched and still reports the same result
    const status = await api.getAnalysis(jobBefore!);
    expect(status.status).toBe("done");
  });

  it("a stale-version edit raises the conflict dialog state", async () => {
    const session = new WorkshopSession(api);
    const graphId = await session.create(starGraph());

    // a second editor saves first
    const other = new WorkshopSession(api);
    await other.open(graphId);
    other.edit((doc) => ({ ...doc, title: "edited elsewhere" }));
    expect(await other.save()).toBe(true);

    session.edit((doc) => ({ ...doc, title: "my stale edit" }));
    expect(await session.save()).toBe(false);
    expect(session.conflict).not.toBeNull();
    expect(session.conflict!.currentVersion).toBe(2);

    await session.reloadFromServer();
    expect(session.conflict).toBeNull();
    expect(session.doc!.title).toBe("edited elsewhere");
    expect(await session.save()).toBe(true);
  });
});
