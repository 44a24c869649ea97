/**
 * Poll an analysis job until it reaches a terminal state.
 */

import type { GraphServiceApi } from "./api.js";
import type { JobStatusDoc } from "./types.js";

const TERMINAL: ReadonlySet<string> = new Set(["done", "failed", "cancelled"]);

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onProgress?: (candidatesTested: number) => void;
}

export async function pollAnalysis(
  api: Pick<GraphServiceApi, "getAnalysis">,
  jobId: string,
  options: PollOptions = {},
): Promise<JobStatusDoc> {
  const interval = options.intervalMs ?? 250;
  const deadline = Date.now() + (options.timeoutMs ?? 120_000);
  for (;;) {
    const status = await api.getAnalysis(jobId);
    if (options.onProgress) {
      options.onProgress(status.progress.candidates_tested);
    }
    if (TERMINAL.has(status.status)) {
      return status;
    }
    if (Date.now() > deadline) {
      throw new Error(`analysis ${jobId} still ${status.status} after timeout`);
    }
    await new Promise((resolve) => setTimeout(resolve, interval));
  }
}
