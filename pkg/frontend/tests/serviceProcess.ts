/**
 * Spawns a real levers service (the Python backend) for integration tests.
 * Requires the `levers-serve` console script on PATH (pip install -e ..).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface RunningService {
  baseUrl: string;
  stop: () => void;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export async function startService(): Promise<RunningService> {
  const port = 8400 + Math.floor(Math.random() * 500);
  const dataDir = mkdtempSync(join(tmpdir(), "levers-ui-test-"));
  const child: ChildProcess = spawn("levers-serve", {
    env: {
      ...process.env,
      LEVERS_DATA_DIR: dataDir,
      LEVERS_PORT: String(port),
      LEVERS_MAX_JOBS: "2",
    },
    stdio: "ignore",
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  for (let attempt = 0; attempt < 150; attempt++) {
    if (child.exitCode !== null) {
      break;
    }
    try {
      const response = await fetch(`${baseUrl}/graphs`);
      if (response.ok) {
        return { baseUrl, stop: () => child.kill() };
      }
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  child.kill();
  throw new Error("levers-serve did not become ready; is the package installed?");
}
