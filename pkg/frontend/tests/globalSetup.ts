/** Spawn the scheduling service for the integration tests.
 *
 * Skipped when GAPSCHED_URL points at an already-running instance.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import { BASE_URL, SERVE_PORT } from "./config.js";

const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));

async function waitForHealth(url: string, attempts = 100): Promise<void> {
  for (let i = 0; i < attempts; i += 1) {
    try {
      const resp = await fetch(`${url}/healthz`);
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`service at ${url} never became healthy`);
}

export default async function setup(): Promise<() => Promise<void>> {
  if (process.env.GAPSCHED_URL) {
    await waitForHealth(process.env.GAPSCHED_URL);
    return async () => {};
  }
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "gapsched", "serve", "--port", String(SERVE_PORT)],
    { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const failed = new Promise<never>((_, reject) => {
    child.on("exit", (code) =>
      reject(new Error(`service exited early (${code}): ${stderr}`)),
    );
  });
  await Promise.race([waitForHealth(BASE_URL), failed]);
  return async () => {
    child.removeAllListeners("exit");
    child.kill("SIGTERM");
    await new Promise((resolve) => child.on("exit", resolve));
  };
}
