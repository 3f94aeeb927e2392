import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import type { TestProject } from "vitest/node";

const repoRoot = join(dirname(fileURLToPath(import.meta.url)), "..", "..");

let child: ChildProcess | null = null;
let stateDir: string | null = null;

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${url}/health`);
      if (resp.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service did not come up at ${url}: ${lastError}`);
}

export default async function setup(project: TestProject): Promise<() => void> {
  const port = 18000 + Math.floor(Math.random() * 20000);
  const url = `http://127.0.0.1:${port}`;
  stateDir = mkdtempSync(join(tmpdir(), "isf-e2e-"));
  child = spawn(
    "python3",
    [join(repoRoot, "scripts", "serve_demo.py"), "--port", String(port), "--state", stateDir],
    { cwd: repoRoot, stdio: "ignore" },
  );
  await waitForHealth(url, 30000);
  project.provide("serviceUrl", url);
  return () => {
    child?.kill();
    if (stateDir) rmSync(stateDir, { recursive: true, force: true });
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    serviceUrl: string;
  }
}
