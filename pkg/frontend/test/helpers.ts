// Shared helpers for tests that drive the real engine CLI and server.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function cli(args: string[], timeoutMs = 120_000): { status: number; stdout: string; stderr: string } {
  const res = spawnSync("tiltmap", args, { encoding: "utf8", timeout: timeoutMs });
  if (res.error) throw res.error;
  return { status: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}

export function makeDemoWorkspace(dataset = "us", seed = 3): string {
  const dir = mkdtempSync(join(tmpdir(), "tiltmap-viewer-test-"));
  const res = cli(["demo", "--dataset", dataset, "--seed", String(seed), "--out", dir]);
  if (res.status !== 0) throw new Error(`demo failed: ${res.stderr}`);
  return dir;
}

export interface RunningServer {
  baseUrl: string;
  child: ChildProcess;
  stop: () => void;
}

export async function startServer(workspace: string): Promise<RunningServer> {
  const child = spawn("tiltmap", ["serve", "--config", join(workspace, "serve.json"), "--port", "0"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not start in time")), 30_000);
    let buffer = "";
    child.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const m = buffer.match(/serving on (http:\/\/127\.0\.0\.1:\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]);
      }
    });
    child.stderr!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}): ${buffer}`));
    });
  });
  return { baseUrl, child, stop: () => child.kill("SIGINT") };
}
