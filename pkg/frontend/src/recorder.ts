// 10 Hz trace recording. A driver (render loop or test harness) calls
// maybeSample() as often as it likes; samples are emitted on the nominal
// 0.1 s grid from the injected clock. Uploads retry and fall back to local
// persistence so a flaky server never loses a session.

import { poseFlat, type Pose } from "./quat.js";
import type { ViewClass } from "./types.js";
import type { SceneClient } from "./api.js";

export const SAMPLE_INTERVAL_S = 0.1;

export interface PoseSources {
  head: Pose; // camera pose stands in for the headset
  controller: Pose; // pointer-derived virtual controller
  map: Pose;
  view: ViewClass;
}

export class TraceRecorder {
  private lines: string[] = [];
  private t0: number | null = null;
  private nextSampleAt = 0;

  constructor(private now: () => number) {}

  get sampleCount(): number {
    return this.lines.length;
  }

  start(): void {
    this.lines = [];
    this.t0 = this.now();
    this.nextSampleAt = 0;
  }

  get recording(): boolean {
    return this.t0 !== null;
  }

  /** Record a sample if the nominal 0.1 s grid has been reached. */
  maybeSample(sources: PoseSources): boolean {
    if (this.t0 === null) return false;
    const elapsed = this.now() - this.t0;
    if (elapsed + 1e-9 < this.nextSampleAt) return false;
    const t = this.nextSampleAt;
    // keep the exact field order: t, head, ctrl, map, view
    this.lines.push(
      JSON.stringify({
        t,
        head: poseFlat(sources.head),
        ctrl: poseFlat(sources.controller),
        map: poseFlat(sources.map),
        view: sources.view,
      }),
    );
    this.nextSampleAt = Math.round((t + SAMPLE_INTERVAL_S) * 10) / 10;
    return true;
  }

  /** Elapsed session time in seconds (0 before start). */
  elapsed(): number {
    return this.t0 === null ? 0 : this.now() - this.t0;
  }

  stop(): string {
    this.t0 = null;
    return this.lines.join("\n") + "\n";
  }
}

export async function uploadWithRetry(
  client: SceneClient,
  kind: "traces" | "answers",
  name: string,
  body: string,
  persistLocal: (name: string, body: string) => void,
  attempts = 3,
): Promise<boolean> {
  for (let i = 0; i < attempts; i++) {
    try {
      await client.upload(kind, name, body);
      return true;
    } catch {
      // retry, then fall through to local persistence
    }
  }
  persistLocal(`${kind}-${name}`, body);
  return false;
}
