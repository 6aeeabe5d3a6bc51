// Server client. Scenes are kept with their raw response text: rendering
// consumes the parsed numbers untouched, and golden tests compare the raw
// bytes against the engine's own scene exports.

import type { Manifest, SceneFile, TaskRec } from "./types.js";

export interface FetchedScene {
  raw: string;
  scene: SceneFile;
}

export class SceneClient {
  private cache = new Map<string, FetchedScene>();

  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  async manifest(): Promise<Manifest> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/manifest`);
    if (!resp.ok) throw new Error(`manifest: HTTP ${resp.status}`);
    return (await resp.json()) as Manifest;
  }

  sceneUrl(tilt: number, azimuth: number, layer: string, style = "tiltMap"): string {
    const q = new URLSearchParams({
      tilt: String(tilt),
      azimuth: String(azimuth),
      layer,
      style,
    });
    return `${this.baseUrl}/api/scene?${q}`;
  }

  async scene(tilt: number, azimuth: number, layer: string, style = "tiltMap"): Promise<FetchedScene> {
    const url = this.sceneUrl(tilt, azimuth, layer, style);
    const hit = this.cache.get(url);
    if (hit) return hit;
    const resp = await this.fetchImpl(url);
    if (!resp.ok) throw new Error(`scene: HTTP ${resp.status}`);
    const raw = await resp.text();
    const fetched: FetchedScene = { raw, scene: JSON.parse(raw) as SceneFile };
    if (this.cache.size > 256) this.cache.clear();
    this.cache.set(url, fetched);
    return fetched;
  }

  async tasks(path: string): Promise<TaskRec[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new Error(`tasks: HTTP ${resp.status}`);
    return (await resp.json()) as TaskRec[];
  }

  async upload(kind: "traces" | "answers", name: string, body: string): Promise<void> {
    const resp = await this.fetchImpl(`${this.baseUrl}/${kind}/${name}`, {
      method: "PUT",
      body,
      headers: { "Content-Type": "application/octet-stream" },
    });
    if (resp.status !== 201) throw new Error(`upload ${kind}/${name}: HTTP ${resp.status}`);
  }
}
