// Scenefile -> GPU buffer layout. Pure packing: positions and indices are
// copied verbatim (map-local x/y in the ground plane, +z up converted to
// the renderer's +y up by axis swizzle only), never recomputed.

import type { SceneArea, SceneFile } from "./types.js";

export interface AreaBuffers {
  id: string;
  /** Float32 xyz triples in renderer coordinates (y up). */
  positions: Float32Array;
  indices: Uint32Array;
  color: [number, number, number];
  border: boolean;
  /** Outline segments: consecutive index pairs into positions. */
  outline: Uint32Array;
}

/** Map-local (x, y, z=normal) -> renderer (x, z=up? no: y up): (x, h, -y).
 * A pure swizzle; the geometry itself is untouched. */
export function toRendererCoords(positions: number[]): Float32Array {
  const out = new Float32Array(positions.length);
  for (let i = 0; i < positions.length; i += 3) {
    out[i] = positions[i];
    out[i + 1] = positions[i + 2];
    out[i + 2] = -positions[i + 1];
  }
  return out;
}

export function areaBuffers(area: SceneArea): AreaBuffers {
  const positions = toRendererCoords(area.positions);
  const indices = new Uint32Array(area.indices);
  const n = area.positions.length / 3;
  const half = n / 2; // bottom ring(s) then top ring(s)
  const outline: number[] = [];
  // top-ring outline: adjacent top vertices whose bottom twins are wall
  // neighbors; the wall triangles pair (i, j, j+half), recover ring edges
  for (let t = 0; t < indices.length; t += 3) {
    const [a, b, c] = [indices[t], indices[t + 1], indices[t + 2]];
    if (a < half && b < half && c === b + half) {
      outline.push(a + half, b + half);
    }
  }
  return {
    id: area.id,
    positions,
    indices,
    color: area.color,
    border: area.border,
    outline: new Uint32Array(outline),
  };
}

export function sceneBuffers(scene: SceneFile): AreaBuffers[] {
  return scene.areas.map(areaBuffers);
}

/** Max prism height in the scene, used to toggle the shadow pass. */
export function maxHeight(scene: SceneFile): number {
  let h = 0;
  for (const area of scene.areas) {
    for (let i = 2; i < area.positions.length; i += 3) {
      if (area.positions[i] > h) h = area.positions[i];
    }
  }
  return h;
}
