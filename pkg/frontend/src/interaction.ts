// Pointer-driven map manipulation. The pointer stands in for the 6-DOF
// controller: while the button is held the map is latched to a virtual
// controller pose derived from the pointer, exactly as in the engine's grab
// semantics; a plain vertical drag (or the UI slider) drives the tilt angle.

import { compose, inverse, IDENTITY, quatFromAxisAngle, type Pose } from "./quat.js";

export interface GrabState {
  held: boolean;
  controllerAtGrab: Pose;
  mapAtGrab: Pose;
}

export function grabStart(controller: Pose, mapPose: Pose): GrabState {
  return { held: true, controllerAtGrab: controller, mapAtGrab: mapPose };
}

export function grabUpdate(state: GrabState, controller: Pose): Pose {
  if (!state.held) throw new Error("NotHeld");
  return compose(compose(controller, inverse(state.controllerAtGrab)), state.mapAtGrab);
}

// Pointer movement -> virtual controller pose: horizontal drag orbits the
// map about the vertical axis, vertical drag pitches it about the view's
// horizontal axis (which is what changes the tilt angle).
export function controllerFromDrag(dxPx: number, dyPx: number, sensitivityDegPerPx = 0.25): Pose {
  const yaw: Pose = { position: [0, 0, 0], orientation: quatFromAxisAngle([0, 1, 0], -dxPx * sensitivityDegPerPx) };
  const pitch: Pose = { position: [0, 0, 0], orientation: quatFromAxisAngle([1, 0, 0], -dyPx * sensitivityDegPerPx) };
  return compose(yaw, pitch);
}

export class TiltController {
  /** Current tilt in [0, 90] degrees. */
  tiltDeg = 0;
  /** View azimuth over the map, degrees. */
  azimuthDeg = 0;

  constructor(
    /** Per-frame tilt change clamp, degrees; keeps scene-to-scene vertex
     * displacement under the engine's continuity bound. */
    public maxStepDeg = 1.5,
  ) {}

  /** Request a new tilt; returns the clamped value actually applied. */
  tiltTo(targetDeg: number): number {
    const clamped = Math.min(90, Math.max(0, targetDeg));
    const step = Math.min(this.maxStepDeg, Math.max(-this.maxStepDeg, clamped - this.tiltDeg));
    this.tiltDeg += step;
    return this.tiltDeg;
  }

  dragBy(dyPx: number, degPerPx = 0.25): number {
    return this.tiltTo(this.tiltDeg + dyPx * degPerPx);
  }

  orbitBy(dxPx: number, degPerPx = 0.25): number {
    this.azimuthDeg = (((this.azimuthDeg + dxPx * degPerPx) % 360) + 360) % 360;
    return this.azimuthDeg;
  }
}

export { IDENTITY };
