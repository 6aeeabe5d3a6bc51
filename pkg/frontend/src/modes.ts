// View-mode state: the morphing tilt map, discrete toggling and the
// egocentric side-by-side arrangement.

import {
  add,
  cross,
  quatFromAxisAngle,
  quatMul,
  quatNormalize,
  quatRotate,
  scale,
  type Pose,
  type Quat,
  type Vec3,
} from "./quat.js";

export type ModeKind = "tiltMap" | "toggle" | "sideBySide";

export const TOGGLE_VIEWS = ["choropleth", "prism", "barChart"] as const;

export interface ToggleState {
  index: number;
}

export function toggleStep(state: ToggleState, direction: 1 | -1): ToggleState {
  return { index: (state.index + direction + 3) % 3 };
}

export function toggleView(state: ToggleState): (typeof TOGGLE_VIEWS)[number] {
  return TOGGLE_VIEWS[state.index % 3];
}

const UP: Vec3 = [0, 1, 0];

function horizontalForward(eye: Pose): Vec3 {
  const f = quatRotate(eye.orientation, [0, 0, -1]);
  const h: Vec3 = [f[0], 0, f[2]];
  const n = Math.hypot(h[0], h[2]);
  if (n < 1e-9) throw new Error("eye looks straight up/down");
  return [h[0] / n, 0, h[2] / n];
}

function quatFromBasis(x: Vec3, y: Vec3, z: Vec3): Quat {
  const m = [x, y, z]; // columns
  const t = m[0][0] + m[1][1] + m[2][2];
  let qx: number, qy: number, qz: number, qw: number;
  if (t > 0) {
    const s = Math.sqrt(t + 1) * 2;
    qw = s / 4;
    qx = (m[1][2] - m[2][1]) / s;
    qy = (m[2][0] - m[0][2]) / s;
    qz = (m[0][1] - m[1][0]) / s;
  } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const s = Math.sqrt(1 + m[0][0] - m[1][1] - m[2][2]) * 2;
    qw = (m[1][2] - m[2][1]) / s;
    qx = s / 4;
    qy = (m[1][0] + m[0][1]) / s;
    qz = (m[2][0] + m[0][2]) / s;
  } else if (m[1][1] > m[2][2]) {
    const s = Math.sqrt(1 + m[1][1] - m[0][0] - m[2][2]) * 2;
    qw = (m[2][0] - m[0][2]) / s;
    qx = (m[1][0] + m[0][1]) / s;
    qy = s / 4;
    qz = (m[2][1] + m[1][2]) / s;
  } else {
    const s = Math.sqrt(1 + m[2][2] - m[0][0] - m[1][1]) * 2;
    qw = (m[0][1] - m[1][0]) / s;
    qx = (m[2][0] + m[0][2]) / s;
    qy = (m[2][1] + m[1][2]) / s;
    qz = s / 4;
  }
  return quatNormalize([qx, qy, qz, qw]);
}

function facingPose(position: Vec3, towardEye: Vec3, tiltDeg: number): Pose {
  const t = (tiltDeg * Math.PI) / 180;
  const normal = add(scale(towardEye, Math.cos(t)), scale(UP, Math.sin(t)));
  const fwd = scale(towardEye, -1);
  const rightRaw = cross(fwd, UP);
  const rn = Math.hypot(...rightRaw);
  const right: Vec3 = [rightRaw[0] / rn, rightRaw[1] / rn, rightRaw[2] / rn];
  const yAxis = cross(normal, right);
  return { position, orientation: quatFromBasis(right, yAxis, normal) };
}

/** Initial pose for tiltMap/toggle: 0.6 m ahead, 0.1 m below eye, flat map. */
export function initialMapPose(eye: Pose): Pose {
  const fwd = horizontalForward(eye);
  const position = add(add(eye.position, scale(fwd, 0.6)), scale(UP, -0.1));
  return facingPose(position, scale(fwd, -1), 0);
}

/** Side-by-side layout: three views at 0.9 m; prism dead ahead tilted 75
 * degrees, choropleth 80 degrees anticlockwise, bar chart 80 clockwise,
 * both vertical. */
export function sideBySideLayout(eye: Pose): Record<"choropleth" | "prism" | "barChart", Pose> {
  const fwd = horizontalForward(eye);
  const ccw = quatFromAxisAngle(UP, 80);
  const cw = quatFromAxisAngle(UP, -80);
  const dirs: Record<string, Vec3> = {
    choropleth: quatRotate(ccw, fwd),
    prism: fwd,
    barChart: quatRotate(cw, fwd),
  };
  const tilts: Record<string, number> = { choropleth: 0, prism: 75, barChart: 0 };
  const out = {} as Record<"choropleth" | "prism" | "barChart", Pose>;
  for (const name of ["choropleth", "prism", "barChart"] as const) {
    const d = dirs[name];
    out[name] = facingPose(add(eye.position, scale(d, 0.9)), scale(d, -1), tilts[name]);
  }
  return out;
}

// quatMul is re-exported for the renderer's billboard math.
export { quatMul };
