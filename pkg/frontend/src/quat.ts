// Minimal pose algebra for interaction (grab latch, trace samples).
// Quaternions are [x, y, z, w]; world up is +y; the camera looks along -z.

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

export interface Pose {
  position: Vec3;
  orientation: Quat;
}

export const IDENTITY: Pose = { position: [0, 0, 0], orientation: [0, 0, 0, 1] };

export function quatMul(a: Quat, b: Quat): Quat {
  const [x1, y1, z1, w1] = a;
  const [x2, y2, z2, w2] = b;
  return [
    w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
    w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
    w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
  ];
}

export function quatConj(q: Quat): Quat {
  return [-q[0], -q[1], -q[2], q[3]];
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

export function quatRotate(q: Quat, v: Vec3): Vec3 {
  const qv: Vec3 = [q[0], q[1], q[2]];
  const w = q[3];
  const t = scale(cross(qv, v), 2);
  return add(v, add(scale(t, w), cross(qv, t)));
}

export function quatFromAxisAngle(axis: Vec3, angleDeg: number): Quat {
  const n = Math.hypot(...axis);
  const half = (angleDeg * Math.PI) / 360;
  const s = Math.sin(half) / n;
  return [axis[0] * s, axis[1] * s, axis[2] * s, Math.cos(half)];
}

export function compose(a: Pose, b: Pose): Pose {
  // a applied after b: x -> a(b(x))
  return {
    position: add(a.position, quatRotate(a.orientation, b.position)),
    orientation: quatNormalize(quatMul(a.orientation, b.orientation)),
  };
}

export function inverse(a: Pose): Pose {
  const qi = quatConj(a.orientation);
  return { position: scale(quatRotate(qi, a.position), -1), orientation: qi };
}

export function tiltAngleDeg(mapPose: Pose): number {
  const normal = quatRotate(mapPose.orientation, [0, 0, 1]);
  const s = Math.min(1, Math.abs(normal[1]));
  return (Math.asin(s) * 180) / Math.PI;
}

export function poseFlat(p: Pose): number[] {
  return [...p.position, ...p.orientation];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(a: Vec3, k: number): Vec3 {
  return [a[0] * k, a[1] * k, a[2] * k];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}
