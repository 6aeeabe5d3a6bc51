import { describe, expect, it } from "vitest";

import { initialMapPose, sideBySideLayout, toggleStep, toggleView } from "../src/modes.js";
import { tiltAngleDeg, type Pose } from "../src/quat.js";

const eye: Pose = { position: [0.2, 1.6, 0.4], orientation: [0, 0, 0, 1] };

describe("toggle mode", () => {
  it("cycles choropleth -> prism -> barChart forward", () => {
    let st = { index: 0 };
    expect(toggleView(st)).toBe("choropleth");
    st = toggleStep(st, 1);
    expect(toggleView(st)).toBe("prism");
    st = toggleStep(st, 1);
    expect(toggleView(st)).toBe("barChart");
    st = toggleStep(st, 1);
    expect(toggleView(st)).toBe("choropleth");
  });

  it("cycles backward", () => {
    let st = { index: 0 };
    st = toggleStep(st, -1);
    expect(toggleView(st)).toBe("barChart");
    st = toggleStep(st, -1);
    expect(toggleView(st)).toBe("prism");
  });
});

describe("side-by-side layout", () => {
  const norm = (v: number[]) => Math.hypot(v[0], v[1], v[2]);
  const sub = (a: number[], b: number[]) => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];

  it("places all three views at 0.9 m", () => {
    const poses = sideBySideLayout(eye);
    for (const pose of Object.values(poses)) {
      expect(norm(sub(pose.position, eye.position))).toBeCloseTo(0.9, 12);
    }
  });

  it("tilts the prism to 75 degrees, outer views vertical", () => {
    const poses = sideBySideLayout(eye);
    expect(tiltAngleDeg(poses.prism)).toBeCloseTo(75, 9);
    expect(tiltAngleDeg(poses.choropleth)).toBeCloseTo(0, 9);
    expect(tiltAngleDeg(poses.barChart)).toBeCloseTo(0, 9);
  });

  it("spreads the outer views 80 degrees to each side (160 apart)", () => {
    const poses = sideBySideLayout(eye);
    const fwd = sub(poses.prism.position, eye.position);
    const angleTo = (v: number[]) =>
      (Math.acos((v[0] * fwd[0] + v[1] * fwd[1] + v[2] * fwd[2]) / (norm(v) * norm(fwd))) * 180) / Math.PI;
    const left = sub(poses.choropleth.position, eye.position);
    const right = sub(poses.barChart.position, eye.position);
    expect(angleTo(left)).toBeCloseTo(80, 6);
    expect(angleTo(right)).toBeCloseTo(80, 6);
    const spread =
      (Math.acos(
        (left[0] * right[0] + left[1] * right[1] + left[2] * right[2]) / (norm(left) * norm(right)),
      ) *
        180) /
      Math.PI;
    expect(spread).toBeCloseTo(160, 6);
  });
});

describe("initial pose", () => {
  it("0.6 m ahead, 0.1 m below, flat", () => {
    const pose = initialMapPose(eye);
    const offset = [
      pose.position[0] - eye.position[0],
      pose.position[1] - eye.position[1],
      pose.position[2] - eye.position[2],
    ];
    expect(offset[1]).toBeCloseTo(-0.1, 12);
    expect(Math.hypot(...offset)).toBeCloseTo(Math.sqrt(0.6 ** 2 + 0.1 ** 2), 12);
    expect(tiltAngleDeg(pose)).toBeCloseTo(0, 9);
  });
});
