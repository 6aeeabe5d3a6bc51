// Wire formats shared with the engine server. The viewer consumes these
// verbatim; all geometry numbers originate in the core scene function.

export interface SceneArea {
  id: string;
  positions: number[]; // flat x,y,z triples, map-local units, +z = map normal
  indices: number[]; // flat triangle index triples
  color: [number, number, number];
  border: boolean;
}

export interface SceneAxis {
  side: "left" | "right" | "top" | "bottom";
  pose: number; // degrees: 0 in-plane, 90 perpendicular
  ticks: number[];
  labels: number[];
  line: [number[], number[]];
  opacity: number;
}

export interface SceneLabel {
  text: string;
  anchor: number[];
}

export interface SceneFile {
  phase: string; // a..g
  tiltDeg: number;
  azimuthDeg: number;
  areas: SceneArea[];
  axes: SceneAxis[];
  labels: SceneLabel[];
}

export interface Manifest {
  files: Record<string, string>;
  layers: string[];
  defaultLayer: string;
  schedule: number[];
  style: string;
  scene: string;
}

export interface TaskRec {
  kind: "areaComparison" | "region";
  targets: string[];
  answer: number;
  answerRange: [number, number];
  layerfile: string;
  seed: number | null;
  distanceDeg?: number;
  distanceClass?: string;
  cv?: number;
}

export type ViewClass = "choropleth" | "prism" | "barChart" | "transitionCP" | "transitionPB";

// Phase letter -> view class recorded in traces (mirrors the engine's map).
export const VIEW_CLASS_OF_PHASE: Record<string, ViewClass> = {
  a: "choropleth",
  b: "transitionCP",
  c: "prism",
  d: "transitionPB",
  e: "transitionPB",
  f: "transitionPB",
  g: "barChart",
};

export interface AnswerRec {
  task: number;
  answer: number;
  tStart: number;
  tEnd: number;
}
