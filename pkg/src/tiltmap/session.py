"""Interaction state machines and trace analytics.

World coordinates are meters with +y up.  Poses are a position plus a unit
quaternion (x, y, z, w); the map quad lives in its local x/y plane with +z
as its normal, and the camera convention looks along local -z.  Traces are
10 Hz samples of head, controller and map poses plus the view class shown;
analytics reproduce the movement classification (strictly more than 1 cm or
5 degrees between samples), the tilt-angle histogram and per-view timing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLog, NotHeld, OutOfRange
from .morph import VIEW_CLASS_OF_PHASE
from .taskgen import TaskSpec, abs_diff

UP = np.array([0.0, 1.0, 0.0])
SAMPLE_DT = 0.1
TRANSLATION_THRESHOLD_M = 0.01
ROTATION_THRESHOLD_DEG = 5.0

VIEW_CLASSES = ("choropleth", "prism", "barChart", "transitionCP", "transitionPB")
TOGGLE_VIEWS = ("choropleth", "prism", "barChart")


# ---------------------------------------------------------------------------
# quaternions (x, y, z, w)


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def quat_mul(q1, q2) -> np.ndarray:
    x1, y1, z1, w1 = q1
    x2, y2, z2, w2 = q2
    return np.array(
        [
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        ]
    )


def quat_conj(q) -> np.ndarray:
    x, y, z, w = q
    return np.array([-x, -y, -z, w])


def quat_rotate(q, v) -> np.ndarray:
    qv = np.asarray(q[:3], dtype=float)
    w = float(q[3])
    t = 2.0 * np.cross(qv, np.asarray(v, dtype=float))
    return np.asarray(v, dtype=float) + w * t + np.cross(qv, t)


def quat_from_axis_angle(axis, angle_deg: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = math.radians(angle_deg) / 2.0
    return np.array([*(axis * math.sin(half)), math.cos(half)])


def quat_from_basis(x_axis, y_axis, z_axis) -> np.ndarray:
    """Quaternion whose rotation sends local x/y/z to the given world axes."""
    m = np.column_stack([x_axis, y_axis, z_axis])
    t = np.trace(m)
    if t > 0:
        s = math.sqrt(t + 1.0) * 2.0
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    return quat_normalize([x, y, z, w])


def quat_angle_deg(q1, q2) -> float:
    """Rotation magnitude between two orientations."""
    dot = abs(float(np.dot(q1, q2)))
    return math.degrees(2.0 * math.acos(min(1.0, dot)))


# ---------------------------------------------------------------------------
# poses


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]  # unit quaternion, xyzw

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.orientation))
        if abs(norm - 1.0) > 1e-6:
            raise OutOfRange(f"quaternion norm {norm} is not 1 within 1e-6")

    @classmethod
    def identity(cls) -> "Pose":
        return cls((0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0))

    @classmethod
    def make(cls, position, orientation) -> "Pose":
        q = quat_normalize(orientation)
        return cls(tuple(float(v) for v in position), tuple(float(v) for v in q))

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.position)

    @property
    def q(self) -> np.ndarray:
        return np.asarray(self.orientation)

    def compose(self, other: "Pose") -> "Pose":
        """self applied after other: x -> self(other(x))."""
        return Pose.make(self.p + quat_rotate(self.q, other.p), quat_mul(self.q, other.q))

    def inverse(self) -> "Pose":
        qi = quat_conj(self.q)
        return Pose.make(-quat_rotate(qi, self.p), qi)

    def transform_point(self, v) -> np.ndarray:
        return self.p + quat_rotate(self.q, v)

    def flat(self) -> list[float]:
        return [*self.position, *self.orientation]

    @classmethod
    def from_flat(cls, values) -> "Pose":
        if len(values) != 7:
            raise OutOfRange("pose record must have 7 floats")
        return cls.make(values[:3], values[3:])


def tilt_angle(map_pose: Pose) -> float:
    """Angle between the map plane's normal and the horizontal plane, degrees.

    0 for a vertical map (wall poster), 90 for a horizontal one (tabletop).
    """
    normal = quat_rotate(map_pose.q, np.array([0.0, 0.0, 1.0]))
    return math.degrees(math.asin(min(1.0, abs(float(np.dot(normal, UP))))))


# ---------------------------------------------------------------------------
# grab interaction


@dataclass(frozen=True)
class GrabState:
    held: bool
    controller_at_grab: Pose | None = None
    map_at_grab: Pose | None = None

    @classmethod
    def grab(cls, controller: Pose, map_pose: Pose) -> "GrabState":
        return cls(True, controller, map_pose)

    @classmethod
    def released(cls) -> "GrabState":
        return cls(False)


def grab_update(state: GrabState, controller: Pose) -> Pose:
    """Map pose while held: the controller-relative transform from the grab
    instant is preserved exactly (rigid latch)."""
    if not state.held or state.controller_at_grab is None or state.map_at_grab is None:
        raise NotHeld("map is not currently grabbed")
    return controller.compose(state.controller_at_grab.inverse()).compose(state.map_at_grab)


# ---------------------------------------------------------------------------
# study-2 condition layouts


@dataclass(frozen=True)
class ToggleMode:
    index: int = 0

    @property
    def view(self) -> str:
        return TOGGLE_VIEWS[self.index % 3]


def toggle_step(mode: ToggleMode, direction: int) -> ToggleMode:
    """Cycle choropleth -> prism -> barChart (forward) or backward."""
    if direction not in (1, -1):
        raise OutOfRange("direction must be +1 or -1")
    return ToggleMode((mode.index + direction) % 3)


def _horizontal_forward(eye: Pose) -> np.ndarray:
    fwd = quat_rotate(eye.q, np.array([0.0, 0.0, -1.0]))
    horiz = fwd - np.dot(fwd, UP) * UP
    norm = np.linalg.norm(horiz)
    if norm < 1e-9:
        raise OutOfRange("eye is looking straight up or down; no horizontal forward")
    return horiz / norm


def _facing_pose(position: np.ndarray, toward_eye: np.ndarray, tilt_deg: float) -> Pose:
    """Map pose at ``position`` facing back along ``toward_eye``, tilted up
    from vertical by ``tilt_deg``."""
    t = math.radians(tilt_deg)
    normal = toward_eye * math.cos(t) + UP * math.sin(t)
    right = np.cross(-toward_eye, UP)
    right /= np.linalg.norm(right)
    y_axis = np.cross(normal, right)
    return Pose.make(position, quat_from_basis(right, y_axis, normal))


def initial_pose(eye: Pose, study: int) -> Pose:
    """Starting map pose: 0.6 m ahead, 0.1 m below the eye; tilted 45 degrees
    in the first study's replication and flat (0) in the second's."""
    if study not in (1, 2):
        raise OutOfRange("study must be 1 or 2")
    fwd = _horizontal_forward(eye)
    position = eye.p + 0.6 * fwd - 0.1 * UP
    return _facing_pose(position, -fwd, 45.0 if study == 1 else 0.0)


def side_by_side_layout(eye: Pose) -> dict[str, Pose]:
    """Egocentric three-view arrangement at 0.9 m: prism dead ahead tilted to
    75 degrees, choropleth 80 degrees anticlockwise, bar chart 80 degrees
    clockwise, both outer views vertical."""
    fwd = _horizontal_forward(eye)
    rot_ccw = quat_from_axis_angle(UP, 80.0)
    rot_cw = quat_from_axis_angle(UP, -80.0)
    dirs = {
        "choropleth": quat_rotate(rot_ccw, fwd),
        "prism": fwd,
        "barChart": quat_rotate(rot_cw, fwd),
    }
    tilts = {"choropleth": 0.0, "prism": 75.0, "barChart": 0.0}
    return {
        name: _facing_pose(eye.p + 0.9 * d, -d, tilts[name])
        for name, d in dirs.items()
    }


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceSample:
    t: float
    head: Pose
    controller: Pose
    map: Pose
    view: str

    def to_record(self) -> dict:
        # field order fixed: t, head, ctrl, map, view
        return {
            "t": self.t,
            "head": self.head.flat(),
            "ctrl": self.controller.flat(),
            "map": self.map.flat(),
            "view": self.view,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TraceSample":
        view = rec["view"]
        if view not in VIEW_CLASSES:
            raise OutOfRange(f"unknown view class {view!r}")
        return cls(
            t=float(rec["t"]),
            head=Pose.from_flat(rec["head"]),
            controller=Pose.from_flat(rec["ctrl"]),
            map=Pose.from_flat(rec["map"]),
            view=view,
        )


@dataclass(frozen=True)
class TaskRun:
    """One answered task inside a session: timing plus the slider answer."""

    task_index: int
    t_start: float
    t_end: float
    answer: int


@dataclass(eq=False)
class SessionLog:
    samples: list[TraceSample]
    task_runs: list[TaskRun] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(s.to_record()) for s in self.samples) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "SessionLog":
        samples = [TraceSample.from_record(json.loads(line)) for line in text.splitlines() if line.strip()]
        for a, b in zip(samples, samples[1:]):
            if b.t <= a.t:
                raise OutOfRange(f"trace timestamps must strictly increase ({a.t} -> {b.t})")
        return cls(samples=samples)


def view_class_of_phase(phase: str) -> str:
    return VIEW_CLASS_OF_PHASE[phase]


def classify_movement(prev: TraceSample, cur: TraceSample, subject: str) -> bool:
    """True iff the subject's pose moved strictly more than 1 cm or rotated
    strictly more than 5 degrees between the two samples."""
    if subject == "head":
        a, b = prev.head, cur.head
    elif subject == "map":
        a, b = prev.map, cur.map
    else:
        raise OutOfRange(f"subject must be head or map: {subject}")
    translation = float(np.linalg.norm(b.p - a.p))
    return translation > TRANSLATION_THRESHOLD_M or quat_angle_deg(a.q, b.q) > ROTATION_THRESHOLD_DEG


def resample_10hz(samples: list[TraceSample]) -> list[TraceSample]:
    """Linearly resample irregular logs to the nominal 0.1 s cadence.

    Regular logs pass through untouched.  Positions interpolate linearly,
    orientations by normalized lerp, and the view class holds from the
    previous sample.
    """
    if len(samples) < 2:
        return list(samples)
    dts = np.diff([s.t for s in samples])
    if np.all(np.abs(dts - SAMPLE_DT) < 1e-6):
        return list(samples)
    t0, t1 = samples[0].t, samples[-1].t
    count = max(2, int(round((t1 - t0) / SAMPLE_DT)) + 1)
    times = t0 + SAMPLE_DT * np.arange(count)
    out = []
    j = 0
    for t in times:
        while j + 1 < len(samples) - 1 and samples[j + 1].t <= t:
            j += 1
        a, b = samples[j], samples[min(j + 1, len(samples) - 1)]
        span = b.t - a.t
        f = 0.0 if span <= 0 else min(1.0, max(0.0, (t - a.t) / span))

        def lerp_pose(pa: Pose, pb: Pose) -> Pose:
            pos = (1 - f) * pa.p + f * pb.p
            q = (1 - f) * pa.q + f * pb.q
            if np.linalg.norm(q) < 1e-9:
                q = pb.q
            return Pose.make(pos, q)

        out.append(
            TraceSample(
                t=float(t),
                head=lerp_pose(a.head, b.head),
                controller=lerp_pose(a.controller, b.controller),
                map=lerp_pose(a.map, b.map),
                view=a.view if f < 1.0 else b.view,
            )
        )
    return out


def analyze(log: SessionLog, tasks: list[TaskSpec] | None = None) -> dict:
    """Analytics over a session: movement shares, tilt histogram, per-view
    time shares, time above 45 degrees and per-task timing/error.

    Movement percentages are per-question (normalized to each task's span)
    when task runs are present, with the headline numbers their mean.
    """
    if len(log.samples) < 2:
        raise EmptyLog("need at least two samples")
    samples = resample_10hz(log.samples)

    def movement_pct(subset: list[TraceSample], subject: str) -> float:
        if len(subset) < 2:
            return 0.0
        moved = sum(
            classify_movement(a, b, subject) for a, b in zip(subset, subset[1:])
        )
        return 100.0 * moved / (len(subset) - 1)

    tilts = [tilt_angle(s.map) for s in samples]
    hist = [0.0] * 90
    for t in tilts:
        hist[min(89, int(t))] += 1
    hist = [100.0 * h / len(tilts) for h in hist]

    view_pct = {vc: 0.0 for vc in VIEW_CLASSES}
    for s in samples:
        view_pct[s.view] += 1
    view_pct = {vc: 100.0 * n / len(samples) for vc, n in view_pct.items()}

    report = {
        "headMovementPct": movement_pct(samples, "head"),
        "mapMovementPct": movement_pct(samples, "map"),
        "tiltHistogramDeg": hist,
        "viewClassPct": view_pct,
        "tiltAbove45Pct": 100.0 * sum(t > 45.0 for t in tilts) / len(tilts),
        "tasks": [],
    }

    if log.task_runs:
        per_task_head, per_task_map = [], []
        for run in log.task_runs:
            subset = [s for s in samples if run.t_start <= s.t <= run.t_end]
            head = movement_pct(subset, "head")
            mp = movement_pct(subset, "map")
            per_task_head.append(head)
            per_task_map.append(mp)
            entry = {
                "task": run.task_index,
                "elapsedSeconds": run.t_end - run.t_start,
                "answer": run.answer,
                "headMovementPct": head,
                "mapMovementPct": mp,
            }
            if tasks is not None and 0 <= run.task_index < len(tasks):
                entry["absDiff"] = abs_diff(run.answer, tasks[run.task_index].answer)
            report["tasks"].append(entry)
        report["headMovementPct"] = float(np.mean(per_task_head))
        report["mapMovementPct"] = float(np.mean(per_task_map))
    return report
