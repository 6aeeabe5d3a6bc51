"""Tilt-driven morph between choropleth, prism map and bar chart.

scene() is a pure function from (map, layer, style, tilt state, schedule) to
a complete renderable MorphScene.  The tilt domain [0, 90] is divided into
seven phases:

    a  flat choropleth
    b  prisms growing with tilt
    c  full prism map
    d  footprints shrinking toward their centroids (non-contiguous cartogram)
    e  footprints cross-fading into square bar bases (bars on the map)
    f  bars sliding to their slots on the baseline while their depth
       collapses to zero
    g  flat 2D bar chart

Heights reach height_of(value) at the start of phase c and never change
afterwards; from d on only the footprint morphs.  Every area keeps the same
mesh topology (bottom ring + top ring + walls + top cap) across all phases,
so vertex correspondence between nearby tilt angles is exact and continuity
can be measured per vertex.

Map-local coordinates: x/y in the unit map quad, +z along the map normal;
one map unit is rendered at 1 m, so extrusion heights in meters are used
directly as z values.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, replace

import numpy as np

from . import thematic
from .errors import InvalidSchedule, InvalidTiltState, OutOfRange, TooManyBars, UnknownArea
from .geodata import GeoMap, triangulate
from .thematic import Style, ThematicLayer, color_of, height_of, legend_spec

MIN_BAR_WIDTH = 0.0025  # map units; caps the bar chart at 320 areas

PHASES = ("a", "b", "c", "d", "e", "f", "g")
CONSTANT_PHASES = ("a", "c", "g")

#: Map a morph phase to the view class used by session analytics.
VIEW_CLASS_OF_PHASE = {
    "a": "choropleth",
    "b": "transitionCP",
    "c": "prism",
    "d": "transitionPB",
    "e": "transitionPB",
    "f": "transitionPB",
    "g": "barChart",
}


@dataclass(frozen=True)
class PhaseSchedule:
    """Tilt breakpoints (degrees) separating the seven phases; domain end 90."""

    choropleth_end: float = 5.0
    prism_start: float = 40.0
    prism_end: float = 50.0
    shrink_end: float = 65.0
    bars_on_map_end: float = 75.0
    slide_end: float = 85.0

    def __post_init__(self):
        seq = (
            0.0,
            self.choropleth_end,
            self.prism_start,
            self.prism_end,
            self.shrink_end,
            self.bars_on_map_end,
            self.slide_end,
            90.0,
        )
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise InvalidSchedule(f"breakpoints must satisfy 0 < {seq[1:-1]} < 90 strictly increasing")

    def breakpoints(self) -> tuple[float, ...]:
        return (
            self.choropleth_end,
            self.prism_start,
            self.prism_end,
            self.shrink_end,
            self.bars_on_map_end,
            self.slide_end,
        )


DEFAULT_SCHEDULE = PhaseSchedule()


def phase_of(tilt_deg: float, schedule: PhaseSchedule = DEFAULT_SCHEDULE) -> tuple[str, float]:
    """Phase letter and local parameter s in [0, 1] for a tilt angle.

    Constant phases (a, c, g) always report s = 0; transition phases report
    the linear position inside their interval.
    """
    if not 0.0 <= tilt_deg <= 90.0:
        raise OutOfRange(f"tilt outside [0, 90]: {tilt_deg}")
    ce, ps, pe, se, be, sl = schedule.breakpoints()
    if tilt_deg <= ce:
        return "a", 0.0
    if tilt_deg < ps:
        return "b", (tilt_deg - ce) / (ps - ce)
    if tilt_deg <= pe:
        return "c", 0.0
    if tilt_deg <= se:
        return "d", (tilt_deg - pe) / (se - pe)
    if tilt_deg <= be:
        return "e", (tilt_deg - se) / (be - se)
    if tilt_deg <= sl:
        return "f", (tilt_deg - be) / (sl - be)
    return "g", 0.0


def prism_height_factor(tilt_deg: float, schedule: PhaseSchedule = DEFAULT_SCHEDULE) -> float:
    """Fraction of full prism height shown at a tilt angle.

    Zero through the choropleth phase, ramping linearly to 1 at the start of
    the prism phase and staying at 1 for all later phases (the footprint,
    not the height, changes beyond the prism view).
    """
    if not 0.0 <= tilt_deg <= 90.0:
        raise OutOfRange(f"tilt outside [0, 90]: {tilt_deg}")
    ce, ps = schedule.choropleth_end, schedule.prism_start
    if tilt_deg <= ce:
        return 0.0
    if tilt_deg >= ps:
        return 1.0
    return (tilt_deg - ce) / (ps - ce)


# ---------------------------------------------------------------------------
# view frame and bar geometry


def _view_frame(azimuth_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """In-plane (right, depth) unit vectors for a view azimuth.

    The azimuth is the compass bearing of the gaze direction over the map
    (0 looks north, so the viewer stands at the southern edge; 90 looks
    east).  ``right`` points to the viewer's left-to-right axis.
    """
    az = math.radians(azimuth_deg % 360.0)
    depth = np.array([math.sin(az), math.cos(az)])
    right = np.array([depth[1], -depth[0]])
    return right, depth


def bar_order(gm: GeoMap, view_azimuth_deg: float) -> tuple[str, ...]:
    """Areas sorted by centroid position along the viewer's left-right axis.

    Viewing with the southern edge nearest (azimuth 0) orders bars west to
    east; with the eastern edge nearest, south to north.  Ties break on id.
    """
    right, _ = _view_frame(view_azimuth_deg)
    keyed = []
    for a in gm.areas:
        if a.planar_centroid is None:
            raise UnknownArea(f"area {a.id} has no planar coordinates; project the map first")
        keyed.append((float(np.dot(a.planar_centroid, right)), a.id))
    keyed.sort()
    return tuple(aid for _, aid in keyed)


@dataclass(frozen=True)
class BarLayout:
    """Uniform slot layout for the bar chart along the unit baseline."""

    order: tuple[str, ...]
    slot_centers: dict[str, float]  # position in [0, 1] along the baseline
    bar_width: float
    gap: float


def bar_layout(gm: GeoMap, order: tuple[str, ...], min_bar_width: float = MIN_BAR_WIDTH) -> BarLayout:
    """Slot the ordered areas into the unit-width chart (80% bar, 20% gap)."""
    n = len(order)
    if n < 1:
        raise OutOfRange("bar layout needs at least one area")
    if sorted(order) != sorted(gm.ids()):
        raise UnknownArea("bar order is not a permutation of the map's areas")
    slot = 1.0 / n
    width = 0.8 * slot
    if width < min_bar_width:
        raise TooManyBars(f"{n} bars would be {width:.5f} map units wide, below the {min_bar_width} minimum")
    centers = {aid: (i + 0.5) * slot for i, aid in enumerate(order)}
    return BarLayout(order=order, slot_centers=centers, bar_width=width, gap=0.2 * slot)


# ---------------------------------------------------------------------------
# tilt state


@dataclass(frozen=True)
class TiltState:
    """Tilt + azimuth input, with the bar order frozen past the prism phase.

    The frozen order (and the azimuth it was computed from, which anchors
    the baseline) must be present iff the tilt is beyond the prism phase;
    use :meth:`at` to build a valid state directly or :func:`tilt_to` to
    evolve one interactively.
    """

    tilt_deg: float
    view_azimuth_deg: float
    frozen_bar_order: tuple[str, ...] | None = None
    frozen_azimuth_deg: float | None = None

    @classmethod
    def at(
        cls,
        gm: GeoMap,
        tilt_deg: float,
        view_azimuth_deg: float = 0.0,
        schedule: PhaseSchedule = DEFAULT_SCHEDULE,
    ) -> "TiltState":
        if not 0.0 <= tilt_deg <= 90.0:
            raise OutOfRange(f"tilt outside [0, 90]: {tilt_deg}")
        az = view_azimuth_deg % 360.0
        if tilt_deg > schedule.prism_end:
            return cls(tilt_deg, az, bar_order(gm, az), az)
        return cls(tilt_deg, az)

    def validate(self, gm: GeoMap, schedule: PhaseSchedule) -> None:
        beyond = self.tilt_deg > schedule.prism_end
        if beyond != (self.frozen_bar_order is not None):
            raise InvalidTiltState("frozen bar order must be present iff tilt is beyond the prism phase")
        if self.frozen_bar_order is not None:
            if self.frozen_azimuth_deg is None:
                raise InvalidTiltState("frozen bar order requires its frozen azimuth")
            if sorted(self.frozen_bar_order) != sorted(gm.ids()):
                raise InvalidTiltState("frozen bar order is not a permutation of the map's areas")


def tilt_to(
    gm: GeoMap,
    state: TiltState,
    tilt_deg: float,
    view_azimuth_deg: float | None = None,
    schedule: PhaseSchedule = DEFAULT_SCHEDULE,
) -> TiltState:
    """Advance a tilt state, freezing the bar order at the moment the morph
    leaves the prism phase and clearing it on return."""
    if not 0.0 <= tilt_deg <= 90.0:
        raise OutOfRange(f"tilt outside [0, 90]: {tilt_deg}")
    az = state.view_azimuth_deg if view_azimuth_deg is None else view_azimuth_deg % 360.0
    beyond = tilt_deg > schedule.prism_end
    if not beyond:
        return TiltState(tilt_deg, az)
    if state.frozen_bar_order is not None:
        return replace(state, tilt_deg=tilt_deg, view_azimuth_deg=az)
    return TiltState(tilt_deg, az, bar_order(gm, az), az)


# ---------------------------------------------------------------------------
# scene assembly


@dataclass(eq=False)
class AreaMesh:
    id: str
    positions: np.ndarray  # (2n, 3) float: bottom ring(s) then top ring(s)
    indices: np.ndarray  # (m, 3) int32
    color: tuple[float, float, float]
    border: bool = True


@dataclass(frozen=True)
class AxisAnnotation:
    side: str  # left | right | top | bottom
    pose_deg: float  # 0 in the map plane, 90 perpendicular (height axis)
    ticks: tuple[int, ...]
    labels: tuple[int, ...]
    line: tuple[tuple[float, float, float], tuple[float, float, float]]
    opacity: float = 1.0


@dataclass(frozen=True)
class SceneLabel:
    text: str
    anchor: tuple[float, float, float]


@dataclass(eq=False)
class MorphScene:
    phase: str
    tilt_deg: float
    azimuth_deg: float
    areas: list[AreaMesh]
    axes: list[AxisAnnotation]
    labels: list[SceneLabel]

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "tiltDeg": self.tilt_deg,
            "azimuthDeg": self.azimuth_deg,
            "areas": [
                {
                    "id": m.id,
                    "positions": [float(v) for v in m.positions.reshape(-1)],
                    "indices": [int(v) for v in m.indices.reshape(-1)],
                    "color": list(m.color),
                    "border": m.border,
                }
                for m in self.areas
            ],
            "axes": [
                {
                    "side": ax.side,
                    "pose": ax.pose_deg,
                    "ticks": list(ax.ticks),
                    "labels": list(ax.labels),
                    "line": [list(ax.line[0]), list(ax.line[1])],
                    "opacity": ax.opacity,
                }
                for ax in self.axes
            ],
            "labels": [{"text": lb.text, "anchor": list(lb.anchor)} for lb in self.labels],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MorphScene":
        areas = [
            AreaMesh(
                id=rec["id"],
                positions=np.asarray(rec["positions"], dtype=float).reshape(-1, 3),
                indices=np.asarray(rec["indices"], dtype=np.int32).reshape(-1, 3),
                color=tuple(rec["color"]),
                border=bool(rec["border"]),
            )
            for rec in doc["areas"]
        ]
        axes = [
            AxisAnnotation(
                side=rec["side"],
                pose_deg=float(rec["pose"]),
                ticks=tuple(rec["ticks"]),
                labels=tuple(rec["labels"]),
                line=(tuple(rec["line"][0]), tuple(rec["line"][1])),
                opacity=float(rec.get("opacity", 1.0)),
            )
            for rec in doc["axes"]
        ]
        labels = [SceneLabel(text=rec["text"], anchor=tuple(rec["anchor"])) for rec in doc["labels"]]
        return cls(
            phase=doc["phase"],
            tilt_deg=float(doc["tiltDeg"]),
            azimuth_deg=float(doc["azimuthDeg"]),
            areas=areas,
            axes=axes,
            labels=labels,
        )


class _AreaBuffers:
    """Tilt-independent geometry for one area, built once per map."""

    __slots__ = ("id", "name", "verts", "ring_slices", "cap", "edges", "centroid", "rel")

    def __init__(self, area):
        rings = [ring for poly in area.planar for ring in poly.rings()]
        self.id = area.id
        self.name = area.name
        self.verts = np.vstack(rings)
        cap_parts = []
        offset = 0
        for poly in area.planar:
            cap_parts.append(triangulate(poly) + offset)
            offset += sum(len(r) for r in poly.rings())
        self.ring_slices = []
        edge_parts = []
        start = 0
        for ring in rings:
            n = len(ring)
            self.ring_slices.append((start, n))
            idx = np.arange(start, start + n)
            edge_parts.append(np.column_stack([idx, np.roll(idx, -1)]))
            start += n
        self.cap = np.vstack(cap_parts)
        self.edges = np.vstack(edge_parts)
        self.centroid = np.asarray(area.planar_centroid, dtype=float)
        self.rel = self.verts - self.centroid


def _map_buffers(gm: GeoMap) -> list[_AreaBuffers]:
    cache = _BUFFER_CACHE.get(gm)
    if cache is None:
        if gm.projection is None:
            raise UnknownArea("map has no planar coordinates; project it first")
        cache = [_AreaBuffers(a) for a in gm.areas]
        _BUFFER_CACHE[gm] = cache
    return cache


_BUFFER_CACHE: "weakref.WeakKeyDictionary[GeoMap, list[_AreaBuffers]]" = weakref.WeakKeyDictionary()


def _rect_targets(buf: _AreaBuffers, right: np.ndarray, depth: np.ndarray, half: float) -> np.ndarray:
    """Per-vertex targets on the bar rectangle perimeter (frame coordinates).

    Vertices map along the ray from the centroid onto the square's boundary;
    on the outer ring the four vertices nearest the diagonal directions snap
    exactly to the corners so the rectangle's full extent is always realized.
    """
    u = buf.rel @ right
    v = buf.rel @ depth
    mag = np.maximum(np.maximum(np.abs(u), np.abs(v)), 1e-30)
    tu = u / mag * half
    tv = v / mag * half
    start, n = buf.ring_slices[0]
    ang = np.arctan2(v[start : start + n], u[start : start + n])
    for corner in (np.pi / 4, 3 * np.pi / 4, -3 * np.pi / 4, -np.pi / 4):
        diff = np.abs(np.angle(np.exp(1j * (ang - corner))))
        k = start + int(np.argmin(diff))
        tu[k] = half * math.copysign(1.0, math.cos(corner))
        tv[k] = half * math.copysign(1.0, math.sin(corner))
    return np.column_stack([tu, tv])


def _footprint(buf, phase, s, frame, layout, rect):
    """The 2D footprint of one area at the current phase (map-local x/y)."""
    right, depth = frame
    if phase in ("a", "b", "c"):
        return buf.verts
    if phase == "d":
        k = 1.0 - 0.75 * s
        return buf.centroid + buf.rel * k
    if phase == "e":
        shrunk = buf.rel * 0.25
        uv = np.column_stack([shrunk @ right, shrunk @ depth])
        uv = (1.0 - s) * uv + s * rect
        return buf.centroid + np.outer(uv[:, 0], right) + np.outer(uv[:, 1], depth)
    # f and g: slide along the baseline while depth collapses
    slot_pos = np.array([0.5, 0.5]) + (layout.slot_centers[buf.id] - 0.5) * right
    if phase == "f":
        ctr = (1.0 - s) * buf.centroid + s * slot_pos
        dscale = 1.0 - s
    else:  # g
        ctr = slot_pos
        dscale = 0.0
    return ctr + np.outer(rect[:, 0], right) + np.outer(rect[:, 1], depth) * dscale


def _extrude(buf: _AreaBuffers, footprint: np.ndarray, top_z: float) -> tuple[np.ndarray, np.ndarray]:
    n = len(footprint)
    positions = np.empty((2 * n, 3))
    positions[:n, :2] = footprint
    positions[:n, 2] = 0.0
    positions[n:, :2] = footprint
    positions[n:, 2] = top_z
    i = buf.edges[:, 0]
    j = buf.edges[:, 1]
    walls = np.vstack(
        [
            np.column_stack([i, j, j + n]),
            np.column_stack([i, j + n, i + n]),
        ]
    )
    indices = np.vstack([walls, buf.cap + n]).astype(np.int32)
    return positions, indices


def _axes_for(phase: str, s: float, frame) -> list[AxisAnnotation]:
    right, depth = frame
    spec = legend_spec()
    mids = {
        "left": np.array([0.5, 0.5]) - 0.5 * right,
        "right": np.array([0.5, 0.5]) + 0.5 * right,
        "bottom": np.array([0.5, 0.5]) - 0.5 * depth,
        "top": np.array([0.5, 0.5]) + 0.5 * depth,
    }
    edge_dir = {"left": depth, "right": depth, "bottom": right, "top": right}
    if phase == "a":
        pose = 0.0
    elif phase == "b":
        pose = 90.0 * s
    else:
        pose = 90.0
    sides = ["left", "right", "top", "bottom"]
    if phase == "g":
        sides = ["left", "right"]
    axes = []
    for side in sides:
        opacity = 1.0
        if phase == "f" and side in ("top", "bottom"):
            opacity = 1.0 - s
        mid = mids[side]
        frac = pose / 90.0
        # endpoints lerp from the full in-plane edge to a height axis of
        # length MAX_HEIGHT_M standing at the edge midpoint
        a2 = mid - 0.5 * (1.0 - frac) * edge_dir[side]
        b2 = mid + 0.5 * (1.0 - frac) * edge_dir[side]
        z_b = frac * thematic.MAX_HEIGHT_M
        line = ((float(a2[0]), float(a2[1]), 0.0), (float(b2[0]), float(b2[1]), float(z_b)))
        axes.append(
            AxisAnnotation(side=side, pose_deg=pose, ticks=spec.ticks, labels=spec.labeled, line=line, opacity=opacity)
        )
    return axes


def scene(
    gm: GeoMap,
    layer: ThematicLayer,
    style: Style,
    state: TiltState,
    schedule: PhaseSchedule = DEFAULT_SCHEDULE,
) -> MorphScene:
    """Build the full renderable scene for one tilt/azimuth/style input.

    The tiltMap style implements the seven-phase morph; choropleth renders
    flat regardless of tilt, and the two prism styles render the full prism
    map, matching the morph's endpoint and midpoint geometry exactly.
    """
    missing = [a.id for a in gm.areas if a.id not in layer.values]
    if missing:
        raise UnknownArea(f"layer does not cover areas: {missing[:5]}")
    state.validate(gm, schedule)

    if style is Style.TILT_MAP:
        phase, s = phase_of(state.tilt_deg, schedule)
        hf = prism_height_factor(state.tilt_deg, schedule)
    elif style is Style.CHOROPLETH:
        phase, s, hf = "a", 0.0, 0.0
    else:  # static prism styles
        phase, s, hf = "c", 0.0, 1.0

    buffers = _map_buffers(gm)
    az_for_frame = state.frozen_azimuth_deg if state.frozen_bar_order is not None else state.view_azimuth_deg
    frame = _view_frame(az_for_frame)

    layout = None
    rects: dict[str, np.ndarray] = {}
    if phase in ("d", "e", "f", "g"):
        order = state.frozen_bar_order
        assert order is not None
        layout = bar_layout(gm, order)
        if phase != "d":
            half = layout.bar_width / 2.0
            rects = {buf.id: _rect_targets(buf, frame[0], frame[1], half) for buf in buffers}

    uniform = thematic.monochrome_color() if style is Style.MONOCHROME_PRISM else None
    meshes = []
    labels = []
    for buf in buffers:
        value = layer.values[buf.id]
        footprint = _footprint(buf, phase, s, frame, layout, rects.get(buf.id))
        positions, indices = _extrude(buf, footprint, height_of(value) * hf)
        color = uniform if uniform is not None else color_of(value)
        meshes.append(AreaMesh(id=buf.id, positions=positions, indices=indices, color=color, border=True))
        n = len(footprint)
        anchor = positions[n:].mean(axis=0)
        labels.append(SceneLabel(text=buf.name, anchor=(float(anchor[0]), float(anchor[1]), float(anchor[2]))))

    axes = _axes_for(phase, s, frame)
    return MorphScene(
        phase=phase,
        tilt_deg=state.tilt_deg,
        azimuth_deg=state.view_azimuth_deg,
        areas=meshes,
        axes=axes,
        labels=labels,
    )


def continuity_check(
    gm: GeoMap,
    layer: ThematicLayer,
    schedule: PhaseSchedule = DEFAULT_SCHEDULE,
    step_deg: float = 0.1,
    view_azimuth_deg: float = 0.0,
    style: Style = Style.TILT_MAP,
) -> float:
    """Max vertex displacement between consecutive steps of a 0-90 sweep."""
    if step_deg <= 0:
        raise OutOfRange("step must be positive")
    n = int(round(90.0 / step_deg))
    tilts = np.linspace(0.0, 90.0, n + 1)
    worst = 0.0
    prev = None
    frozen = bar_order(gm, view_azimuth_deg)
    for t in tilts:
        if t > schedule.prism_end:
            st = TiltState(float(t), view_azimuth_deg, frozen, view_azimuth_deg)
        else:
            st = TiltState(float(t), view_azimuth_deg)
        cur = scene(gm, layer, style, st, schedule)
        if prev is not None:
            for m0, m1 in zip(prev.areas, cur.areas):
                disp = float(np.linalg.norm(m1.positions - m0.positions, axis=1).max())
                worst = max(worst, disp)
        prev = cur
    return worst
