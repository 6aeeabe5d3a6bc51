"""Boundary ingestion, adjacency, projection and geodesic primitives.

The spatial substrate for everything else: GeoJSON FeatureCollections are
parsed into a :class:`GeoMap` (areas with normalized rings), neighbor
relations are derived from shared boundary geometry, and a Lambert azimuthal
equal-area projection maps the whole dataset into the unit map quad
(map-local coordinates in [0, 1] x [0, 1], rendered at 1 m x 1 m).

All functions here are pure; a GeoMap is never mutated after construction.
"""

from __future__ import annotations

import json
import math
from bisect import insort
from dataclasses import dataclass, field, replace

import numpy as np

from .earclip import triangulate_rings
from .errors import (
    AntipodalPoint,
    ComponentTooSmall,
    DegenerateRing,
    MalformedDocument,
    MissingProperty,
    UnknownArea,
)

MAP_EXTENT = 1.0

# Quantum used to key vertices when matching shared boundaries between areas.
_VERTEX_QUANTUM = 1e-9


@dataclass(frozen=True)
class GeoPosition:
    """A point on the sphere, in degrees."""

    lon: float
    lat: float

    def __post_init__(self):
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise MalformedDocument("non-finite coordinate")
        if not (-180.0 <= self.lon <= 180.0 and -90.0 <= self.lat <= 90.0):
            raise MalformedDocument(f"coordinate out of bounds: ({self.lon}, {self.lat})")

    def unit_vector(self) -> np.ndarray:
        lam, phi = math.radians(self.lon), math.radians(self.lat)
        return np.array(
            [math.cos(phi) * math.cos(lam), math.cos(phi) * math.sin(lam), math.sin(phi)]
        )


Ring = tuple[GeoPosition, ...]  # closed: first vertex repeated at the end


@dataclass(frozen=True)
class Polygon:
    """One closed outer ring plus zero or more hole rings.

    Rings are stored closed (first == last vertex).  The outer ring winds
    counterclockwise in lon/lat, holes clockwise.
    """

    outer: Ring
    holes: tuple[Ring, ...] = ()


@dataclass(eq=False)
class PlanarPolygon:
    """Projected polygon in map-local units; rings are open (n, 2) arrays."""

    outer: np.ndarray
    holes: tuple[np.ndarray, ...] = ()

    def rings(self) -> list[np.ndarray]:
        return [self.outer, *self.holes]


@dataclass(eq=False)
class Area:
    id: str
    name: str
    polygons: tuple[Polygon, ...]
    centroid: GeoPosition
    surface: float  # steradians
    planar: tuple[PlanarPolygon, ...] | None = None
    planar_centroid: np.ndarray | None = None


@dataclass(frozen=True)
class ProjectionFit:
    """Similarity transform applied after the raw azimuthal projection."""

    center: GeoPosition
    scale: float
    offset: tuple[float, float]

    def apply(self, xy: np.ndarray) -> np.ndarray:
        return xy * self.scale + np.asarray(self.offset)


@dataclass(eq=False)
class GeoMap:
    areas: tuple[Area, ...]
    adjacency: dict[str, frozenset[str]] | None = None
    projection: ProjectionFit | None = None
    extent: float = MAP_EXTENT
    _index: dict[str, Area] = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {a.id: a for a in self.areas}
        if len(self._index) != len(self.areas):
            raise MalformedDocument("duplicate area ids")

    def area(self, area_id: str) -> Area:
        try:
            return self._index[area_id]
        except KeyError:
            raise UnknownArea(f"no such area: {area_id}") from None

    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.areas)

    def neighbors(self, area_id: str) -> frozenset[str]:
        if self.adjacency is None:
            raise MalformedDocument("adjacency not built; call build_adjacency first")
        self.area(area_id)
        return self.adjacency.get(area_id, frozenset())

    # --- mapfile serialization -------------------------------------------

    def to_mapfile(self) -> dict:
        if self.adjacency is None or self.projection is None:
            raise MalformedDocument("mapfile requires adjacency and projection")
        areas = []
        for a in self.areas:
            # rings/planarRings nest one list per polygon, outer ring first.
            rings = [
                [[[p.lon, p.lat] for p in ring] for ring in (poly.outer, *poly.holes)]
                for poly in a.polygons
            ]
            planar = []
            assert a.planar is not None
            for pp in a.planar:
                closed = [np.vstack([ring, ring[:1]]) for ring in pp.rings()]
                planar.append([[[float(x), float(y)] for x, y in ring] for ring in closed])
            areas.append(
                {
                    "id": a.id,
                    "name": a.name,
                    "rings": rings,
                    "planarRings": planar,
                    "centroid": [a.centroid.lon, a.centroid.lat],
                    "steradians": a.surface,
                }
            )
        pairs = sorted(
            sorted(pair)
            for a, nbrs in self.adjacency.items()
            for pair in ((a, b) for b in nbrs)
            if pair[0] < pair[1]
        )
        proj = {
            "centerLon": self.projection.center.lon,
            "centerLat": self.projection.center.lat,
            "scale": self.projection.scale,
            "offset": list(self.projection.offset),
        }
        return {"areas": areas, "adjacency": pairs, "projection": proj}

    @classmethod
    def from_mapfile(cls, doc: dict) -> "GeoMap":
        try:
            areas = []
            for rec in doc["areas"]:
                polys, planars = [], []
                for geo, pla in zip(rec["rings"], rec["planarRings"]):
                    rings = [tuple(GeoPosition(lon, lat) for lon, lat in r) for r in geo]
                    polys.append(Polygon(rings[0], tuple(rings[1:])))
                    arrays = [np.asarray(r[:-1], dtype=float) for r in pla]
                    planars.append(PlanarPolygon(arrays[0], tuple(arrays[1:])))
                area = Area(
                    id=str(rec["id"]),
                    name=str(rec["name"]),
                    polygons=tuple(polys),
                    centroid=GeoPosition(*rec["centroid"]),
                    surface=float(rec["steradians"]),
                    planar=tuple(planars),
                )
                areas.append(area)
            proj = doc["projection"]
            fit = ProjectionFit(
                center=GeoPosition(proj["centerLon"], proj["centerLat"]),
                scale=float(proj["scale"]),
                offset=(float(proj["offset"][0]), float(proj["offset"][1])),
            )
            adjacency: dict[str, set[str]] = {a.id: set() for a in areas}
            for a, b in doc["adjacency"]:
                adjacency[a].add(b)
                adjacency[b].add(a)
            gm = cls(
                areas=tuple(areas),
                adjacency={k: frozenset(v) for k, v in adjacency.items()},
                projection=fit,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad mapfile: {exc}") from exc
        for a in gm.areas:
            a.planar_centroid = fit.apply(lambert_azimuthal(fit.center, np.array([[a.centroid.lon, a.centroid.lat]])))[0]
        return gm


# ---------------------------------------------------------------------------
# parsing


def _normalize_ring(coords, feature_id: str, is_hole: bool) -> Ring:
    """Re-close and re-wind a raw coordinate ring; reject if degenerate."""
    try:
        pts = [(float(lon), float(lat)) for lon, lat, *_ in coords]
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"feature {feature_id}: bad ring coordinates") from exc
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    deduped = [p for i, p in enumerate(pts) if i == 0 or p != pts[i - 1]]
    if len(deduped) >= 2 and deduped[0] == deduped[-1]:
        deduped = deduped[:-1]
    if len(deduped) < 3:
        raise DegenerateRing(f"feature {feature_id}: ring has fewer than 4 vertices")
    area2 = 0.0
    for i, (x1, y1) in enumerate(deduped):
        x2, y2 = deduped[(i + 1) % len(deduped)]
        area2 += x1 * y2 - x2 * y1
    want_ccw = not is_hole
    if (area2 > 0) != want_ccw:
        deduped.reverse()
    ring = [GeoPosition(lon, lat) for lon, lat in deduped]
    return tuple(ring + [ring[0]])


def _area_centroid(polygons: tuple[Polygon, ...]) -> GeoPosition:
    # 3D mean of outer-ring vertices weighted by incident edge arc length.
    acc = np.zeros(3)
    for poly in polygons:
        ring = poly.outer
        units = [p.unit_vector() for p in ring[:-1]]
        n = len(units)
        for i in range(n):
            u, v = units[i], units[(i + 1) % n]
            w = math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v)))
            acc += w * (u + v) / 2.0
    norm = np.linalg.norm(acc)
    if norm == 0.0:
        acc = polygons[0].outer[0].unit_vector()
        norm = 1.0
    x, y, z = acc / norm
    return GeoPosition(math.degrees(math.atan2(y, x)), math.degrees(math.asin(max(-1.0, min(1.0, z)))))


def parse_boundaries(data: bytes | str | dict, id_property: str, name_property: str | None = None) -> GeoMap:
    """Parse an RFC 7946 FeatureCollection into a GeoMap (no adjacency yet).

    One Area per feature; MultiPolygon features become multiple polygons in
    a single Area.  Rings are silently re-closed and re-wound to the outer
    CCW / hole CW convention; rings with fewer than 4 vertices are rejected.
    """
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise MalformedDocument("expected a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list) or not features:
        raise MalformedDocument("FeatureCollection has no features")

    areas = []
    for idx, feat in enumerate(features):
        props = feat.get("properties") or {}
        if id_property not in props:
            raise MissingProperty(f"feature #{idx} lacks id property {id_property!r}")
        area_id = str(props[id_property])
        name = str(props.get(name_property, area_id)) if name_property else area_id
        geom = feat.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "Polygon":
            polygon_coords = [geom.get("coordinates", [])]
        elif gtype == "MultiPolygon":
            polygon_coords = geom.get("coordinates", [])
        else:
            raise MalformedDocument(f"feature {area_id}: unsupported geometry type {gtype!r}")
        polys = []
        for rings in polygon_coords:
            if not rings:
                raise DegenerateRing(f"feature {area_id}: empty polygon")
            outer = _normalize_ring(rings[0], area_id, is_hole=False)
            holes = tuple(_normalize_ring(r, area_id, is_hole=True) for r in rings[1:])
            polys.append(Polygon(outer, holes))
        polygons = tuple(polys)
        surface = sum(spherical_area(p) for p in polygons)
        areas.append(
            Area(id=area_id, name=name, polygons=polygons, centroid=_area_centroid(polygons), surface=surface)
        )
    return GeoMap(areas=tuple(areas))


# ---------------------------------------------------------------------------
# adjacency


def _vkey(p: GeoPosition) -> tuple[float, float]:
    return (round(p.lon / _VERTEX_QUANTUM), round(p.lat / _VERTEX_QUANTUM))


def build_adjacency(gm: GeoMap, mode: str = "rook", min_shared_length_deg: float = 1e-6) -> GeoMap:
    """Return a copy of the map with the symmetric neighbor relation filled in.

    rook: areas are adjacent iff their shared boundary segments total more
    than ``min_shared_length_deg`` of arc.  queen: any shared vertex suffices.
    """
    if mode not in ("rook", "queen"):
        raise MalformedDocument(f"unknown contiguity mode {mode!r}")
    adjacency: dict[str, set[str]] = {a.id: set() for a in gm.areas}

    if mode == "queen":
        occupants: dict[tuple, set[str]] = {}
        for a in gm.areas:
            for poly in a.polygons:
                for ring in (poly.outer, *poly.holes):
                    for p in ring[:-1]:
                        occupants.setdefault(_vkey(p), set()).add(a.id)
        for ids in occupants.values():
            ids = sorted(ids)
            for i, x in enumerate(ids):
                for y in ids[i + 1 :]:
                    adjacency[x].add(y)
                    adjacency[y].add(x)
    else:
        shared: dict[tuple[str, str], float] = {}
        edges: dict[tuple, list[tuple[str, float]]] = {}
        for a in gm.areas:
            for poly in a.polygons:
                for ring in (poly.outer, *poly.holes):
                    for p, q in zip(ring[:-1], ring[1:]):
                        kp, kq = _vkey(p), _vkey(q)
                        if kp == kq:
                            continue
                        key = (kp, kq) if kp < kq else (kq, kp)
                        edges.setdefault(key, []).append((a.id, great_circle_deg(p, q)))
        for owners in edges.values():
            ids = sorted({aid for aid, _ in owners})
            if len(ids) < 2:
                continue
            arc = max(length for _, length in owners)
            for i, x in enumerate(ids):
                for y in ids[i + 1 :]:
                    pair = (x, y)
                    shared[pair] = shared.get(pair, 0.0) + arc
        for (x, y), total in shared.items():
            if total > min_shared_length_deg:
                adjacency[x].add(y)
                adjacency[y].add(x)

    return replace(gm, adjacency={k: frozenset(v) for k, v in adjacency.items()})


# ---------------------------------------------------------------------------
# projection


def lambert_azimuthal(center: GeoPosition, lonlat: np.ndarray) -> np.ndarray:
    """Raw Lambert azimuthal equal-area projection of (n, 2) lon/lat degrees.

    The projection center maps to the origin.  Raises AntipodalPoint for
    points (numerically) antipodal to the center, where the projection is
    undefined.
    """
    lonlat = np.asarray(lonlat, dtype=float)
    lam = np.radians(lonlat[:, 0] - center.lon)
    phi = np.radians(lonlat[:, 1])
    phi0 = math.radians(center.lat)
    denom = 1.0 + math.sin(phi0) * np.sin(phi) + math.cos(phi0) * np.cos(phi) * np.cos(lam)
    if np.any(denom < 1e-12):
        raise AntipodalPoint("point antipodal to projection center")
    k = np.sqrt(2.0 / denom)
    x = k * np.cos(phi) * np.sin(lam)
    y = k * (math.cos(phi0) * np.sin(phi) - math.sin(phi0) * np.cos(phi) * np.cos(lam))
    return np.column_stack([x, y])


def _dataset_center(gm: GeoMap) -> GeoPosition:
    lons = [p.lon for a in gm.areas for poly in a.polygons for p in poly.outer]
    lats = [p.lat for a in gm.areas for poly in a.polygons for p in poly.outer]
    return GeoPosition((min(lons) + max(lons)) / 2.0, (min(lats) + max(lats)) / 2.0)


def project(gm: GeoMap, center: GeoPosition | None = None) -> GeoMap:
    """Project all rings and centroids into the unit map quad.

    Lambert azimuthal equal-area about ``center`` (dataset bounding-box
    center by default), then a uniform scale + translation so the projected
    bounding box is centered in [0, 1] x [0, 1] with max side exactly 1.
    """
    center = center or _dataset_center(gm)
    raw: list[np.ndarray] = []
    spans: list[tuple[int, int]] = []  # (area index, ring count) bookkeeping
    for a in gm.areas:
        for poly in a.polygons:
            for ring in (poly.outer, *poly.holes):
                pts = np.array([[p.lon, p.lat] for p in ring[:-1]])
                raw.append(lambert_azimuthal(center, pts))
    stacked = np.vstack(raw)
    lo, hi = stacked.min(axis=0), stacked.max(axis=0)
    side = float(max(hi - lo))
    scale = 1.0 / side if side > 0 else 1.0
    mid = (lo + hi) / 2.0
    offset = (0.5 - scale * mid[0], 0.5 - scale * mid[1])
    fit = ProjectionFit(center=center, scale=scale, offset=offset)

    areas = []
    k = 0
    for a in gm.areas:
        planars = []
        for poly in a.polygons:
            rings = [fit.apply(raw[k + i]) for i in range(1 + len(poly.holes))]
            k += 1 + len(poly.holes)
            planars.append(PlanarPolygon(rings[0], tuple(rings[1:])))
        pc = fit.apply(lambert_azimuthal(center, np.array([[a.centroid.lon, a.centroid.lat]])))[0]
        areas.append(replace(a, planar=tuple(planars), planar_centroid=pc))
    return replace(gm, areas=tuple(areas), projection=fit)


# ---------------------------------------------------------------------------
# geodesic primitives


def _ring_solid_angle(ring: Ring) -> float:
    """Signed solid angle of a closed geodesic ring (CCW positive)."""
    units = [p.unit_vector() for p in ring[:-1]]
    v0 = units[0]
    total = 0.0
    for i in range(1, len(units) - 1):
        a, b, c = v0, units[i], units[i + 1]
        num = float(np.dot(a, np.cross(b, c)))
        den = 1.0 + float(np.dot(a, b)) + float(np.dot(b, c)) + float(np.dot(c, a))
        total += 2.0 * math.atan2(num, den)
    return total


def spherical_area(polygon: Polygon) -> float:
    """Spherical area of a polygon in steradians: outer excess minus holes."""
    outer = abs(_ring_solid_angle(polygon.outer))
    holes = sum(abs(_ring_solid_angle(h)) for h in polygon.holes)
    if outer <= 0.0:
        raise DegenerateRing("outer ring encloses no area")
    return outer - holes


def great_circle_deg(p: GeoPosition, q: GeoPosition) -> float:
    """Central angle between two positions, in degrees (0..180)."""
    u, v = p.unit_vector(), q.unit_vector()
    return math.degrees(math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v))))


# ---------------------------------------------------------------------------
# region growth


def component_of(gm: GeoMap, seed: str) -> set[str]:
    """Connected component of ``seed`` under the adjacency relation."""
    seen = {seed}
    queue = [seed]
    while queue:
        cur = queue.pop()
        for nb in gm.neighbors(cur):
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return seen


def contiguous_region(gm: GeoMap, seed: str, k: int, rng: np.random.Generator) -> set[str]:
    """Grow a connected region of exactly k areas containing ``seed``.

    Randomized frontier expansion: at each step one area is drawn uniformly
    from the current frontier.  Deterministic for a given rng state.
    """
    gm.area(seed)
    if k < 1:
        raise ComponentTooSmall("k must be >= 1")
    if len(component_of(gm, seed)) < k:
        raise ComponentTooSmall(f"component of {seed} has fewer than {k} areas")
    region = {seed}
    frontier = sorted(gm.neighbors(seed))
    while len(region) < k:
        pick = frontier.pop(int(rng.integers(len(frontier))))
        region.add(pick)
        for nb in gm.neighbors(pick):
            if nb not in region and nb not in frontier:
                insort(frontier, nb)
    return region


# ---------------------------------------------------------------------------
# triangulation


def triangulate(polygon: PlanarPolygon) -> np.ndarray:
    """Triangulate a planar polygon with holes by ear clipping.

    Returns an (m, 3) int array of indices into the polygon's vertex list
    (outer ring vertices first, then each hole's, closing duplicates
    excluded).  Covers the polygon exactly: signed triangle areas sum to
    outer area minus hole areas.
    """
    return triangulate_rings(polygon.rings())
