"""Ear-clipping triangulation for planar polygons with holes.

Holes are first bridged into the outer ring (each hole's leftmost vertex is
joined to a visible vertex by a zero-width cut traversed twice), then the
merged ring is ear-clipped.  Triangle indices refer to the original
concatenated vertex list: outer ring vertices first, then each hole's, all
rings open (no closing duplicate).

Quadratic ear search; intended for administrative boundary rings of at most
a few hundred vertices, not for huge meshes.
"""

from __future__ import annotations

import numpy as np

from .errors import SelfIntersectingRing


class _Node:
    __slots__ = ("i", "x", "y", "prev", "next")

    def __init__(self, i: int, x: float, y: float):
        self.i = i
        self.x = x
        self.y = y
        self.prev: "_Node" = self
        self.next: "_Node" = self


def _link(points: np.ndarray, start_index: int, clockwise: bool) -> _Node:
    order = range(len(points) - 1, -1, -1) if clockwise != _is_clockwise(points) else range(len(points))
    last: _Node | None = None
    first: _Node | None = None
    for k in order:
        node = _Node(start_index + k, float(points[k, 0]), float(points[k, 1]))
        if last is None:
            first = node
        else:
            last.next = node
            node.prev = last
        last = node
    assert first is not None and last is not None
    last.next = first
    first.prev = last
    return first


def _is_clockwise(points: np.ndarray) -> bool:
    x, y = points[:, 0], points[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)) < 0.0


def _cross(o: _Node, a: _Node, b: _Node) -> float:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def _point_in_triangle(px, py, a: _Node, b: _Node, c: _Node) -> bool:
    d1 = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x)
    d2 = (c.x - b.x) * (py - b.y) - (c.y - b.y) * (px - b.x)
    d3 = (a.x - c.x) * (py - c.y) - (a.y - c.y) * (px - c.x)
    return d1 >= 0 and d2 >= 0 and d3 >= 0


def _segments_properly_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


def _ring_edges(rings: list[np.ndarray]):
    for ring in rings:
        n = len(ring)
        for k in range(n):
            yield tuple(ring[k]), tuple(ring[(k + 1) % n])


def _point_in_rings(px, py, rings: list[np.ndarray]) -> bool:
    # crossing-number test against outer ring minus holes
    inside = False
    for a, b in _ring_edges(rings[:1]):
        if (a[1] > py) != (b[1] > py):
            xin = a[0] + (py - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
            if px < xin:
                inside = not inside
    if not inside:
        return False
    for hole in rings[1:]:
        hin = False
        for a, b in _ring_edges([hole]):
            if (a[1] > py) != (b[1] > py):
                xin = a[0] + (py - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
                if px < xin:
                    hin = not hin
        if hin:
            return False
    return True


def _bridge(outer_first: _Node, hole_first: _Node, rings: list[np.ndarray]) -> _Node:
    """Splice a hole ring into the outer ring via a mutually visible pair."""
    # leftmost hole vertex
    h = hole_first
    node = hole_first.next
    while node is not hole_first:
        if (node.x, node.y) < (h.x, h.y):
            h = node
        node = node.next

    candidates = []
    node = outer_first
    while True:
        candidates.append(node)
        node = node.next
        if node is outer_first:
            break
    candidates.sort(key=lambda o: ((o.x - h.x) ** 2 + (o.y - h.y) ** 2, o.i))

    for o in candidates:
        if o.x == h.x and o.y == h.y:
            visible = True
        else:
            seg = ((h.x, h.y), (o.x, o.y))
            visible = True
            for a, b in _ring_edges(rings):
                if (a == seg[0] or b == seg[0] or a == seg[1] or b == seg[1]):
                    continue
                if _segments_properly_intersect(seg[0], seg[1], a, b):
                    visible = False
                    break
            if visible:
                mid = ((h.x + o.x) / 2.0, (h.y + o.y) / 2.0)
                visible = _point_in_rings(mid[0], mid[1], rings)
        if visible:
            o2 = _Node(o.i, o.x, o.y)
            h2 = _Node(h.i, h.x, h.y)
            on, hp = o.next, h.prev
            o.next = h
            h.prev = o
            hp.next = h2
            h2.prev = hp
            h2.next = o2
            o2.prev = h2
            o2.next = on
            on.prev = o2
            return outer_first
    raise SelfIntersectingRing("no visible bridge vertex for hole")


def triangulate_rings(rings: list[np.ndarray]) -> np.ndarray:
    """Triangulate outer ring (CCW) with holes (CW); returns (m, 3) indices."""
    rings = [np.asarray(r, dtype=float) for r in rings]
    outer = _link(rings[0], 0, clockwise=False)
    offset = len(rings[0])
    holes = []
    for hole in rings[1:]:
        holes.append(_link(hole, offset, clockwise=True))
        offset += len(hole)
    # process holes left to right so bridges never cross each other
    for hole_first in sorted(holes, key=lambda n: min((m.x, m.y) for m in _iter_ring(n))):
        outer = _bridge(outer, hole_first, rings)

    total = sum(len(r) for r in rings) + 2 * len(rings[1:])
    triangles: list[tuple[int, int, int]] = []
    ear = outer
    since_cut = 0
    eps = 0.0
    while ear.next.next is not ear:
        prev, nxt = ear.prev, ear.next
        if _is_ear(ear, eps):
            triangles.append((prev.i, ear.i, nxt.i))
            prev.next = nxt
            nxt.prev = prev
            ear = nxt
            since_cut = 0
            continue
        ear = nxt
        since_cut += 1
        if since_cut > total:
            if eps == 0.0:
                # second pass tolerates degenerate (collinear) ears
                eps = 1e-12
                since_cut = 0
            else:
                raise SelfIntersectingRing("ear clipping stalled; ring is not simple")
    return np.asarray(triangles, dtype=np.int32)


def _iter_ring(first: _Node):
    node = first
    while True:
        yield node
        node = node.next
        if node is first:
            break


def _is_ear(ear: _Node, eps: float) -> bool:
    a, b, c = ear.prev, ear, ear.next
    area2 = _cross(a, b, c)
    if eps == 0.0:
        if area2 <= 0.0:  # strict pass: convex corners only
            return False
    elif area2 < -eps:  # relaxed pass additionally admits collinear ears
        return False
    if area2 == 0.0:
        return True  # zero-area ear, nothing can hide inside it
    node = c.next
    while node is not a:
        corner = (node.x, node.y) in ((a.x, a.y), (b.x, b.y), (c.x, c.y))
        if not corner and _point_in_triangle(node.x, node.y, a, b, c):
            return False
        node = node.next
    return True
