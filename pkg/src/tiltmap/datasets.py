"""Synthetic boundary files and reference fields for demos and tests.

Real administrative boundary files cannot be bundled here, so these
generators produce GeoJSON FeatureCollections that stand in for them:
Voronoi tessellations over each dataset's true geographic extent with the
study cardinalities (48 conterminous US states, 391 UK districts, 116
first-level EU areas).  The US version seeds cells at approximate state
centroids, with the four corner states arranged symmetrically so that the
Four Corners point contact is reproduced exactly (Arizona and Colorado
touch at a single point).

Also provides a deterministic "population density"-like reference field
(smooth hubs plus multiplicative noise, heavily right-skewed) for layer
synthesis.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import Voronoi

from .geodata import GeoMap
from .thematic import ValueTransform

US_BOUNDS = (-124.7, 25.1, -66.9, 49.4)  # lon_min, lat_min, lon_max, lat_max
UK_BOUNDS = (-7.6, 49.9, 1.8, 60.8)
EU_BOUNDS = (-10.0, 36.0, 34.0, 70.0)

_FOUR_CORNERS = (-109.045, 36.999)
_FC_SPACING = 1.8

# Approximate conterminous state centroids (lon, lat); AZ/NM/UT/CO are
# replaced by an exact symmetric arrangement around the Four Corners point.
_US_STATES = [
    ("AL", "Alabama", -86.8, 32.8),
    ("AR", "Arkansas", -92.4, 34.8),
    ("AZ", "Arizona", _FOUR_CORNERS[0] - _FC_SPACING, _FOUR_CORNERS[1] - _FC_SPACING),
    ("CA", "California", -119.3, 37.2),
    ("CO", "Colorado", _FOUR_CORNERS[0] + _FC_SPACING, _FOUR_CORNERS[1] + _FC_SPACING),
    ("CT", "Connecticut", -72.7, 41.6),
    ("DE", "Delaware", -75.5, 39.0),
    ("FL", "Florida", -82.4, 28.6),
    ("GA", "Georgia", -83.4, 32.6),
    ("IA", "Iowa", -93.5, 42.0),
    ("ID", "Idaho", -114.6, 44.4),
    ("IL", "Illinois", -89.2, 40.0),
    ("IN", "Indiana", -86.3, 39.9),
    ("KS", "Kansas", -98.4, 38.5),
    ("KY", "Kentucky", -85.3, 37.5),
    ("LA", "Louisiana", -92.0, 31.1),
    ("MA", "Massachusetts", -71.8, 42.3),
    ("MD", "Maryland", -76.8, 39.0),
    ("ME", "Maine", -69.2, 45.4),
    ("MI", "Michigan", -85.4, 44.3),
    ("MN", "Minnesota", -94.3, 46.3),
    ("MO", "Missouri", -92.5, 38.4),
    ("MS", "Mississippi", -89.7, 32.7),
    ("MT", "Montana", -109.6, 47.0),
    ("NC", "North Carolina", -79.4, 35.5),
    ("ND", "North Dakota", -100.5, 47.4),
    ("NE", "Nebraska", -99.8, 41.5),
    ("NH", "New Hampshire", -71.6, 43.7),
    ("NJ", "New Jersey", -74.7, 40.2),
    ("NM", "New Mexico", _FOUR_CORNERS[0] + _FC_SPACING, _FOUR_CORNERS[1] - _FC_SPACING),
    ("NV", "Nevada", -116.6, 39.3),
    ("NY", "New York", -75.5, 43.0),
    ("OH", "Ohio", -82.8, 40.3),
    ("OK", "Oklahoma", -97.5, 35.6),
    ("OR", "Oregon", -120.6, 43.9),
    ("PA", "Pennsylvania", -77.8, 40.9),
    ("RI", "Rhode Island", -71.6, 41.7),
    ("SC", "South Carolina", -80.9, 33.9),
    ("SD", "South Dakota", -100.2, 44.4),
    ("TN", "Tennessee", -86.4, 35.9),
    ("TX", "Texas", -99.3, 31.5),
    ("UT", "Utah", _FOUR_CORNERS[0] - _FC_SPACING, _FOUR_CORNERS[1] + _FC_SPACING),
    ("VA", "Virginia", -78.9, 37.5),
    ("VT", "Vermont", -72.7, 44.1),
    ("WA", "Washington", -120.4, 47.4),
    ("WI", "Wisconsin", -89.7, 44.6),
    ("WV", "West Virginia", -80.6, 38.6),
    ("WY", "Wyoming", -107.6, 43.0),
]


def _voronoi_cells(points: np.ndarray, bounds) -> list[np.ndarray]:
    """Voronoi cells of the points, clipped exactly to the bounding box.

    Reflecting the point set across each box edge makes every original
    point's region finite and tiles the box exactly; neighboring cells share
    vertex coordinates bit-for-bit, which downstream adjacency keying relies
    on.  Cells are returned as open CCW rings.
    """
    x0, y0, x1, y1 = bounds
    refl = np.vstack(
        [
            points,
            np.column_stack([2 * x0 - points[:, 0], points[:, 1]]),
            np.column_stack([2 * x1 - points[:, 0], points[:, 1]]),
            np.column_stack([points[:, 0], 2 * y0 - points[:, 1]]),
            np.column_stack([points[:, 0], 2 * y1 - points[:, 1]]),
        ]
    )
    vor = Voronoi(refl)
    cells = []
    for i in range(len(points)):
        region = vor.regions[vor.point_region[i]]
        verts = vor.vertices[region]
        ang = np.arctan2(verts[:, 1] - points[i, 1], verts[:, 0] - points[i, 0])
        cells.append(verts[np.argsort(ang)])
    return cells


def _feature(area_id: str, name: str, ring: np.ndarray) -> dict:
    coords = [[float(x), float(y)] for x, y in ring] + [[float(ring[0, 0]), float(ring[0, 1])]]
    return {
        "type": "Feature",
        "properties": {"id": area_id, "name": name},
        "geometry": {"type": "Polygon", "coordinates": [coords]},
    }


def _collection(features: list[dict]) -> dict:
    return {"type": "FeatureCollection", "features": features}


def _lloyd(points: np.ndarray, bounds, iterations: int) -> np.ndarray:
    for _ in range(iterations):
        cells = _voronoi_cells(points, bounds)
        points = np.array([c.mean(axis=0) for c in cells])
    return points


def _random_tessellation(n: int, bounds, seed: int, prefix: str, name_fmt: str) -> dict:
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = bounds
    points = np.column_stack(
        [rng.uniform(x0 + 0.02, x1 - 0.02, n), rng.uniform(y0 + 0.02, y1 - 0.02, n)]
    )
    points = _lloyd(points, bounds, 2)
    cells = _voronoi_cells(points, bounds)
    features = [
        _feature(f"{prefix}{i + 1:03d}", name_fmt.format(i + 1), cell) for i, cell in enumerate(cells)
    ]
    return _collection(features)


def synthetic_us48() -> dict:
    """48 cells seeded at approximate conterminous state centroids."""
    points = np.array([[lon, lat] for _, _, lon, lat in _US_STATES])
    cells = _voronoi_cells(points, US_BOUNDS)
    features = [
        _feature(code, name, cell) for (code, name, _, _), cell in zip(_US_STATES, cells)
    ]
    return _collection(features)


def synthetic_uk391(seed: int = 20391) -> dict:
    """391 district-sized cells over the UK extent."""
    return _random_tessellation(391, UK_BOUNDS, seed, "LAD", "District {:03d}")


def synthetic_eu116(seed: int = 20116) -> dict:
    """116 first-level areas over the European extent."""
    return _random_tessellation(116, EU_BOUNDS, seed, "EU", "Region {:03d}")


def reference_density(
    gm: GeoMap,
    transform: ValueTransform = ValueTransform.SQUARE_ROOT,
    seed: int = 7,
) -> dict[str, float]:
    """A density-like raw field over the map's areas.

    The spatial arrangement comes from a few population hubs over the
    projected plane plus strong lognormal noise (global Moran's I lands
    around 0.3-0.5, like transformed census density).  Magnitudes are then
    rank-remapped onto the inverse image of a uniform 0-100 ladder under
    ``transform``, so that transform_and_normalize spreads the display
    values evenly over the whole range; this keeps every generator answer
    band reachable on synthesized layers.
    """
    if gm.projection is None:
        raise ValueError("project the map before sampling a reference field")
    rng = np.random.default_rng(seed)
    hubs = rng.uniform(0.1, 0.9, size=(6, 2))
    strengths = rng.uniform(100.0, 2000.0, size=6)
    widths = rng.uniform(0.04, 0.12, size=6)
    score = {}
    for area in gm.areas:
        c = area.planar_centroid
        density = 1.0
        for hub, strength, width in zip(hubs, strengths, widths):
            d2 = float(np.sum((c - hub) ** 2))
            density += strength * np.exp(-d2 / (2 * width * width))
        density *= float(rng.lognormal(mean=0.0, sigma=1.5))
        score[area.id] = density
    ranked = sorted(score, key=score.get)
    n = len(ranked)
    inverse = {
        ValueTransform.NONE: lambda d: d,
        ValueTransform.SQUARE_ROOT: lambda d: d * d,
        ValueTransform.FOURTH_ROOT: lambda d: d ** 4,
    }[transform]
    return {aid: inverse(i / (n - 1)) * 4000.0 for i, aid in enumerate(ranked)}
