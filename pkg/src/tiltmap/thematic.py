"""Thematic encoding: value transforms, the color ramp and the height scale.

Raw attribute values (typically skewed, like population density) are tamed
with a root transform and min-max normalized into the 0-100 display domain.
Display values map to color through the 9-anchor YlOrBr sequential ramp
(lightest at 0, darkest at 100) and to extrusion height linearly over
0-0.20 m, with legend ticks every 5 units and labels at 0/25/50/75/100.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConstantField, NegativeValue, OutOfRange

MAX_HEIGHT_M = 0.20

# ColorBrewer YlOrBr, 9 classes, light to dark.
YLORBR_ANCHORS = (
    (0xFF, 0xFF, 0xE5),
    (0xFF, 0xF7, 0xBC),
    (0xFE, 0xE3, 0x91),
    (0xFE, 0xC4, 0x4F),
    (0xFE, 0x99, 0x29),
    (0xEC, 0x70, 0x14),
    (0xCC, 0x4C, 0x02),
    (0x99, 0x34, 0x04),
    (0x66, 0x25, 0x06),
)

# Uniform fill for the monochrome prism style: the 60%-position ramp color.
MONOCHROME_DISPLAY_VALUE = 60.0


class ValueTransform(enum.Enum):
    NONE = "none"
    SQUARE_ROOT = "squareRoot"
    FOURTH_ROOT = "fourthRoot"

    def apply(self, x: float) -> float:
        if x < 0:
            raise NegativeValue(f"transform input must be non-negative, got {x}")
        if self is ValueTransform.SQUARE_ROOT:
            return math.sqrt(x)
        if self is ValueTransform.FOURTH_ROOT:
            return x ** 0.25
        return x


class Style(enum.Enum):
    CHOROPLETH = "choropleth"
    MONOCHROME_PRISM = "monochromePrism"
    COLORED_PRISM = "coloredPrism"
    TILT_MAP = "tiltMap"


@dataclass(frozen=True)
class ThematicLayer:
    """Per-area display values in [0, 100] plus transform provenance."""

    values: dict[str, float]
    transform: ValueTransform
    source_min: float
    source_max: float

    def __post_init__(self):
        for k, v in self.values.items():
            if not 0.0 <= v <= 100.0:
                raise OutOfRange(f"display value for {k} outside [0, 100]: {v}")

    def to_layerfile(self) -> dict:
        return {
            "transform": self.transform.value,
            "values": dict(sorted(self.values.items())),
            "sourceMin": self.source_min,
            "sourceMax": self.source_max,
        }

    @classmethod
    def from_layerfile(cls, doc: dict) -> "ThematicLayer":
        return cls(
            values={str(k): float(v) for k, v in doc["values"].items()},
            transform=ValueTransform(doc["transform"]),
            source_min=float(doc["sourceMin"]),
            source_max=float(doc["sourceMax"]),
        )


def transform_and_normalize(raw: dict[str, float], transform: ValueTransform) -> ThematicLayer:
    """Apply the transform, then min-max scale onto [0, 100] (full range)."""
    if len(raw) < 2:
        raise ConstantField("need at least two raw values")
    for k, v in raw.items():
        if v < 0:
            raise NegativeValue(f"raw value for {k} is negative: {v}")
    transformed = {k: transform.apply(v) for k, v in raw.items()}
    lo, hi = min(transformed.values()), max(transformed.values())
    if hi == lo:
        raise ConstantField("all raw values are equal after transform")
    # divide first: the ratio is exactly <= 1.0, so the maximum lands on 100.0
    values = {k: 100.0 * ((v - lo) / (hi - lo)) for k, v in transformed.items()}
    return ThematicLayer(values=values, transform=transform, source_min=min(raw.values()), source_max=max(raw.values()))


def color_of(display: float) -> tuple[float, float, float]:
    """Piecewise-linear YlOrBr ramp color for a display value.

    Interpolates component-wise in sRGB between the 9 anchors; returns an
    (r, g, b) triple of floats in [0, 1].
    """
    if not 0.0 <= display <= 100.0:
        raise OutOfRange(f"display value outside [0, 100]: {display}")
    pos = display / 100.0 * (len(YLORBR_ANCHORS) - 1)
    i = min(int(pos), len(YLORBR_ANCHORS) - 2)
    t = pos - i
    a, b = YLORBR_ANCHORS[i], YLORBR_ANCHORS[i + 1]
    return tuple((ca + t * (cb - ca)) / 255.0 for ca, cb in zip(a, b))


def monochrome_color() -> tuple[float, float, float]:
    return color_of(MONOCHROME_DISPLAY_VALUE)


def height_of(display: float) -> float:
    """Extrusion height in meters: linear, 0 at display 0, 0.20 at 100."""
    if not 0.0 <= display <= 100.0:
        raise OutOfRange(f"display value outside [0, 100]: {display}")
    return MAX_HEIGHT_M * display / 100.0


@dataclass(frozen=True)
class LegendSpec:
    domain: tuple[float, float]
    ticks: tuple[int, ...]
    labeled: tuple[int, ...]


def legend_spec() -> LegendSpec:
    """Tick model shared by color legends and height axes."""
    return LegendSpec(domain=(0.0, 100.0), ticks=tuple(range(0, 101, 5)), labeled=(0, 25, 50, 75, 100))
