"""Tilt-driven morphing geovisualization.

An orientation-controlled continuous morph between a 2D choropleth map, a
3D prism map and a 2D bar chart, plus the supporting pipeline: boundary
ingestion and projection, thematic encoding, spatial-autocorrelation-
preserving data synthesis, study-task generation, interaction state
machines and trace analytics.
"""

from .geodata import (
    Area,
    GeoMap,
    GeoPosition,
    Polygon,
    build_adjacency,
    contiguous_region,
    great_circle_deg,
    parse_boundaries,
    project,
    spherical_area,
    triangulate,
)
from .morph import (
    DEFAULT_SCHEDULE,
    MorphScene,
    PhaseSchedule,
    TiltState,
    bar_layout,
    bar_order,
    continuity_check,
    phase_of,
    prism_height_factor,
    scene,
    tilt_to,
)
from .session import (
    GrabState,
    Pose,
    SessionLog,
    TraceSample,
    analyze,
    classify_movement,
    grab_update,
    initial_pose,
    side_by_side_layout,
    tilt_angle,
    toggle_step,
)
from .synthdata import ContiguityWeights, SynthConfig, morans_i, synthesize
from .taskgen import (
    PROFILES,
    DatasetProfile,
    TaskSpec,
    abs_diff,
    cv,
    gen_area_comparison,
    gen_region,
    region_answer,
)
from .thematic import (
    Style,
    ThematicLayer,
    ValueTransform,
    color_of,
    height_of,
    legend_spec,
    transform_and_normalize,
)

__version__ = "0.1.0"
