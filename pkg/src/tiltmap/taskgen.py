"""Study-task generation with the distance, heterogeneity and answer controls.

Two task kinds are produced, each over a freshly synthesized layer:

* area comparison: estimate the numeric difference between two marked areas,
  with the pair's great-circle separation constrained to a ``close`` or
  ``far`` band of the dataset profile;
* region: estimate the area-weighted average over a connected region of
  profile-sized extent, with the member values' coefficient of variation
  held inside 40-60%.

Ground-truth answers are steered into one of three bands (20-40, 40-60,
60-80); every emitted task re-validates under independent recomputation.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, replace

import numpy as np

from .errors import GenerationExhausted, NonPositiveMean, OutOfRange, UnknownArea
from .geodata import GeoMap, contiguous_region, great_circle_deg
from .synthdata import ContiguityWeights, SynthConfig, synthesize
from .thematic import ThematicLayer

ANSWER_RANGES = ((20.0, 40.0), (40.0, 60.0), (60.0, 80.0))
CV_RANGE = (0.40, 0.60)


@dataclass(frozen=True)
class DatasetProfile:
    """Per-dataset task constraints.

    region_size is an inclusive (lo, hi) range; comparison distance bands
    are in degrees of great-circle separation and may be absent for
    datasets that only run region tasks.
    """

    name: str
    region_size: tuple[int, int]
    close_max_deg: float | None
    far_range_deg: tuple[float, float] | None

    def __post_init__(self):
        if self.close_max_deg is not None and self.far_range_deg is not None:
            if not self.close_max_deg < self.far_range_deg[0]:
                raise OutOfRange("close threshold must sit below the far band")


PROFILES = {
    "US": DatasetProfile("US", (5, 5), 3.0, (25.0, 28.0)),
    "UK": DatasetProfile("UK", (15, 20), 0.5, (5.0, 5.5)),
    "EU": DatasetProfile("EU", (10, 10), None, None),
}


@dataclass(frozen=True)
class GenConfig:
    attempt_budget: int = 10_000
    resynth_every: int = 50


@dataclass(frozen=True)
class TaskSpec:
    kind: str  # "areaComparison" | "region"
    targets: tuple[str, ...]
    answer: float
    answer_range: tuple[float, float]
    layer_ref: str = ""
    seed: int | None = None
    distance_deg: float | None = None
    distance_class: str | None = None
    cv: float | None = None

    def to_dict(self) -> dict:
        rec = {
            "kind": self.kind,
            "targets": list(self.targets),
            "answer": self.answer,
            "answerRange": list(self.answer_range),
            "layerfile": self.layer_ref,
            "seed": self.seed,
        }
        if self.kind == "areaComparison":
            rec["distanceDeg"] = self.distance_deg
            rec["distanceClass"] = self.distance_class
        else:
            rec["cv"] = self.cv
        return rec

    @classmethod
    def from_dict(cls, rec: dict) -> "TaskSpec":
        return cls(
            kind=rec["kind"],
            targets=tuple(rec["targets"]),
            answer=float(rec["answer"]),
            answer_range=(float(rec["answerRange"][0]), float(rec["answerRange"][1])),
            layer_ref=rec.get("layerfile", ""),
            seed=rec.get("seed"),
            distance_deg=rec.get("distanceDeg"),
            distance_class=rec.get("distanceClass"),
            cv=rec.get("cv"),
        )


def cv(values) -> float:
    """Coefficient of variation: population standard deviation over mean."""
    x = np.asarray(list(values), dtype=float)
    if len(x) < 2:
        raise NonPositiveMean("need at least two values")
    mean = float(x.mean())
    if mean <= 0:
        raise NonPositiveMean(f"mean must be positive, got {mean}")
    return float(x.std()) / mean


def region_answer(gm: GeoMap, layer: ThematicLayer, ids) -> float:
    """Area-weighted average of display values over the region, using
    spherical surface areas as weights."""
    ids = list(ids)
    if not ids:
        raise UnknownArea("region is empty")
    surfaces = np.array([gm.area(i).surface for i in ids])
    try:
        values = np.array([layer.values[i] for i in ids])
    except KeyError as exc:
        raise UnknownArea(f"layer missing area {exc.args[0]!r}") from exc
    return float(surfaces @ values / surfaces.sum())


def abs_diff(participant_answer: int, truth: float) -> float:
    """Absolute error of an integer slider answer against the ground truth."""
    if participant_answer != int(participant_answer) or not 0 <= participant_answer <= 100:
        raise OutOfRange(f"answer must be an integer in [0, 100]: {participant_answer}")
    return abs(float(participant_answer) - truth)


# ---------------------------------------------------------------------------
# generation

_PAIR_CACHE: "weakref.WeakKeyDictionary[GeoMap, dict[tuple[str, str], list]]" = weakref.WeakKeyDictionary()


def _eligible_pairs(gm: GeoMap, profile: DatasetProfile, target_class: str) -> list[tuple[str, str, float]]:
    """Centroid pairs whose separation falls in the requested distance band.

    Pairs strictly between the close and far bands are never eligible.
    Distances depend only on the map, so the scan is cached per map.
    """
    if target_class not in ("close", "far"):
        raise OutOfRange(f"distance class must be close or far: {target_class}")
    if profile.close_max_deg is None or profile.far_range_deg is None:
        raise GenerationExhausted(f"profile {profile.name} defines no comparison distance bands")
    per_map = _PAIR_CACHE.setdefault(gm, {})
    key = (profile.name, target_class)
    if key in per_map:
        return per_map[key]
    areas = sorted(gm.areas, key=lambda a: a.id)
    pairs = []
    for i, a in enumerate(areas):
        for b in areas[i + 1 :]:
            d = great_circle_deg(a.centroid, b.centroid)
            if target_class == "close" and d < profile.close_max_deg:
                pairs.append((a.id, b.id, d))
            elif target_class == "far" and profile.far_range_deg[0] <= d <= profile.far_range_deg[1]:
                pairs.append((a.id, b.id, d))
    per_map[key] = pairs
    return pairs


def gen_area_comparison(
    gm: GeoMap,
    profile: DatasetProfile,
    target_range: tuple[float, float],
    target_class: str,
    reference: ThematicLayer,
    weights: ContiguityWeights,
    config: SynthConfig,
    rng: np.random.Generator,
    gen_config: GenConfig = GenConfig(),
) -> tuple[ThematicLayer, TaskSpec]:
    """Rejection-sample a comparison task on a freshly synthesized layer."""
    pairs = _eligible_pairs(gm, profile, target_class)
    if not pairs:
        raise GenerationExhausted(f"no centroid pairs in the {target_class} band for {profile.name}")
    layer, _ = synthesize(gm, reference, weights, config, rng)
    for attempt in range(1, gen_config.attempt_budget + 1):
        if attempt % gen_config.resynth_every == 0:
            layer, _ = synthesize(gm, reference, weights, config, rng)
        a, b, d = pairs[int(rng.integers(len(pairs)))]
        answer = abs(layer.values[a] - layer.values[b])
        if target_range[0] <= answer <= target_range[1]:
            spec = TaskSpec(
                kind="areaComparison",
                targets=(a, b),
                answer=answer,
                answer_range=target_range,
                distance_deg=d,
                distance_class=target_class,
            )
            return layer, spec
    raise GenerationExhausted(
        f"no {target_class} pair with |difference| in {target_range} after {gen_config.attempt_budget} draws"
    )


def gen_region(
    gm: GeoMap,
    profile: DatasetProfile,
    target_range: tuple[float, float],
    reference: ThematicLayer,
    weights: ContiguityWeights,
    config: SynthConfig,
    rng: np.random.Generator,
    gen_config: GenConfig = GenConfig(),
) -> tuple[ThematicLayer, TaskSpec]:
    """Rejection-sample a region task (connected, CV-banded, answer-banded)."""
    ids = sorted(gm.ids())
    lo, hi = profile.region_size
    layer, _ = synthesize(gm, reference, weights, config, rng)
    for attempt in range(1, gen_config.attempt_budget + 1):
        if attempt % gen_config.resynth_every == 0:
            layer, _ = synthesize(gm, reference, weights, config, rng)
        seed_area = ids[int(rng.integers(len(ids)))]
        k = int(rng.integers(lo, hi + 1))
        try:
            region = contiguous_region(gm, seed_area, k, rng)
        except Exception:
            continue
        region_values = [layer.values[i] for i in region]
        try:
            variation = cv(region_values)
        except NonPositiveMean:
            continue
        if not CV_RANGE[0] <= variation <= CV_RANGE[1]:
            continue
        answer = region_answer(gm, layer, region)
        if target_range[0] <= answer <= target_range[1]:
            spec = TaskSpec(
                kind="region",
                targets=tuple(sorted(region)),
                answer=answer,
                answer_range=target_range,
                cv=variation,
            )
            return layer, spec
    raise GenerationExhausted(
        f"no region of {lo}-{hi} areas with CV in {CV_RANGE} and answer in {target_range} "
        f"after {gen_config.attempt_budget} draws"
    )


def generate_batch(
    gm: GeoMap,
    profile: DatasetProfile,
    reference: ThematicLayer,
    weights: ContiguityWeights,
    synth_config: SynthConfig,
    region_count: int = 0,
    comparison_count: int = 0,
    master_seed: int = 0,
    gen_config: GenConfig = GenConfig(),
) -> list[tuple[ThematicLayer, TaskSpec]]:
    """Generate a batch of tasks, cycling answer ranges round-robin (and
    close/far classes for comparisons).  Each task runs on its own rng
    derived from (master_seed, task index), so batches are reproducible and
    individual tasks can be regenerated in isolation.
    """
    out = []
    index = 0
    for _ in range(region_count):
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, index]))
        target = ANSWER_RANGES[index % len(ANSWER_RANGES)]
        layer, spec = gen_region(gm, profile, target, reference, weights, synth_config, rng, gen_config)
        out.append((layer, replace(spec, seed=index)))
        index += 1
    for j in range(comparison_count):
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, index]))
        target = ANSWER_RANGES[index % len(ANSWER_RANGES)]
        klass = "close" if j % 2 == 0 else "far"
        layer, spec = gen_area_comparison(
            gm, profile, target, klass, reference, weights, synth_config, rng, gen_config
        )
        out.append((layer, replace(spec, seed=index)))
        index += 1
    return out
