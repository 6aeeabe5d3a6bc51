import numpy as np
import pytest

from tiltmap import errors, geodata, synthdata, taskgen, thematic
from tiltmap.synthdata import ContiguityWeights, SynthConfig
from tiltmap.taskgen import ANSWER_RANGES, CV_RANGE, PROFILES
from tiltmap.thematic import ThematicLayer, ValueTransform


# ---------------------------------------------------------------------------
# cv


def test_cv_constant_is_zero():
    assert taskgen.cv([10.0, 10.0, 10.0]) == 0.0


def test_cv_hand_example():
    assert taskgen.cv([2, 4, 4, 4, 5, 5, 7, 9]) == pytest.approx(0.4, abs=1e-15)


def test_cv_scale_invariant():
    values = [3.0, 8.0, 2.0, 14.0]
    for k in (0.5, 2.0, 17.0):
        assert taskgen.cv([v * k for v in values]) == pytest.approx(taskgen.cv(values), abs=1e-12)


def test_cv_errors():
    with pytest.raises(errors.NonPositiveMean):
        taskgen.cv([5.0])
    with pytest.raises(errors.NonPositiveMean):
        taskgen.cv([-2.0, 2.0])


# ---------------------------------------------------------------------------
# region answer


def synthetic_map_with_surfaces(surfaces):
    ring = tuple(
        geodata.GeoPosition(lon, lat) for lon, lat in [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
    )
    areas = tuple(
        geodata.Area(
            id=f"a{i}",
            name=f"a{i}",
            polygons=(geodata.Polygon(ring),),
            centroid=geodata.GeoPosition(0.5, 0.5),
            surface=s,
        )
        for i, s in enumerate(surfaces)
    )
    return geodata.GeoMap(areas=areas)


def test_region_answer_single_area():
    gm = synthetic_map_with_surfaces([2.0])
    layer = ThematicLayer(values={"a0": 63.0}, transform=ValueTransform.NONE, source_min=0, source_max=1)
    assert taskgen.region_answer(gm, layer, ["a0"]) == 63.0


def test_region_answer_forced_weighted_mean():
    gm = synthetic_map_with_surfaces([1.0, 3.0])
    layer = ThematicLayer(
        values={"a0": 40.0, "a1": 80.0}, transform=ValueTransform.NONE, source_min=0, source_max=1
    )
    assert taskgen.region_answer(gm, layer, ["a0", "a1"]) == pytest.approx(70.0, abs=1e-12)


def test_region_answer_matches_brute_force(us_map, us_reference):
    rng = np.random.default_rng(2)
    ids = sorted(us_map.ids())
    for _ in range(25):
        region = geodata.contiguous_region(us_map, ids[int(rng.integers(len(ids)))], 5, rng)
        got = taskgen.region_answer(us_map, us_reference, region)
        num = sum(us_map.area(i).surface * us_reference.values[i] for i in region)
        den = sum(us_map.area(i).surface for i in region)
        assert got == pytest.approx(num / den, rel=1e-12)


def test_region_answer_unknown_area(us_map, us_reference):
    with pytest.raises(errors.UnknownArea):
        taskgen.region_answer(us_map, us_reference, ["nope"])
    with pytest.raises(errors.UnknownArea):
        taskgen.region_answer(us_map, us_reference, [])


# ---------------------------------------------------------------------------
# abs_diff


@pytest.mark.parametrize("answer,truth,want", [(70, 70.0, 0.0), (60, 70.0, 10.0), (0, 100.0, 100.0)])
def test_abs_diff(answer, truth, want):
    assert taskgen.abs_diff(answer, truth) == want


def test_abs_diff_rejects_out_of_range():
    with pytest.raises(errors.OutOfRange):
        taskgen.abs_diff(101, 50.0)
    with pytest.raises(errors.OutOfRange):
        taskgen.abs_diff(-1, 50.0)


# ---------------------------------------------------------------------------
# generators


def test_gen_area_comparison_close(us_map, us_reference, us_weights):
    rng = np.random.default_rng(0)
    layer, spec = taskgen.gen_area_comparison(
        us_map, PROFILES["US"], (20.0, 40.0), "close", us_reference, us_weights, SynthConfig(rng_seed=0), rng
    )
    a, b = spec.targets
    d = geodata.great_circle_deg(us_map.area(a).centroid, us_map.area(b).centroid)
    assert d < 3.0
    assert d == pytest.approx(spec.distance_deg, abs=1e-12)
    # recomputation oracle
    assert abs(layer.values[a] - layer.values[b]) == pytest.approx(spec.answer, abs=1e-12)
    assert 20.0 <= spec.answer <= 40.0


def test_gen_area_comparison_far(us_map, us_reference, us_weights):
    rng = np.random.default_rng(1)
    layer, spec = taskgen.gen_area_comparison(
        us_map, PROFILES["US"], (40.0, 60.0), "far", us_reference, us_weights, SynthConfig(rng_seed=0), rng
    )
    assert 25.0 <= spec.distance_deg <= 28.0
    assert 40.0 <= spec.answer <= 60.0


def test_gen_area_comparison_eu_unsupported(eu_map, eu_reference):
    weights = ContiguityWeights.from_map(eu_map)
    with pytest.raises(errors.GenerationExhausted):
        taskgen.gen_area_comparison(
            eu_map,
            PROFILES["EU"],
            (20.0, 40.0),
            "close",
            eu_reference,
            weights,
            SynthConfig(rng_seed=0),
            np.random.default_rng(0),
        )


def test_gen_region_us(us_map, us_reference, us_weights):
    rng = np.random.default_rng(3)
    layer, spec = taskgen.gen_region(
        us_map, PROFILES["US"], (40.0, 60.0), us_reference, us_weights, SynthConfig(rng_seed=0), rng
    )
    assert len(spec.targets) == 5
    assert 40.0 <= spec.answer <= 60.0
    # independent revalidation: connectivity, CV and the weighted answer
    region = set(spec.targets)
    seen = {spec.targets[0]}
    queue = [spec.targets[0]]
    while queue:
        cur = queue.pop()
        for nb in us_map.neighbors(cur):
            if nb in region and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    assert seen == region
    values = [layer.values[i] for i in spec.targets]
    assert CV_RANGE[0] <= taskgen.cv(values) <= CV_RANGE[1]
    assert taskgen.region_answer(us_map, layer, spec.targets) == pytest.approx(spec.answer, abs=1e-12)


def test_gen_region_eu_size(eu_map, eu_reference):
    weights = ContiguityWeights.from_map(eu_map)
    rng = np.random.default_rng(4)
    _, spec = taskgen.gen_region(
        eu_map, PROFILES["EU"], (40.0, 60.0), eu_reference, weights, SynthConfig(rng_seed=0), rng
    )
    assert len(spec.targets) == 10


def test_generate_batch_round_robin(us_map, us_reference, us_weights):
    batch = taskgen.generate_batch(
        us_map,
        PROFILES["US"],
        us_reference,
        us_weights,
        SynthConfig(rng_seed=0),
        region_count=3,
        comparison_count=2,
        master_seed=11,
    )
    assert len(batch) == 5
    ranges = [spec.answer_range for _, spec in batch[:3]]
    assert ranges == list(ANSWER_RANGES)
    classes = [spec.distance_class for _, spec in batch[3:]]
    assert classes == ["close", "far"]
    # determinism: the same master seed reproduces the same specs
    again = taskgen.generate_batch(
        us_map,
        PROFILES["US"],
        us_reference,
        us_weights,
        SynthConfig(rng_seed=0),
        region_count=3,
        comparison_count=2,
        master_seed=11,
    )
    assert [s.to_dict() for _, s in again] == [s.to_dict() for _, s in batch]


def test_taskfile_round_trip(us_map, us_reference, us_weights):
    rng = np.random.default_rng(5)
    _, spec = taskgen.gen_region(
        us_map, PROFILES["US"], (20.0, 40.0), us_reference, us_weights, SynthConfig(rng_seed=0), rng
    )
    rec = spec.to_dict()
    assert rec["kind"] == "region"
    assert set(rec) >= {"kind", "targets", "answer", "answerRange", "layerfile", "seed", "cv"}
    assert taskgen.TaskSpec.from_dict(rec) == spec


def test_profiles_match_study_constants():
    assert PROFILES["US"].region_size == (5, 5)
    assert PROFILES["US"].close_max_deg == 3.0
    assert PROFILES["US"].far_range_deg == (25.0, 28.0)
    assert PROFILES["UK"].region_size == (15, 20)
    assert PROFILES["UK"].close_max_deg == 0.5
    assert PROFILES["UK"].far_range_deg == (5.0, 5.5)
    assert PROFILES["EU"].region_size == (10, 10)
