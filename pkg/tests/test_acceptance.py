"""Acceptance suite: one test per exit criterion, at the pinned tolerances.

The terminal summary (see conftest) prints one PASS/FAIL line per criterion.
Criterion 10 (viewer golden test) lives with the browser frontend's own test
suite; everything here runs headless.
"""

import time

import numpy as np
import pytest

from tiltmap import geodata, morph, session, synthdata, taskgen
from tiltmap.thematic import Style
from tiltmap.morph import DEFAULT_SCHEDULE, TiltState
from tiltmap.synthdata import ContiguityWeights, SynthConfig

from conftest import collection, ingest, rect_feature

CONTINUITY_BOUND = 0.02  # map units per 0.1 degree step, pinned


def scene_at(gm, layer, tilt, azimuth=0.0, style=Style.TILT_MAP):
    return morph.scene(gm, layer, style, TiltState.at(gm, tilt, azimuth), DEFAULT_SCHEDULE)


def test_c1_morph_endpoint_fidelity(us_map, us_reference):
    start = time.perf_counter()

    flat = scene_at(us_map, us_reference, 0.0)
    chor = scene_at(us_map, us_reference, 0.0, style=Style.CHOROPLETH)
    assert flat.to_dict()["areas"] == chor.to_dict()["areas"]  # color-identical, same triangles
    for mesh in flat.areas:
        assert np.all(mesh.positions[:, 2] == 0.0)  # planar

    prism = scene_at(us_map, us_reference, 45.0)
    for mesh in prism.areas:
        want = 0.20 * us_reference.values[mesh.id] / 100.0
        assert abs(mesh.positions[:, 2].max() - want) <= 1e-9

    bars = scene_at(us_map, us_reference, 90.0)
    assert len(bars.areas) == 48
    layout = morph.bar_layout(us_map, morph.bar_order(us_map, 0.0))
    extents = {}
    values, heights = [], []
    for mesh in bars.areas:
        pos = mesh.positions
        assert np.allclose(pos[:, 1], 0.5, atol=1e-12)  # coplanar quads
        extents[mesh.id] = (pos[:, 0].min(), pos[:, 0].max())
        values.append(us_reference.values[mesh.id])
        heights.append(pos[:, 2].max())
    ordered = [extents[aid] for aid in layout.order]
    assert all(hi < lo2 for (_, hi), (lo2, _) in zip(ordered, ordered[1:]))  # non-overlapping
    coeffs = np.polyfit(values, heights, 1)
    assert abs(coeffs[1]) < 1e-12  # affine with zero intercept
    assert np.allclose(np.asarray(heights), coeffs[0] * np.asarray(values), atol=1e-12)

    assert time.perf_counter() - start < 1.0


def test_c2_bar_ordering_on_grid(grid3x3_map):
    south = morph.bar_order(grid3x3_map, 0.0)  # viewer south of the map
    assert [int(aid[3]) for aid in south] == sorted(int(aid[3]) for aid in south)  # west -> east
    east = morph.bar_order(grid3x3_map, 270.0)  # viewer east of the map
    assert [int(aid[1]) for aid in east] == sorted(int(aid[1]) for aid in east)  # south -> north


def test_c3_continuity_and_reversibility(us_map, us_reference):
    worst = morph.continuity_check(us_map, us_reference, DEFAULT_SCHEDULE, step_deg=0.1)
    assert worst < CONTINUITY_BOUND

    frozen = morph.bar_order(us_map, 0.0)

    def at(t):
        if t > DEFAULT_SCHEDULE.prism_end:
            return morph.scene(us_map, us_reference, Style.TILT_MAP, TiltState(t, 0.0, frozen, 0.0))
        return morph.scene(us_map, us_reference, Style.TILT_MAP, TiltState(t, 0.0))

    checks = [0.0, 7.5, 33.3, 45.0, 52.0, 61.7, 70.1, 79.9, 84.2, 88.8, 90.0]
    forward = [at(t) for t in checks]
    backward = [at(t) for t in reversed(checks)]
    for f, b in zip(forward, reversed(backward)):
        for mf, mb in zip(f.areas, b.areas):
            assert np.array_equal(mf.positions, mb.positions)


@pytest.mark.parametrize("dataset", ["us", "eu", "uk"])
def test_c4_morans_synthesis(dataset, us_map, eu_map, uk_map, us_reference, eu_reference, uk_reference):
    gm, reference = {
        "us": (us_map, us_reference),
        "eu": (eu_map, eu_reference),
        "uk": (uk_map, uk_reference),
    }[dataset]
    weights = ContiguityWeights.from_map(gm)
    config = SynthConfig(target_tolerance=0.01, max_swaps=200_000, rng_seed=101)
    start = time.perf_counter()
    layer, report = synthdata.synthesize(gm, reference, weights, config)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    assert report.swaps_attempted <= 200_000
    assert sorted(layer.values.values()) == sorted(reference.values.values())  # exact multiset
    achieved = synthdata.morans_i(layer.values, weights)
    reference_i = synthdata.morans_i(reference.values, weights)
    assert abs(achieved - reference_i) <= 0.01


@pytest.mark.parametrize("dataset", ["US", "UK", "EU"])
def test_c5_task_constraints_100_per_dataset(
    dataset, us_map, uk_map, eu_map, us_reference, uk_reference, eu_reference
):
    gm, reference = {
        "US": (us_map, us_reference),
        "UK": (uk_map, uk_reference),
        "EU": (eu_map, eu_reference),
    }[dataset]
    profile = taskgen.PROFILES[dataset]
    weights = ContiguityWeights.from_map(gm)
    config = SynthConfig(rng_seed=55)
    if profile.close_max_deg is None:
        regions, comparisons = 100, 0
    else:
        regions, comparisons = 50, 50
    batch = taskgen.generate_batch(
        gm, profile, reference, weights, config,
        region_count=regions, comparison_count=comparisons, master_seed=2023,
    )
    assert len(batch) == 100
    lo_size, hi_size = profile.region_size
    for layer, spec in batch:
        low, high = spec.answer_range
        assert low <= spec.answer <= high
        if spec.kind == "region":
            assert lo_size <= len(spec.targets) <= hi_size
            # independent revalidation
            region = set(spec.targets)
            seen = {spec.targets[0]}
            queue = [spec.targets[0]]
            while queue:
                cur = queue.pop()
                for nb in gm.neighbors(cur):
                    if nb in region and nb not in seen:
                        seen.add(nb)
                        queue.append(nb)
            assert seen == region
            values = [layer.values[i] for i in spec.targets]
            assert 0.40 <= taskgen.cv(values) <= 0.60
            num = sum(gm.area(i).surface * layer.values[i] for i in spec.targets)
            den = sum(gm.area(i).surface for i in spec.targets)
            assert spec.answer == pytest.approx(num / den, rel=1e-12)
        else:
            a, b = spec.targets
            d = geodata.great_circle_deg(gm.area(a).centroid, gm.area(b).centroid)
            if spec.distance_class == "close":
                assert d < profile.close_max_deg
            else:
                assert profile.far_range_deg[0] <= d <= profile.far_range_deg[1]
            assert spec.answer == pytest.approx(abs(layer.values[a] - layer.values[b]), abs=1e-12)


def test_c6_oracle_equivalence(us_map, us_reference):
    # region answers against brute-force weighted summation
    rng = np.random.default_rng(77)
    ids = sorted(us_map.ids())
    for _ in range(50):
        region = geodata.contiguous_region(us_map, ids[int(rng.integers(len(ids)))], 5, rng)
        got = taskgen.region_answer(us_map, us_reference, region)
        num = sum(us_map.area(i).surface * us_reference.values[i] for i in region)
        den = sum(us_map.area(i).surface for i in region)
        assert abs(got - num / den) <= 1e-9 * abs(num / den)

    # great-circle distance against an independent haversine
    import math

    def haversine(p, q):
        lat1, lon1, lat2, lon2 = map(math.radians, (p.lat, p.lon, q.lat, q.lon))
        a = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
        return math.degrees(2 * math.asin(math.sqrt(a)))

    for _ in range(200):
        p = geodata.GeoPosition(float(rng.uniform(-179, 179)), float(rng.uniform(-89, 89)))
        q = geodata.GeoPosition(float(rng.uniform(-179, 179)), float(rng.uniform(-89, 89)))
        assert abs(geodata.great_circle_deg(p, q) - haversine(p, q)) <= 1e-9

    # Moran's I: exact checkerboard value and 50 random grids vs direct formula
    feats = [rect_feature(f"r{r}c{c}", c, r, c + 1.0, r + 1.0) for r in range(2) for c in range(2)]
    grid = ingest(collection(feats))
    binary = ContiguityWeights.from_map(grid, row_standardize=False)
    checker = {"r0c0": 1.0, "r0c1": -1.0, "r1c0": -1.0, "r1c1": 1.0}
    assert synthdata.morans_i(checker, binary) == -1.0

    for trial in range(50):
        nr, nc = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        feats = [rect_feature(f"r{r}c{c}", c, r, c + 1.0, r + 1.0) for r in range(nr) for c in range(nc)]
        gm = ingest(collection(feats))
        values = {aid: float(rng.normal()) for aid in gm.ids()}
        w = ContiguityWeights.from_map(gm, row_standardize=False)
        x = np.array([values[i] for i in gm.ids()])
        z = x - x.mean()
        idx = {aid: k for k, aid in enumerate(gm.ids())}
        num = sum(
            z[idx[a]] * z[idx[b]] for a in gm.ids() for b in gm.neighbors(a)
        )
        s0 = sum(len(gm.neighbors(a)) for a in gm.ids())
        want = len(x) / s0 * num / float(z @ z)
        assert synthdata.morans_i(values, w) == pytest.approx(want, abs=1e-12)


def test_c7_analytics_fixtures():
    identity = session.Pose.identity()

    def sample(t, head=None, mp=None, view="choropleth"):
        return session.TraceSample(
            t=t, head=head or identity, controller=identity, map=mp or identity, view=view
        )

    # 0% and 50% movement fixtures
    static = session.SessionLog(samples=[sample(i * 0.1) for i in range(40)])
    assert session.analyze(static)["headMovementPct"] == 0.0
    assert session.analyze(static)["mapMovementPct"] == 0.0

    moving = []
    x = 0.0
    for i in range(41):
        if i % 2 == 1:
            x += 0.05
        moving.append(sample(i * 0.1, head=session.Pose.make((x, 0, 0), (0, 0, 0, 1))))
    assert session.analyze(session.SessionLog(samples=moving))["headMovementPct"] == pytest.approx(50.0)

    # strict threshold boundaries
    from scipy.spatial.transform import Rotation

    def rotated(angle):
        return session.Pose.make((0, 0, 0), Rotation.from_euler("y", angle, degrees=True).as_quat())

    a = sample(0.0)
    assert not session.classify_movement(a, sample(0.1, head=session.Pose.make((0.01, 0, 0), (0, 0, 0, 1))), "head")
    assert session.classify_movement(a, sample(0.1, head=session.Pose.make((0.0100001, 0, 0), (0, 0, 0, 1))), "head")
    assert not session.classify_movement(a, sample(0.1, mp=rotated(5.0)), "map")
    assert session.classify_movement(a, sample(0.1, mp=rotated(5.001)), "map")

    # schedule-proportional view shares over a uniform sweep
    n = 9000
    sweep = []
    for i in range(n):
        tilt = (i + 0.5) * 90.0 / n
        phase, _ = morph.phase_of(tilt, DEFAULT_SCHEDULE)
        mp = session.Pose.make((0, 0, 0), Rotation.from_euler("x", -tilt, degrees=True).as_quat())
        sweep.append(sample(i * 0.1, mp=mp, view=morph.VIEW_CLASS_OF_PHASE[phase]))
    shares = session.analyze(session.SessionLog(samples=sweep))["viewClassPct"]
    widths = {"choropleth": 5, "transitionCP": 35, "prism": 10, "transitionPB": 35, "barChart": 5}
    for view, width in widths.items():
        assert shares[view] == pytest.approx(100.0 * width / 90.0, abs=0.01)

    # canonical tilt angles
    assert session.tilt_angle(identity) == pytest.approx(0.0, abs=1e-12)
    assert session.tilt_angle(
        session.Pose.make((0, 0, 0), Rotation.from_euler("x", -45, degrees=True).as_quat())
    ) == pytest.approx(45.0, abs=1e-9)
    assert session.tilt_angle(
        session.Pose.make((0, 0, 0), Rotation.from_euler("x", -90, degrees=True).as_quat())
    ) == pytest.approx(90.0, abs=1e-9)


def test_c8_condition_layouts():
    # toggle cycle, both directions
    mode = session.ToggleMode(0)
    forward = []
    for _ in range(3):
        mode = session.toggle_step(mode, +1)
        forward.append(mode.view)
    assert forward == ["prism", "barChart", "choropleth"]
    backward = []
    for _ in range(3):
        mode = session.toggle_step(mode, -1)
        backward.append(mode.view)
    assert backward == ["barChart", "prism", "choropleth"]

    # side-by-side numeric assertions
    import math

    eye = session.Pose.make((0.2, 1.6, -0.4), (0, 0, 0, 1))
    poses = session.side_by_side_layout(eye)
    for p in poses.values():
        assert np.linalg.norm(p.p - eye.p) == pytest.approx(0.9, abs=1e-12)
    assert session.tilt_angle(poses["prism"]) == pytest.approx(75.0, abs=1e-9)
    assert session.tilt_angle(poses["choropleth"]) == pytest.approx(0.0, abs=1e-9)
    assert session.tilt_angle(poses["barChart"]) == pytest.approx(0.0, abs=1e-9)
    fwd = poses["prism"].p - eye.p
    for name in ("choropleth", "barChart"):
        d = poses[name].p - eye.p
        cos = float(np.dot(d, fwd)) / (np.linalg.norm(d) * np.linalg.norm(fwd))
        assert math.degrees(math.acos(cos)) == pytest.approx(80.0, abs=1e-6)


def test_c9_dataset_cardinalities_and_bar_capacity(us_map, uk_map, eu_map):
    assert len(us_map.areas) == 48
    assert len(uk_map.areas) == 391
    assert len(eu_map.areas) == 116
    morph.bar_layout(eu_map, morph.bar_order(eu_map, 0.0))
    from tiltmap.errors import TooManyBars

    with pytest.raises(TooManyBars):
        morph.bar_layout(uk_map, morph.bar_order(uk_map, 0.0))
