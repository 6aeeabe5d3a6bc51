import json

import pytest

from tiltmap import datasets, geodata, synthdata, thematic

# ---------------------------------------------------------------------------
# geojson helpers


def rect_feature(area_id, lon0, lat0, lon1, lat1, name=None):
    ring = [[lon0, lat0], [lon1, lat0], [lon1, lat1], [lon0, lat1], [lon0, lat0]]
    return {
        "type": "Feature",
        "properties": {"id": area_id, "name": name or area_id},
        "geometry": {"type": "Polygon", "coordinates": [ring]},
    }


def collection(features):
    return {"type": "FeatureCollection", "features": features}


def ingest(doc, contiguity="rook", min_shared=1e-6):
    gm = geodata.parse_boundaries(json.dumps(doc), "id", "name")
    gm = geodata.build_adjacency(gm, contiguity, min_shared)
    return geodata.project(gm)


# ---------------------------------------------------------------------------
# shared maps (session scoped: building the large ones is not free)


@pytest.fixture(scope="session")
def us_map():
    return ingest(datasets.synthetic_us48())


@pytest.fixture(scope="session")
def uk_map():
    return ingest(datasets.synthetic_uk391())


@pytest.fixture(scope="session")
def eu_map():
    return ingest(datasets.synthetic_eu116())


@pytest.fixture(scope="session")
def grid3x3_map():
    feats = []
    for r in range(3):
        for c in range(3):
            feats.append(rect_feature(f"r{r}c{c}", -1.5 + c, -1.5 + r, -0.5 + c, -0.5 + r))
    return ingest(collection(feats))


@pytest.fixture(scope="session")
def us_reference(us_map):
    raw = datasets.reference_density(us_map, thematic.ValueTransform.SQUARE_ROOT)
    return thematic.transform_and_normalize(raw, thematic.ValueTransform.SQUARE_ROOT)


@pytest.fixture(scope="session")
def uk_reference(uk_map):
    raw = datasets.reference_density(uk_map, thematic.ValueTransform.SQUARE_ROOT)
    return thematic.transform_and_normalize(raw, thematic.ValueTransform.SQUARE_ROOT)


@pytest.fixture(scope="session")
def eu_reference(eu_map):
    raw = datasets.reference_density(eu_map, thematic.ValueTransform.FOURTH_ROOT)
    return thematic.transform_and_normalize(raw, thematic.ValueTransform.FOURTH_ROOT)


@pytest.fixture(scope="session")
def us_weights(us_map):
    return synthdata.ContiguityWeights.from_map(us_map)


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call":
                continue
            if "test_acceptance" in rep.nodeid:
                rows.append((rep.nodeid.split("::")[-1], status == "passed"))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in sorted(rows):
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
