"""Batch command line: ingest, synthesize, generate tasks, export scenes,
analyze traces, serve the viewer, and build a self-contained demo workspace.

Exit codes: 0 ok, 2 input error, 3 generation/search failure, 4 I/O error.
Failures print a single machine-readable line to stderr: "ErrorName: detail".
All randomness derives from --seed; outputs contain no wall-clock state.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datasets, morph, session, synthdata, taskgen, thematic
from .errors import TiltMapError
from .geodata import GeoMap, build_adjacency, parse_boundaries, project
from .serve import ServerContext, make_server, scene_wire_bytes
from .synthdata import ContiguityWeights, SynthConfig
from .thematic import Style, ThematicLayer, ValueTransform

_EXIT_CODES = {"input": 2, "search": 3, "io": 4}


def _die(exc: TiltMapError) -> int:
    print(f"{exc.name}: {exc}", file=sys.stderr)
    return _EXIT_CODES.get(exc.category, 2)


def _io_die(exc: OSError) -> int:
    print(f"IOError: {exc}", file=sys.stderr)
    return 4


def _write_json(path: Path, doc: dict | list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def _write_scenefile(path: Path, doc: dict) -> None:
    # scenefiles use the exact wire encoding the server emits, so viewer
    # golden tests can compare bytes
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(scene_wire_bytes(doc))


def _load_map(path: str) -> GeoMap:
    return GeoMap.from_mapfile(json.loads(Path(path).read_text()))


def _load_layer(path: str) -> ThematicLayer:
    return ThematicLayer.from_layerfile(json.loads(Path(path).read_text()))


def _schedule(arg: str | None) -> morph.PhaseSchedule:
    if not arg:
        return morph.PhaseSchedule()
    parts = [float(v) for v in arg.split(",")]
    if len(parts) != 6:
        raise TiltMapError("--schedule needs 6 comma-separated degrees")
    return morph.PhaseSchedule(*parts)


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    data = Path(args.geojson).read_bytes()
    gm = parse_boundaries(data, args.id_property, args.name_property)
    gm = build_adjacency(gm, args.contiguity, args.min_shared_length)
    gm = project(gm)
    _write_json(Path(args.out), gm.to_mapfile())
    print(f"wrote {args.out}: {len(gm.areas)} areas")
    return 0


def cmd_synth(args) -> int:
    gm = _load_map(args.map)
    reference = _load_layer(args.layer)
    weights = ContiguityWeights.from_map(gm, row_standardize=not args.binary_weights)
    config = SynthConfig(target_tolerance=args.tolerance, max_swaps=args.max_swaps, rng_seed=args.seed)
    layer, report = synthdata.synthesize(gm, reference, weights, config)
    out = Path(args.out)
    _write_json(out, layer.to_layerfile())
    _write_json(out.with_suffix(out.suffix + ".sidecar.json"), report.to_dict())
    print(f"wrote {out}: |dI| = {abs(report.achieved_i - report.reference_i):.5f}")
    return 0


def cmd_tasks(args) -> int:
    gm = _load_map(args.map)
    reference = _load_layer(args.layer)
    profile = taskgen.PROFILES[args.profile]
    weights = ContiguityWeights.from_map(gm)
    config = SynthConfig(rng_seed=args.seed)
    batch = taskgen.generate_batch(
        gm,
        profile,
        reference,
        weights,
        config,
        region_count=args.regions,
        comparison_count=args.comparisons,
        master_seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = []
    for i, (layer, spec) in enumerate(batch):
        layer_name = f"task-{i:03d}.layer.json"
        _write_json(out_dir / layer_name, layer.to_layerfile())
        specs.append(taskgen.TaskSpec(**{**spec.__dict__, "layer_ref": layer_name}).to_dict())
    _write_json(out_dir / "tasks.json", specs)
    print(f"wrote {out_dir}/tasks.json: {len(specs)} tasks")
    return 0


def _scene_for(gm, layer, style, tilt, azimuth, schedule):
    state = morph.TiltState.at(gm, tilt, azimuth, schedule)
    return morph.scene(gm, layer, style, state, schedule)


def cmd_scene(args) -> int:
    gm = _load_map(args.map)
    layer = _load_layer(args.layer)
    style = Style(args.style)
    schedule = _schedule(args.schedule)
    if args.sweep:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        n = int(round(90.0 / args.sweep))
        for i, tilt in enumerate(np.linspace(0.0, 90.0, n + 1)):
            sc = _scene_for(gm, layer, style, float(tilt), args.azimuth, schedule)
            _write_scenefile(out_dir / f"scene-{i:04d}.json", sc.to_dict())
        print(f"wrote {n + 1} scenes to {out_dir}")
    else:
        sc = _scene_for(gm, layer, style, args.tilt, args.azimuth, schedule)
        _write_scenefile(Path(args.out), sc.to_dict())
        print(f"wrote {args.out}: phase {sc.phase}")
    return 0


def cmd_analyze(args) -> int:
    log = session.SessionLog.from_jsonl(Path(args.trace).read_text())
    tasks = None
    if args.tasks:
        tasks = [taskgen.TaskSpec.from_dict(rec) for rec in json.loads(Path(args.tasks).read_text())]
    if args.answers:
        doc = json.loads(Path(args.answers).read_text())
        log.task_runs = [
            session.TaskRun(
                task_index=int(rec["task"]),
                t_start=float(rec["tStart"]),
                t_end=float(rec["tEnd"]),
                answer=int(rec["answer"]),
            )
            for rec in doc["answers"]
        ]
    report = session.analyze(log, tasks)
    if args.out:
        _write_json(Path(args.out), report)
        print(f"wrote {args.out}")
    else:
        json.dump(report, sys.stdout, indent=1)
        print()
    return 0


def cmd_serve(args) -> int:
    config = json.loads(Path(args.config).read_text())
    base = Path(args.config).parent
    gm = _load_map(str(base / config["mapfile"]))
    layers = {name: _load_layer(str(base / rel)) for name, rel in config["layers"].items()}
    files = {Path(rel).name: base / rel for rel in config.get("files", [])}
    files[Path(config["mapfile"]).name] = base / config["mapfile"]
    for name, rel in config["layers"].items():
        files[Path(rel).name] = base / rel
    schedule = morph.PhaseSchedule(*config["schedule"]) if "schedule" in config else morph.PhaseSchedule()
    viewer_dir = base / config["viewerDir"] if config.get("viewerDir") else None
    context = ServerContext(
        gm=gm,
        layers=layers,
        files=files,
        out_dir=Path(config.get("outDir", base / "uploads")) if Path(config.get("outDir", "")).is_absolute() else base / config.get("outDir", "uploads"),
        schedule=schedule,
        style=Style(config.get("style", "tiltMap")),
        viewer_dir=viewer_dir,
        default_layer=config.get("defaultLayer") or sorted(layers)[0],
    )
    server = make_server(context, args.port)
    print(f"serving on http://127.0.0.1:{server.server_address[1]} (ctrl-c to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_demo(args) -> int:
    """Build a ready-to-serve workspace from a synthetic dataset."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    generators = {"us": datasets.synthetic_us48, "uk": datasets.synthetic_uk391, "eu": datasets.synthetic_eu116}
    transform = {"us": ValueTransform.SQUARE_ROOT, "uk": ValueTransform.SQUARE_ROOT, "eu": ValueTransform.FOURTH_ROOT}
    doc = generators[args.dataset]()
    _write_json(out / f"{args.dataset}.geojson", doc)
    gm = project(build_adjacency(parse_boundaries(json.dumps(doc), "id", "name")))
    _write_json(out / "map.json", gm.to_mapfile())
    raw = datasets.reference_density(gm, transform[args.dataset], seed=args.seed)
    reference = thematic.transform_and_normalize(raw, transform[args.dataset])
    _write_json(out / "reference.layer.json", reference.to_layerfile())
    weights = ContiguityWeights.from_map(gm)
    layer, report = synthdata.synthesize(gm, reference, weights, SynthConfig(rng_seed=args.seed))
    _write_json(out / "question.layer.json", layer.to_layerfile())
    _write_json(out / "question.layer.json.sidecar.json", report.to_dict())
    profile = taskgen.PROFILES[args.dataset.upper()]
    comparisons = 0 if profile.close_max_deg is None else 2
    batch = taskgen.generate_batch(
        gm, profile, reference, weights, SynthConfig(rng_seed=args.seed),
        region_count=3, comparison_count=comparisons, master_seed=args.seed,
    )
    specs = []
    for i, (tlayer, spec) in enumerate(batch):
        name = f"task-{i:03d}.layer.json"
        _write_json(out / name, tlayer.to_layerfile())
        specs.append(taskgen.TaskSpec(**{**spec.__dict__, "layer_ref": name}).to_dict())
    _write_json(out / "tasks.json", specs)
    config = {
        "mapfile": "map.json",
        "layers": {
            "reference": "reference.layer.json",
            "question": "question.layer.json",
            **{f"task-{i:03d}": s["layerfile"] for i, s in enumerate(specs)},
        },
        "files": ["tasks.json", f"{args.dataset}.geojson"],
        "defaultLayer": "question",
        "style": "tiltMap",
        "outDir": "uploads",
        "viewerDir": args.viewer_dir,
    }
    _write_json(out / "serve.json", config)
    print(f"demo workspace in {out} ({len(gm.areas)} areas); serve with: tiltmap serve --config {out}/serve.json")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tiltmap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="GeoJSON boundary file -> mapfile")
    p.add_argument("geojson")
    p.add_argument("--id-property", default="id")
    p.add_argument("--name-property", default=None)
    p.add_argument("--contiguity", choices=("rook", "queen"), default="rook")
    p.add_argument("--min-shared-length", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="synthesize an autocorrelation-matched layer")
    p.add_argument("--map", required=True)
    p.add_argument("--layer", required=True, help="reference layerfile")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--max-swaps", type=int, default=200_000)
    p.add_argument("--binary-weights", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("tasks", help="generate study tasks + per-task layers")
    p.add_argument("--map", required=True)
    p.add_argument("--layer", required=True, help="reference layerfile")
    p.add_argument("--profile", choices=sorted(taskgen.PROFILES), required=True)
    p.add_argument("--regions", type=int, default=0)
    p.add_argument("--comparisons", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_tasks)

    p = sub.add_parser("scene", help="export renderable scene(s) for a tilt angle")
    p.add_argument("--map", required=True)
    p.add_argument("--layer", required=True)
    p.add_argument("--tilt", type=float, default=0.0)
    p.add_argument("--azimuth", type=float, default=0.0)
    p.add_argument("--style", default="tiltMap", choices=[s.value for s in Style])
    p.add_argument("--schedule", default=None, help="six breakpoint degrees, comma separated")
    p.add_argument("--sweep", type=float, default=None, help="export a 0..90 sweep at this step instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scene)

    p = sub.add_parser("analyze", help="analytics report from a tracefile")
    p.add_argument("--trace", required=True)
    p.add_argument("--tasks", default=None)
    p.add_argument("--answers", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="serve data + viewer, accept uploads")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8741)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo", help="build a synthetic demo workspace")
    p.add_argument("--dataset", choices=("us", "uk", "eu"), default="us")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.add_argument("--viewer-dir", default=None)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TiltMapError as exc:
        return _die(exc)
    except OSError as exc:
        return _io_die(exc)


if __name__ == "__main__":
    sys.exit(main())
