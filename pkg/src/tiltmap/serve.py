"""Local HTTP server feeding the interactive viewer.

Serves registered data files (mapfile, layerfiles, taskfile) and static
viewer assets, evaluates scenes on demand, and accepts trace/answer uploads
(PUT, persisted under the output directory).  Single process, loopback use;
CORS is wide open so a dev-served viewer can talk to it.
"""

from __future__ import annotations

import errno
import json
import mimetypes
import re
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import morph
from .errors import PortInUse, TiltMapError
from .geodata import GeoMap
from .thematic import Style, ThematicLayer

_SAFE_NAME = re.compile(r"^[\w.-]+$")


def scene_wire_bytes(doc: dict) -> bytes:
    """Canonical scenefile encoding shared by the CLI exporter and the
    /api/scene endpoint; byte-stable for identical scenes."""
    return json.dumps(doc, separators=(",", ":")).encode()


@dataclass(eq=False)
class ServerContext:
    gm: GeoMap
    layers: dict[str, ThematicLayer]
    files: dict[str, Path]  # name -> path served under /data/
    out_dir: Path
    schedule: morph.PhaseSchedule = field(default_factory=morph.PhaseSchedule)
    style: Style = Style.TILT_MAP
    viewer_dir: Path | None = None
    default_layer: str = ""

    def manifest(self) -> dict:
        return {
            "files": {name: f"/data/{name}" for name in sorted(self.files)},
            "layers": sorted(self.layers),
            "defaultLayer": self.default_layer,
            "schedule": list(self.schedule.breakpoints()),
            "style": self.style.value,
            "scene": "/api/scene?tilt=0&azimuth=0&layer=" + self.default_layer,
        }


class _Handler(BaseHTTPRequestHandler):
    context: ServerContext  # assigned by make_server

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, body: bytes, content_type: str = "application/json"):
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str):
        self._send(code, json.dumps({"error": message}).encode())

    def do_OPTIONS(self):
        self._send(204, b"")

    def do_GET(self):
        ctx = self.context
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if url.path == "/api/manifest":
                self._send(200, json.dumps(ctx.manifest()).encode())
            elif url.path == "/api/scene":
                self._scene(parse_qs(url.query))
            elif len(parts) == 2 and parts[0] == "data" and parts[1] in ctx.files:
                body = ctx.files[parts[1]].read_bytes()
                self._send(200, body)
            elif parts and parts[0] == "viewer" and ctx.viewer_dir is not None:
                self._static(parts[1:])
            else:
                self._error(404, "not found")
        except TiltMapError as exc:
            self._error(400, f"{exc.name}: {exc}")
        except BrokenPipeError:
            pass

    def _static(self, parts: list[str]):
        rel = "/".join(parts) or "index.html"
        base = self.context.viewer_dir.resolve()
        target = (base / rel).resolve()
        if base not in target.parents and target != base or not target.is_file():
            self._error(404, "not found")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._send(200, target.read_bytes(), ctype)

    def _scene(self, query: dict):
        ctx = self.context
        tilt = float(query.get("tilt", ["0"])[0])
        azimuth = float(query.get("azimuth", ["0"])[0])
        style = Style(query.get("style", [ctx.style.value])[0])
        layer_name = query.get("layer", [ctx.default_layer])[0]
        if layer_name not in ctx.layers:
            self._error(404, f"unknown layer {layer_name!r}")
            return
        state = morph.TiltState.at(ctx.gm, tilt, azimuth, ctx.schedule)
        sc = morph.scene(ctx.gm, ctx.layers[layer_name], style, state, ctx.schedule)
        self._send(200, scene_wire_bytes(sc.to_dict()))

    def do_PUT(self):
        ctx = self.context
        parts = [p for p in self.path.split("/") if p]
        if len(parts) != 2 or parts[0] not in ("traces", "answers") or not _SAFE_NAME.match(parts[1]):
            self._error(404, "uploads go to /traces/<name> or /answers/<name>")
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        dest = ctx.out_dir / parts[0]
        dest.mkdir(parents=True, exist_ok=True)
        (dest / parts[1]).write_bytes(body)
        self._send(201, json.dumps({"stored": f"{parts[0]}/{parts[1]}"}).encode())


def make_server(context: ServerContext, port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"context": context})
    try:
        return ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUse(f"port {port} is already in use") from exc
        raise
