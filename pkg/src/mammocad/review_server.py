"""Local HTTP service for the mask review step.

Serves the review bundles under one directory, accepts reviewer decisions,
and appends them to the selections file (last write wins, writes serialized
behind a lock). Also serves a static asset directory so a browser UI can run
from the same origin.

Endpoints:
    GET  /api/rois            -> [{roi_id, candidate_count, reviewed}]
    GET  /api/roi/{id}        -> the ROI's bundle descriptor JSON
    GET  /files/{path}        -> raw file below the bundle directory
    POST /api/selection/{id}  -> persist {candidate_index, contour?, reviewer?}
"""
from __future__ import annotations

import errno
import json
import mimetypes
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import PipelineError
from .segmentation import (
    SelectionEntry,
    is_simple_polygon,
    load_selections,
    save_selections,
)


class ReviewService:
    """State shared by request handlers: bundle lookup and selection writes."""

    def __init__(
        self,
        bundle_dir: str | Path,
        selections_path: str | Path | None = None,
        static_dir: str | Path | None = None,
    ):
        self.bundle_dir = Path(bundle_dir)
        if not self.bundle_dir.is_dir():
            raise PipelineError("io", f"bundle directory {self.bundle_dir} does not exist")
        self.selections_path = Path(
            selections_path if selections_path else self.bundle_dir / "selections.json"
        )
        self.static_dir = Path(static_dir) if static_dir else None
        self._lock = threading.Lock()

    def roi_ids(self) -> list[str]:
        return sorted(
            p.parent.name for p in self.bundle_dir.glob("*/bundle.json")
        )

    def descriptor(self, roi_id: str) -> dict | None:
        path = self.bundle_dir / roi_id / "bundle.json"
        if "/" in roi_id or ".." in roi_id or not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def selections(self) -> dict[str, SelectionEntry]:
        if not self.selections_path.exists():
            return {}
        return load_selections(self.selections_path)

    def listing(self) -> list[dict]:
        with self._lock:
            reviewed = set(self.selections())
        out = []
        for roi_id in self.roi_ids():
            desc = self.descriptor(roi_id)
            out.append(
                {
                    "roi_id": roi_id,
                    "candidate_count": desc["candidate_count"],
                    "reviewed": roi_id in reviewed,
                }
            )
        return out

    def record_selection(self, roi_id: str, body: dict) -> SelectionEntry:
        """Validate one decision and persist it; raises ValueError with a
        client-facing reason on bad input."""
        desc = self.descriptor(roi_id)
        if desc is None:
            raise LookupError(roi_id)
        if not isinstance(body, dict):
            raise ValueError("bad-selection: body must be a JSON object")
        unknown = set(body) - {"candidate_index", "contour", "reviewer"}
        if unknown:
            raise ValueError(f"bad-selection: unknown keys {sorted(unknown)}")
        try:
            index = int(body["candidate_index"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("bad-selection: candidate_index missing or not an integer")
        if not (0 <= index < desc["candidate_count"]):
            raise ValueError(
                f"bad-selection: index {index} out of range 0..{desc['candidate_count'] - 1}"
            )
        contour = body.get("contour")
        if contour is not None:
            try:
                contour = [(float(x), float(y)) for x, y in contour]
            except (TypeError, ValueError):
                raise ValueError("bad-selection: contour must be [x, y] pairs")
            if not is_simple_polygon(contour):
                raise ValueError("bad-selection: contour is not a simple polygon")
        reviewer = str(body.get("reviewer", ""))
        entry = SelectionEntry(
            candidate_index=index,
            contour=contour,
            reviewer=reviewer,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        with self._lock:
            entries = self.selections()
            entries[roi_id] = entry
            save_selections(entries, self.selections_path)
        return entry


class _Handler(BaseHTTPRequestHandler):
    service: ReviewService  # set on the server class per instance

    def log_message(self, fmt, *args):  # keep test output clean
        pass

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_file(self, root: Path, rel: str) -> None:
        target = (root / rel).resolve()
        if root.resolve() not in target.parents or not target.is_file():
            self._send_json({"error": "not-found", "message": rel}, 404)
            return
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):  # noqa: N802 (http.server API)
        path = self.path.split("?", 1)[0]
        svc = self.server.service  # type: ignore[attr-defined]
        if path == "/api/rois":
            self._send_json(svc.listing())
        elif path.startswith("/api/roi/"):
            desc = svc.descriptor(path[len("/api/roi/"):])
            if desc is None:
                self._send_json({"error": "not-found", "message": path}, 404)
            else:
                self._send_json(desc)
        elif path.startswith("/files/"):
            self._send_file(svc.bundle_dir, path[len("/files/"):])
        elif svc.static_dir is not None:
            rel = "index.html" if path == "/" else path.lstrip("/")
            self._send_file(svc.static_dir, rel)
        else:
            self._send_json({"error": "not-found", "message": path}, 404)

    def do_POST(self):  # noqa: N802
        path = self.path.split("?", 1)[0]
        svc = self.server.service  # type: ignore[attr-defined]
        if not path.startswith("/api/selection/"):
            self._send_json({"error": "not-found", "message": path}, 404)
            return
        roi_id = path[len("/api/selection/"):]
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length).decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            self._send_json({"error": "bad-selection", "message": f"invalid JSON: {exc}"}, 400)
            return
        try:
            entry = svc.record_selection(roi_id, body)
        except LookupError:
            self._send_json({"error": "not-found", "message": roi_id}, 404)
            return
        except ValueError as exc:
            self._send_json({"error": "bad-selection", "message": str(exc)}, 400)
            return
        self._send_json(
            {
                "status": "ok",
                "roi_id": roi_id,
                "candidate_index": entry.candidate_index,
                "timestamp": entry.timestamp,
            }
        )


def start_server(
    bundle_dir: str | Path,
    port: int,
    host: str = "127.0.0.1",
    selections_path: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Bind and return the server (call serve_forever on it). A busy port
    raises error "bind"."""
    service = ReviewService(bundle_dir, selections_path, static_dir)
    try:
        server = ThreadingHTTPServer((host, port), _Handler)
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise PipelineError("bind", f"cannot bind {host}:{port}: {exc}") from exc
        raise
    server.daemon_threads = True
    server.service = service  # type: ignore[attr-defined]
    return server
