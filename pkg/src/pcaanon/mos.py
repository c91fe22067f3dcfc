"""Grading-session HTTP service for mean-opinion-score studies.

Serves the stimulus pairs prepared by the image-study command to browser
clients: a pair manifest, the images as PNG (browsers do not render PGM;
the conversion is lossless for 8-bit grey), a grade-submission endpoint
and the per-pair MOS, computed as the arithmetic mean of grades rounded
to 2 decimals.  Grades are appended to a JSON-lines file as they arrive,
so a restarted service resumes with every grade it ever accepted.
"""

from __future__ import annotations

import io
import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from PIL import Image

from .errors import ConfigError, DataError
from .imaging import load_image

log = logging.getLogger(__name__)

GRADES_FILENAME = "grades.jsonl"
STUDY_FILENAME = "study.json"


class MosSession:
    """Stimulus pairs plus collected grades for one grading session.

    Appends are serialized through a single lock; every read takes a
    snapshot under the same lock, so concurrent graders never observe a
    torn state.
    """

    def __init__(self, study_dir):
        self.study_dir = Path(study_dir)
        study_path = self.study_dir / STUDY_FILENAME
        if not study_path.is_file():
            raise ConfigError(f"no {STUDY_FILENAME} in {self.study_dir}; "
                              "run the image-study command first")
        with open(study_path, "r", encoding="utf-8") as fh:
            study = json.load(fh)
        session = study.get("session")
        if not session or "pairs" not in session:
            raise DataError(f"{study_path} carries no session manifest")
        self.session_id = session.get("id", self.study_dir.name)
        self.pairs = session["pairs"]
        self.images = session["images"]
        ids = [p["id"] for p in self.pairs]
        if len(set(ids)) != len(ids):
            raise DataError("pair ids are not unique")
        self._pair_ids = set(ids)
        self._png_cache = {}
        self._lock = threading.Lock()
        self._grades = []
        self._grades_path = self.study_dir / GRADES_FILENAME
        self._load_existing_grades()

    def _load_existing_grades(self):
        if not self._grades_path.is_file():
            return
        with open(self._grades_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record.get("pair") not in self._pair_ids:
                    log.warning("grades.jsonl line %d names unknown pair %r",
                                line_no, record.get("pair"))
                    continue
                self._grades.append(record)
        log.info("restored %d grades from %s", len(self._grades),
                 self._grades_path)

    def manifest(self) -> dict:
        pairs = [
            {
                "id": p["id"],
                "reference": p["reference"],
                "test": p["test"],
                "k": p["k"],
                "reference_url": f"/image/{p['reference']}",
                "test_url": f"/image/{p['test']}",
            }
            for p in self.pairs
        ]
        return {"session": self.session_id, "pairs": pairs}

    def image_png(self, image_id):
        """PNG bytes for an image id, or None if unknown."""
        if image_id not in self.images:
            return None
        cached = self._png_cache.get(image_id)
        if cached is not None:
            return cached
        img = load_image(self.study_dir / self.images[image_id])
        buf = io.BytesIO()
        Image.fromarray(img.pixels, mode="L").save(buf, format="PNG")
        png = buf.getvalue()
        self._png_cache[image_id] = png
        return png

    def add_grade(self, observer: str, pair_id: str, grade: float) -> None:
        """Validate, persist and record one grade.

        Raises ValueError for an out-of-range or malformed grade and
        KeyError for an unknown pair id.
        """
        if not isinstance(observer, str) or not observer.strip():
            raise ValueError("observer must be a non-empty string")
        if pair_id not in self._pair_ids:
            raise KeyError(pair_id)
        if isinstance(grade, bool) or not isinstance(grade, (int, float)):
            raise ValueError("grade must be a number")
        grade = float(grade)
        if not 0.0 <= grade <= 100.0:
            raise ValueError(f"grade {grade} outside [0, 100]")
        record = {"observer": observer, "pair": pair_id, "grade": grade}
        with self._lock:
            with open(self._grades_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
            self._grades.append(record)

    def mos(self) -> dict:
        """Arithmetic-mean grade per pair, rounded to 2 decimals."""
        with self._lock:
            grades = list(self._grades)
        by_pair = {p["id"]: [] for p in self.pairs}
        for record in grades:
            by_pair[record["pair"]].append(record["grade"])
        out = []
        for p in self.pairs:
            values = by_pair[p["id"]]
            entry = {"id": p["id"], "k": p["k"], "count": len(values)}
            entry["mos"] = (round(sum(values) / len(values), 2)
                            if values else None)
            out.append(entry)
        return {"session": self.session_id, "pairs": out}


def _build_handler(session: MosSession, ui_dir):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "pcaanon-mos"

        def log_message(self, fmt, *args):
            log.debug("%s - %s", self.address_string(), fmt % args)

        def _cors(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")

        def _send_json(self, status: int, payload) -> None:
            body = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self._cors()
            self.send_header("Content-Type",
                             "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_bytes(self, status, body, content_type):
            self.send_response(status)
            self._cors()
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            path = self.path.split("?", 1)[0]
            if path == "/session":
                self._send_json(200, session.manifest())
            elif path == "/mos":
                self._send_json(200, session.mos())
            elif path.startswith("/image/"):
                png = session.image_png(path[len("/image/"):])
                if png is None:
                    self._send_json(404, {"error": "unknown image"})
                else:
                    self._send_bytes(200, png, "image/png")
            elif ui_root is not None:
                self._serve_static(path)
            else:
                self._send_json(404, {"error": "unknown endpoint"})

        def _serve_static(self, path):
            rel = path.lstrip("/") or "index.html"
            target = (ui_root / rel).resolve()
            if not str(target).startswith(str(ui_root)) \
                    or not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            types = {".html": "text/html; charset=utf-8",
                     ".js": "text/javascript; charset=utf-8",
                     ".css": "text/css; charset=utf-8",
                     ".png": "image/png",
                     ".svg": "image/svg+xml"}
            ctype = types.get(target.suffix, "application/octet-stream")
            self._send_bytes(200, target.read_bytes(), ctype)

        def do_POST(self):
            path = self.path.split("?", 1)[0]
            if path != "/grade":
                self._send_json(404, {"error": "unknown endpoint"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                session.add_grade(payload.get("observer"),
                                  payload.get("pair"),
                                  payload.get("grade"))
            except KeyError:
                self._send_json(404, {"error": "unknown pair"})
                return
            except (ValueError, TypeError, json.JSONDecodeError) as exc:
                self._send_json(400, {"error": str(exc)})
                return
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

    return Handler


def make_server(study_dir, port: int = 0,
                ui_dir=None) -> ThreadingHTTPServer:
    """Build (but do not start) the grading service.

    ``port=0`` binds an ephemeral port; read it back from
    ``server.server_address``.
    """
    session = MosSession(study_dir)
    handler = _build_handler(session, ui_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.mos_session = session
    return server


def serve_mos(study_dir, port: int, ui_dir=None) -> None:
    """Run the grading service until interrupted."""
    server = make_server(study_dir, port=port, ui_dir=ui_dir)
    host, bound_port = server.server_address[:2]
    log.info("MOS session %r listening on http://%s:%d",
             server.mos_session.session_id, host, bound_port)
    print(f"serving MOS session on http://{host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
