"""Permanent records for combined lists: ids, manifests, verification.

A record's id is derived from the canonical serialization of its config
and inputs, so rebuilding the same list always yields the same short id
regardless of when it was built. The manifest is a line-oriented
"key: value" text with fixed key order; the id hash covers the exact
config and input line bytes, making verification independent of any
object model.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import os
import shutil
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from filelock import FileLock

from .combine import CombineConfig
from .errors import CorruptDataError, NotFoundError
from .snapshots import Provider

_ID_LENGTH = 8

FORMATS = ("list", "extended", "manifest")
_FILENAMES = {"list": "list.csv", "extended": "extended.csv", "manifest": "manifest.txt"}

InputTriple = tuple[Provider, dt.date, str]


def _input_lines(inputs: tuple[InputTriple, ...]) -> list[str]:
    return [
        f"input: {p.value},{d.isoformat()},{digest}" for p, d, digest in inputs
    ]


def _id_source(config_lines: list[str], input_lines: list[str]) -> bytes:
    return "\n".join([*config_lines, *input_lines]).encode("utf-8")


def compute_list_id(
    config: CombineConfig, inputs: tuple[InputTriple, ...], length: int = _ID_LENGTH
) -> str:
    digest = hashlib.sha256(_id_source(config.canonical_lines(), _input_lines(inputs)))
    return digest.hexdigest()[:length]


@dataclass(frozen=True)
class ListManifest:
    list_id: str
    created: dt.date
    config: CombineConfig
    inputs: tuple[InputTriple, ...]
    output_digest: str
    citation: str

    def text(self) -> str:
        lines = [
            f"list_id: {self.list_id}",
            f"created: {self.created.isoformat()}",
            *self.config.canonical_lines(),
            *_input_lines(self.inputs),
            f"output_digest: {self.output_digest}",
            f"citation: {self.citation}",
        ]
        return "\n".join(lines) + "\n"


def make_manifest(
    config: CombineConfig,
    inputs: tuple[InputTriple, ...] | list[InputTriple],
    list_bytes: bytes,
    created: dt.date | None = None,
    id_length: int = _ID_LENGTH,
) -> ListManifest:
    """Build the manifest for a finalized list output.

    Inputs must already be sorted by (provider, date); the created date
    is deliberately excluded from the id hash so rebuilding the same
    configuration later yields the same id.
    """
    inputs = tuple(inputs)
    if list(inputs) != sorted(inputs, key=lambda t: (t[0].value, t[1])):
        raise ValueError("inputs must be sorted by (provider, date)")
    list_id = compute_list_id(config, inputs, length=id_length)
    created = created or dt.date.today()
    citation = (
        f"Combined top-sites ranking {list_id} (created {created.isoformat()}). "
        f"Reproducible record: records/{list_id}/manifest.txt"
    )
    return ListManifest(
        list_id=list_id,
        created=created,
        config=config,
        inputs=inputs,
        output_digest=hashlib.sha256(list_bytes).hexdigest(),
        citation=citation,
    )


def parse_manifest_text(text: str) -> dict[str, object]:
    """Extract the fields verification needs from stored manifest bytes."""
    fields: dict[str, str] = {}
    config_lines: list[str] = []
    input_lines: list[str] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(": ")
        if key.startswith("config."):
            config_lines.append(line)
        elif key == "input":
            input_lines.append(line)
        else:
            fields[key] = value
    return {
        "list_id": fields.get("list_id", ""),
        "created": fields.get("created", ""),
        "output_digest": fields.get("output_digest", ""),
        "citation": fields.get("citation", ""),
        "config_lines": config_lines,
        "input_lines": input_lines,
    }


@dataclass(frozen=True)
class VerifyReport:
    list_id: str
    ok: bool
    mismatches: tuple[str, ...]


class RecordStore:
    """Records under root/records/<list_id>/{list.csv, extended.csv, manifest.txt}.

    Same reader/writer contract as the snapshot archive: many readers,
    one writer, atomic publish (files are written to a staging directory
    and renamed into place).
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.records_dir = self.root / "records"
        self.records_dir.mkdir(parents=True, exist_ok=True)

    def record_dir(self, list_id: str) -> Path:
        return self.records_dir / list_id

    def exists(self, list_id: str) -> bool:
        return (self.record_dir(list_id) / "manifest.txt").exists()

    def list_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.records_dir.iterdir() if (p / "manifest.txt").exists()
        )

    def put(
        self,
        config: CombineConfig,
        inputs: tuple[InputTriple, ...] | list[InputTriple],
        list_bytes: bytes,
        extended_bytes: bytes,
        created: dt.date | None = None,
    ) -> ListManifest:
        """Store a record, lengthening the id on the (unlikely) collision."""
        inputs = tuple(inputs)
        with FileLock(str(self.records_dir / ".writer.lock")):
            id_length = _ID_LENGTH
            while True:
                manifest = make_manifest(
                    config, inputs, list_bytes, created=created, id_length=id_length
                )
                existing = self.record_dir(manifest.list_id)
                if not (existing / "manifest.txt").exists():
                    break
                stored = parse_manifest_text(
                    (existing / "manifest.txt").read_text(encoding="utf-8")
                )
                same = hashlib.sha256(
                    _id_source(stored["config_lines"], stored["input_lines"])
                ).hexdigest() == hashlib.sha256(
                    _id_source(config.canonical_lines(), _input_lines(inputs))
                ).hexdigest()
                if same:
                    return manifest  # identical record already stored
                id_length += 1  # genuine prefix collision: lengthen the id
            target = self.record_dir(manifest.list_id)
            staging = target.with_name(target.name + ".tmp")
            for partial in (staging, target):  # leftovers from a crashed writer
                if partial.exists():
                    shutil.rmtree(partial)
            staging.mkdir(parents=True)
            (staging / "list.csv").write_bytes(list_bytes)
            (staging / "extended.csv").write_bytes(extended_bytes)
            (staging / "manifest.txt").write_bytes(manifest.text().encode("utf-8"))
            os.replace(staging, target)
            return manifest

    def read(self, list_id: str, fmt: str) -> bytes:
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
        path = self.record_dir(list_id) / _FILENAMES[fmt]
        if not path.exists():
            raise NotFoundError(f"no record {list_id!r}")
        return path.read_bytes()


def verify_record(store: RecordStore, list_id: str) -> VerifyReport:
    """Recompute the stored record's digests and report any divergence."""
    if not store.exists(list_id):
        raise NotFoundError(f"no record {list_id!r}")
    manifest_text = store.read(list_id, "manifest").decode("utf-8")
    stored = parse_manifest_text(manifest_text)
    mismatches: list[str] = []
    actual_output = hashlib.sha256(store.read(list_id, "list")).hexdigest()
    if actual_output != stored["output_digest"]:
        mismatches.append("output_digest")
    recomputed = hashlib.sha256(
        _id_source(stored["config_lines"], stored["input_lines"])
    ).hexdigest()
    stored_id = str(stored["list_id"])
    if not stored_id or recomputed[: len(stored_id)] != stored_id or stored_id != list_id:
        mismatches.append("list_id")
    return VerifyReport(list_id=list_id, ok=not mismatches, mismatches=tuple(mismatches))


def serve_record(store: RecordStore, list_id: str, fmt: str) -> bytes:
    """Return a stored artifact bit-exactly; refuse corrupted records."""
    report = verify_record(store, list_id)
    if not report.ok:
        raise CorruptDataError(
            f"record {list_id} failed verification: {', '.join(report.mismatches)}",
            mismatches=report.mismatches,
        )
    return store.read(list_id, fmt)


class _RecordHandler(BaseHTTPRequestHandler):
    """GET /list/<id>/download and GET /list/<id>/manifest, stored bytes only."""

    store: RecordStore  # injected by make_server

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        parts = [p for p in self.path.split("/") if p]
        if len(parts) != 3 or parts[0] != "list" or parts[2] not in ("download", "manifest"):
            self._respond(404, b"not found\n", "text/plain")
            return
        list_id, what = parts[1], parts[2]
        fmt = "list" if what == "download" else "manifest"
        try:
            payload = serve_record(self.store, list_id, fmt)
        except NotFoundError:
            self._respond(404, b"not found\n", "text/plain")
            return
        except CorruptDataError as exc:
            self._respond(409, f"{exc}\n".encode("utf-8"), "text/plain")
            return
        content_type = "text/csv" if fmt == "list" else "text/plain"
        self._respond(200, payload, content_type)

    def _respond(self, code: int, payload: bytes, content_type: str) -> None:
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, fmt: str, *args: object) -> None:
        pass  # quiet by default; this service is a local convenience


def make_server(store: RecordStore, port: int = 0) -> ThreadingHTTPServer:
    """Read-only record service; port 0 picks a free port."""
    handler = type("BoundRecordHandler", (_RecordHandler,), {"store": store})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve_forever(store: RecordStore, port: int) -> None:
    server = make_server(store, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        thread.join()
    except KeyboardInterrupt:
        server.shutdown()
