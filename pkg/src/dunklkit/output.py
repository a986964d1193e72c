"""Artifact files: CSV tables with `# key: value` headers and JSON documents.

All writes of a run go through one ArtifactWriter, so files are produced
one at a time even when the computation behind them is threaded.
"""

import csv
import json
import math
import threading
from pathlib import Path

import numpy as np

from .log import log

TIMING_COLUMNS = ("runtime_ms",)


def to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_cell(v) for v in value)
    return str(value)


class ArtifactWriter:
    """Writes the files of one run under `out_dir`.

    Every file carries the config hash, the library version and the anchors
    of the checks or operations it covers. With `timing=False` the runtime
    columns are dropped so repeated runs are byte-identical.
    """

    def __init__(self, out_dir, config, version, timing=True):
        self.out_dir = Path(out_dir)
        self.config = config
        self.version = version
        self.timing = timing
        self.written = []
        self._lock = threading.Lock()

    def _header(self, anchors):
        return {
            "config_hash": self.config.config_hash(),
            "version": self.version,
            "anchors": list(anchors),
        }

    def _path(self, name, suffix):
        path = self.out_dir / f"{name}{suffix}"
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_csv(self, name, rows, anchors=(), columns=None):
        rows = list(rows)
        if columns is None:
            columns = list(rows[0]) if rows else []
        if not self.timing:
            columns = [c for c in columns if c not in TIMING_COLUMNS]
        with self._lock:
            path = self._path(name, ".csv")
            with path.open("w", newline="") as fh:
                for key, value in self._header(anchors).items():
                    fh.write(f"# {key}: {', '.join(value) if isinstance(value, list) else value}\n")
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([_cell(row.get(c, "")) for c in columns])
            self.written.append(str(path))
        log("Output", f"wrote {len(rows)} rows to {path}")
        return path

    def write_json(self, name, payload, anchors=()):
        doc = dict(self._header(anchors))
        doc["config"] = self.config.to_dict()
        doc["data"] = payload
        if not self.timing:
            doc["data"] = _strip_timing(doc["data"])
        with self._lock:
            path = self._path(name, ".json")
            path.write_text(json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n")
            self.written.append(str(path))
        log("Output", f"wrote {path}")
        return path


def _strip_timing(value):
    if isinstance(value, dict):
        return {k: _strip_timing(v) for k, v in value.items() if k not in TIMING_COLUMNS}
    if isinstance(value, list):
        return [_strip_timing(v) for v in value]
    return value


def read_csv_header(path):
    """The `# key: value` lines at the top of an artifact CSV."""
    header = {}
    with Path(path).open() as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            header[key] = value
    return header
