"""CSV and JSON formats.

Trace CSV::

    index,duration_s,quality[,bitrate_kbps,version]

Trace values are written with ``repr`` so a write/read round trip is exact.
Derived outputs (curves, metrics) use 9 significant digits. Lines starting
with ``#`` are comments and are skipped on read.

Dataset manifest JSON::

    {"scale": {"lo": 1.0, "hi": 5.0},
     "items": [{"trace": "traces/s0.csv", "length_s": 60, "mos": 3.7}, ...]}

Trace paths are resolved relative to the manifest's directory.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

from .errors import CqmError, FormatError, IONotFound
from .predictor import CqmWeights, CumulativeCurve
from .trace import (
    DEFAULT_SCALE,
    LabeledDataset,
    LabeledSequence,
    QualityScale,
    SegmentRecord,
    SessionTrace,
    validate_trace,
)

TRACE_COLUMNS = ("index", "duration_s", "quality")
OPTIONAL_COLUMNS = ("bitrate_kbps", "version")


def fmt(x) -> str:
    """Locale-independent 9-significant-digit rendering; empty for None."""
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".9g")


def _open_for_read(path):
    path = Path(path)
    if not path.is_file():
        raise IONotFound(f"no such file: {path}")
    return open(path, newline="", encoding="utf-8")


def _rows(fh):
    return csv.reader(line for line in fh if line.strip() and not line.startswith("#"))


def read_trace_csv(path, scale: QualityScale = DEFAULT_SCALE) -> SessionTrace:
    with _open_for_read(path) as fh:
        rows = _rows(fh)
        try:
            header = [h.strip() for h in next(rows)]
        except StopIteration:
            raise FormatError(f"{path}: empty trace file") from None
        if tuple(header[:3]) != TRACE_COLUMNS or any(h not in OPTIONAL_COLUMNS for h in header[3:]):
            raise FormatError(f"{path}: unexpected header {header}")
        raw = []
        for lineno, row in enumerate(rows, start=2):
            if len(row) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} fields")
            rec = dict(zip(header, (c.strip() for c in row)))
            try:
                raw.append(SegmentRecord(
                    index=int(rec["index"]),
                    quality=float(rec["quality"]),
                    duration_s=float(rec["duration_s"]),
                    bitrate_kbps=float(rec["bitrate_kbps"]) if rec.get("bitrate_kbps") else None,
                    version=int(rec["version"]) if rec.get("version") else None,
                ))
            except CqmError:
                raise
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    return validate_trace(raw, scale)


def write_trace_csv(trace: SessionTrace, path) -> None:
    cols = list(TRACE_COLUMNS)
    if any(s.bitrate_kbps is not None or s.version is not None for s in trace.segments):
        cols += OPTIONAL_COLUMNS
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for s in trace.segments:
            row = [s.index, repr(float(s.duration_s)), repr(float(s.quality))]
            if len(cols) > 3:
                row += ["" if s.bitrate_kbps is None else repr(float(s.bitrate_kbps)),
                        "" if s.version is None else s.version]
            w.writerow(row)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def read_csv(path) -> List[dict]:
    with _open_for_read(path) as fh:
        rows = _rows(fh)
        header = next(rows, None)
        if header is None:
            return []
        return [dict(zip(header, r)) for r in rows]


def write_curve_csv(curve: CumulativeCurve, path) -> None:
    write_csv(path, ("t_s", "cqm"), curve.points)


def read_weights(path) -> CqmWeights:
    if not Path(path).is_file():
        raise IONotFound(f"no such file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            return CqmWeights.from_dict(json.load(fh))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: invalid weights file ({exc})") from None


def write_weights(weights: CqmWeights, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(weights.to_dict(), fh, indent=2)
        fh.write("\n")


def read_manifest(path) -> LabeledDataset:
    path = Path(path)
    if not path.is_file():
        raise IONotFound(f"no such file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        sc = doc.get("scale", {})
        scale = QualityScale(float(sc.get("lo", 1.0)), float(sc.get("hi", 5.0)))
        entries = doc["items"]
    except CqmError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"{path}: invalid manifest ({exc})") from None
    base = path.parent
    cache: Dict[str, SessionTrace] = {}
    items = []
    for i, e in enumerate(entries):
        try:
            ref = e["trace"]
            length, mos = float(e["length_s"]), float(e["mos"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: item {i} malformed ({exc})") from None
        if ref not in cache:
            cache[ref] = read_trace_csv(base / ref, scale)
        items.append(LabeledSequence(cache[ref], length, mos, source=ref))
    return LabeledDataset(items)


def write_manifest(dataset: LabeledDataset, path) -> None:
    """Write `dataset` as a manifest plus one CSV per distinct trace under ``traces/``."""
    path = Path(path)
    base = path.parent
    trace_paths: Dict[int, str] = {}
    items = []
    for it in dataset:
        key = id(it.trace)
        if key not in trace_paths:
            stem = it.source.rsplit("/", 1)[-1].rsplit(".", 1)[0] if it.source else ""
            name = stem or f"trace_{len(trace_paths):03d}"
            name = f"traces/{name}.csv"
            if name in trace_paths.values():
                name = f"traces/trace_{len(trace_paths):03d}.csv"
            trace_paths[key] = name
            write_trace_csv(it.trace, base / name)
        items.append({"trace": trace_paths[key], "length_s": it.length_s, "mos": it.mos})
    sc = dataset.scale
    base.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"scale": {"lo": sc.lo, "hi": sc.hi}, "items": items}, fh, indent=1)
        fh.write("\n")
