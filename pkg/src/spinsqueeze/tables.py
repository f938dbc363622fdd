"""CSV/JSON result tables with a '#'-prefixed provenance header.

Layout of a CSV file::

    # tool: spinsqueeze 0.1.0
    # config: {...}          full run configuration, sorted-key JSON
    # d=2,L=4,delta=1.0      optional model metadata
    # summary: {...}         optional report summary
    col_a,col_b,...
    1.0,2.5,...

Floats are written with ``repr`` so a re-read is lossless and two runs of the
same configuration are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

from . import __version__

TOOL = f"spinsqueeze {__version__}"


def _fmt(value) -> str:
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def _parse(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _jsonable(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def meta_line(meta: dict) -> str:
    return ",".join(f"{k}={_fmt(v)}" for k, v in meta.items())


def render_csv(rows, columns, config=None, meta=None, summary=None) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {TOOL}\n")
    if config is not None:
        buf.write(f"# config: {dumps_json(config)}\n")
    if meta:
        buf.write(f"# {meta_line(meta)}\n")
    if summary is not None:
        buf.write(f"# summary: {dumps_json(summary)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def render_json(rows, columns, config=None, meta=None, summary=None) -> str:
    doc = {"tool": TOOL, "config": config, "meta": meta or {}, "summary": summary,
           "columns": list(columns), "rows": [{c: row.get(c) for c in columns} for row in rows]}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n"


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(path, rows, columns, fmt="csv", config=None, meta=None, summary=None) -> Path:
    render = render_json if fmt == "json" else render_csv
    return write_atomic(path, render(rows, columns, config, meta, summary))


def read_table(path):
    """Return ``(rows, header)`` from a CSV or JSON table written by :func:`write_table`.

    ``header`` has keys ``config``, ``meta`` and ``summary`` (possibly empty).
    """
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        rows = [{k: (math.nan if v is None else v) for k, v in r.items()} for r in doc["rows"]]
        return rows, {"config": doc.get("config"), "meta": doc.get("meta") or {},
                      "summary": doc.get("summary")}
    header = {"config": None, "meta": {}, "summary": None}
    body = []
    for line in text.splitlines():
        if not line.startswith("#"):
            body.append(line)
            continue
        content = line[1:].strip()
        if content.startswith("config:"):
            header["config"] = json.loads(content[len("config:"):])
        elif content.startswith("summary:"):
            header["summary"] = json.loads(content[len("summary:"):])
        elif content.startswith("tool:"):
            header["tool"] = content[len("tool:"):].strip()
        elif "=" in content:
            for item in content.split(","):
                key, _, value = item.partition("=")
                header["meta"][key.strip()] = _parse(value.strip())
    reader = csv.DictReader(body)
    rows = [{k: _parse(v) if v != "" else "" for k, v in row.items()} for row in reader]
    return rows, header
