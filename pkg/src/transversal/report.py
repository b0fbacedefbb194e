"""Deterministic run reports in JSON, CSV and plot-data form.

Floats are written with ``%.12g``; infinities and NaN become the strings
``"inf"``, ``"-inf"`` and ``"nan"``.  Keys are sorted, so the same scene,
seed and version give byte-identical JSON.  Timings are kept out of the
report and written to a separate file.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from importlib import metadata
from pathlib import Path

import numpy as np

from .geometry import Bracket
from .norms import NormSpec


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _float(x: float):
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float("%.12g" % x)


def to_jsonable(obj):
    """Convert results (brackets, dataclasses, arrays) into plain JSON values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Bracket):
        return {"value": to_jsonable(obj.value), "lower": to_jsonable(obj.lower),
                "upper": to_jsonable(obj.upper), "method": obj.method,
                "points": to_jsonable([np.asarray(p) for p in obj.points])}
    if isinstance(obj, NormSpec):
        return obj.to_dict()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2) + "\n"


def flatten(data, prefix: str = "") -> list[tuple[str, object]]:
    """``(dotted key, scalar)`` rows of a JSON-like value, in sorted key order."""
    rows = []
    if isinstance(data, dict):
        for k in sorted(data):
            rows.extend(flatten(data[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(data, list):
        for i, v in enumerate(data):
            rows.extend(flatten(v, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, data))
    return rows


def make_report(command: str, scene, results, seed: int) -> dict:
    return {"command": command, "scene_digest": scene.digest(), "seed": seed,
            "version": tool_version(), "results": to_jsonable(results)}


def csv_summary(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in flatten(report):
        writer.writerow([key, value])
    return buf.getvalue()


def plot_data(series: dict) -> str:
    """Whitespace-delimited blocks, one per named point series, separated by blank lines."""
    out = []
    for name in sorted(series):
        pts = np.atleast_2d(np.asarray(series[name], dtype=float))
        out.append(f"# {name}")
        for row in pts:
            out.append(" ".join("%.12g" % v for v in row))
        out.append("")
        out.append("")
    return "\n".join(out)


def write_outputs(report: dict, fmt: str, out: Path | None, series=None, timings=None,
                  figure=None) -> list[Path]:
    """Write the report in the chosen format; with ``out=None`` print to stdout instead."""
    text = {"json": dumps, "csv": csv_summary}.get(fmt, dumps)(report) if fmt != "plot" else \
        plot_data(series or {})
    if out is None:
        print(text, end="")
        return []
    out.mkdir(parents=True, exist_ok=True)
    written = []
    name = {"json": "report.json", "csv": "summary.csv", "plot": "plot.dat"}[fmt]
    (out / name).write_text(text)
    written.append(out / name)
    if fmt == "plot":
        (out / "report.json").write_text(dumps(report))
        written.append(out / "report.json")
        if figure is not None:
            figure(out / "plot.png")
            written.append(out / "plot.png")
    if timings is not None:
        (out / "timings.json").write_text(json.dumps(timings, sort_keys=True, indent=2) + "\n")
        written.append(out / "timings.json")
    return written
