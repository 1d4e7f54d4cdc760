"""Reports and their JSON / CSV serialisation.

Floats are always written with 17 significant digits (``%.17g``), so a
report's bytes depend only on its values.  Non-finite floats are written
as the tokens ``NaN``, ``Infinity`` and ``-Infinity``, which Python's
JSON reader accepts.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

CSV_COLUMNS = ("experiment", "function_name", "statistic", "value", "stderr", "n", "seed")


@dataclass(frozen=True)
class Row:
    function_name: str
    statistic: str
    value: float
    stderr: float | None = None
    n: int | None = None

    def as_dict(self) -> dict:
        return {"function_name": self.function_name, "statistic": self.statistic,
                "value": self.value, "stderr": self.stderr, "n": self.n}


@dataclass(frozen=True)
class Report:
    experiment: str
    config: dict
    rows: tuple
    seed: int
    version: str
    checks: dict = field(default_factory=dict)  # name -> bool
    meta: dict = field(default_factory=dict)
    wall_clock: float | None = None

    @property
    def passed(self) -> bool | None:
        if not self.checks:
            return None
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "passed": self.passed,
            "checks": self.checks,
            "meta": self.meta,
            "results": [r.as_dict() for r in self.rows],
            "wall_clock": self.wall_clock,
        }


def value_rows(name: str, stat: str, value, stderr=None, n=None) -> list[Row]:
    """One row for a real value, two (``_re``/``_im``) for a complex one."""
    if isinstance(value, complex):
        se = None if stderr is None else float(stderr)
        return [Row(name, stat + "_re", value.real, se, n), Row(name, stat + "_im", value.imag, se, n)]
    return [Row(name, stat, float(value), None if stderr is None else float(stderr), n)]


def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return "%.17g" % v


def _dump(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, complex):
        _dump({"re": obj.real, "im": obj.imag}, indent, level, out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(k)) + ": ")
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif hasattr(obj, "item"):  # numpy scalar
        _dump(obj.item(), indent, level, out)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    out: list[str] = []
    _dump(obj, indent, 0, out)
    return "".join(out) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for r in rep.rows:
            w.writerow([_csv_cell(v) for v in (rep.experiment, r.function_name, r.statistic, r.value, r.stderr, r.n, rep.seed)])
    return buf.getvalue()


def render(report, fmt: str = "json") -> str:
    """Text of one report, or of a list of reports (a JSON array / one CSV table)."""
    reports = report if isinstance(report, (list, tuple)) else [report]
    if fmt == "csv":
        return to_csv(reports)
    if fmt != "json":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(report, (list, tuple)):
        return dumps_json([r.as_dict() for r in reports])
    return dumps_json(report.as_dict())


def write_report(report, fmt: str = "json", path=None) -> str:
    text = render(report, fmt)
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as e:
            raise OSError(f"cannot write report to {path}: {e.strerror or e}") from e
    return text


def read_report(source) -> dict:
    """Parse a JSON report from a path or a string."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))):
        source = Path(source).read_text()
    return json.loads(source)
