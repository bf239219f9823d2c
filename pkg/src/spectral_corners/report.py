"""Two-sided identity reports and their serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path

import numpy as np


@dataclass
class IdentityReport:
    """Both sides of an identity, computed independently, and their gap.

    ``passed`` compares the discrepancy selected by ``measure`` against
    ``tolerance + tail_bound``.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float
    measure: str = "abs"
    tail_bound: float = 0.0
    notes: dict = field(default_factory=dict)
    abs_discrepancy: float = field(init=False)
    rel_discrepancy: float = field(init=False)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.abs_discrepancy = abs(self.lhs - self.rhs)
        self.rel_discrepancy = _rel(self.abs_discrepancy, max(abs(self.lhs), abs(self.rhs)))

    @classmethod
    def from_residual(cls, name, lhs, rhs, residual, scale, tolerance, **kw):
        """Report where the discrepancy is a precomputed worst case, not ``|lhs - rhs|``."""
        rep = cls(name, lhs, rhs, tolerance, **kw)
        rep.abs_discrepancy = float(residual)
        rep.rel_discrepancy = _rel(residual, scale)
        return rep

    @property
    def discrepancy(self):
        return self.rel_discrepancy if self.measure == "rel" else self.abs_discrepancy

    @property
    def passed(self):
        return bool(self.discrepancy <= self.tolerance + self.tail_bound)

    def to_dict(self):
        notes = dict(self.notes)
        notes.update(name=self.name, measure=self.measure, tolerance=self.tolerance,
                     tail_bound=self.tail_bound, passed=self.passed)
        return {"lhs": self.lhs, "rhs": self.rhs,
                "abs_discrepancy": self.abs_discrepancy,
                "rel_discrepancy": self.rel_discrepancy,
                "notes": notes}


def _rel(num, den):
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return float(num) / float(den)


# --- JSON with fixed 17-digit floats ---------------------------------------

def _plain(obj):
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _encode(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format(obj, ".17g") if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(k) + ": ")
            _encode(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _encode(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(payload, indent=2):
    """Serialise with every float written to 17 significant digits."""
    out = []
    _encode(_plain(payload), out, indent, 0)
    return "".join(out) + "\n"


def to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def emit(payload, fmt="json", path=None, columns=None):
    """Render ``payload`` as json/csv/svg text and write it to ``path`` (or return it).

    ``svg`` payloads are already strings.  I/O failures are re-raised as
    OSError naming the path.
    """
    if fmt == "json":
        text = to_json(payload)
    elif fmt == "csv":
        if columns is None:
            raise ValueError("csv output needs a column list")
        text = to_csv(payload, columns)
    elif fmt == "svg":
        if not isinstance(payload, str):
            raise ValueError("svg output needs a rendered document")
        text = payload
    else:
        raise ValueError(f"unsupported format {fmt!r}")
    if path is None:
        return text
    p = Path(path)
    try:
        p.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {fmt} output to {p}: {exc.strerror or exc}") from exc
    return text
