"""Report containers and deterministic JSON/CSV serialisation."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np


def fmt(x: float) -> str:
    """17 significant digits, lowercase exponent (round-trips doubles)."""
    return format(float(x), ".17g")


def eigenvalue_labels(kind: str, count: int) -> list[str]:
    if kind == "per+":
        labels = ["lambda_0"] + [f"lambda_{n}^{s}" for n in range(2, 2 * count + 2, 2) for s in "-+"]
    elif kind == "per-":
        labels = [f"lambda_{n}^{s}" for n in range(1, 2 * count + 2, 2) for s in "-+"]
    elif kind == "dir":
        labels = [f"mu_{n}" for n in range(1, count + 1)]
    else:
        labels = [f"theta_{j}" for j in range(count)]
    return labels[:count]


def jsonable(obj):
    """Convert numpy/complex containers into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


@dataclass
class SpectrumReport:
    bc: str
    engine: str
    eigenvalues: np.ndarray
    residuals: np.ndarray
    K: int | None
    tol: float
    labels: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "bc": self.bc,
            "engine": self.engine,
            "K": self.K,
            "tol": self.tol,
            "eigenvalues": [
                {"label": lab, "re": float(z.real), "im": float(z.imag), "residual": float(r)}
                for lab, z, r in zip(self.labels, self.eigenvalues, self.residuals)
            ],
            "notes": list(self.notes),
        }
