"""JSON and CSV serialization of parameters, results and run records.

Floats are written with Python's shortest round-trip representation, so
every value reads back bit-for-bit.  Complex numbers and matrices are stored
as ``[re, im]`` pairs (matrices row-major).
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .optimizer import OptimizationResult
from .parametrization import ParameterVector

SCHEMA_VERSION = 1


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    return complex(pair[0], pair[1])


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    return np.array([[decode_complex(p) for p in row] for row in rows], dtype=complex)


def result_to_dict(r: OptimizationResult) -> dict:
    a, b, c = r.elements
    return {
        "params": r.params.to_dict(),
        "concurrence": r.concurrence,
        "assistance": r.assistance,
        "elements": {"A": float(a), "B": encode_complex(b), "C": encode_complex(c)},
        "purity12": r.purity12,
        "purity1": r.purity1,
        "purity123": r.purity123,
        "bloch_length_sq": r.bloch_length_sq,
        "next_nearest_concurrence": r.next_nearest_concurrence,
        "evals": r.evals,
        "converged": r.converged,
        "line_search_failed": r.line_search_failed,
        "seed": r.seed,
        "trace": [[int(e), float(v)] for e, v in r.trace],
        "runs": r.runs,
    }


def result_from_dict(d: dict) -> OptimizationResult:
    el = d["elements"]
    return OptimizationResult(
        params=ParameterVector.from_dict(d["params"]),
        concurrence=d["concurrence"],
        assistance=d["assistance"],
        elements=(el["A"], decode_complex(el["B"]), decode_complex(el["C"])),
        purity12=d["purity12"],
        purity1=d["purity1"],
        purity123=d["purity123"],
        bloch_length_sq=d["bloch_length_sq"],
        next_nearest_concurrence=d["next_nearest_concurrence"],
        evals=d.get("evals", 0),
        converged=d.get("converged", False),
        line_search_failed=d.get("line_search_failed", False),
        seed=d.get("seed"),
        trace=[tuple(t) for t in d.get("trace", [])],
        runs=d.get("runs", []),
    )


@dataclass
class RunRecord:
    command: str
    inputs: dict
    outputs: dict
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    created: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        if "schema_version" not in d:
            raise ValueError("missing schema_version")
        if d["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d['schema_version']}")
        return cls(
            command=d["command"],
            inputs=d["inputs"],
            outputs=d["outputs"],
            schema_version=d["schema_version"],
            tool_version=d.get("tool_version", ""),
            created=d.get("created", ""),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def read(cls, path) -> "RunRecord":
        return cls.from_dict(json.loads(Path(path).read_text()))


def load_params(path) -> ParameterVector:
    """Read a parameter file, or the parameters stored inside a run record."""
    d = json.loads(Path(path).read_text())
    if "schema_version" in d:
        d = RunRecord.from_dict(d).outputs["params"]
    return ParameterVector.from_dict(d)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_trace(path, trace) -> None:
    write_csv(path, ["eval", "value"], [(int(e), repr(float(v))) for e, v in trace])
