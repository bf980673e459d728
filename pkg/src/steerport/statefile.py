"""JSON state files.

Four document types are accepted::

    {"type": "density_matrix", "qubits": 2, "matrix": [[{"re": .., "im": ..}, ...], ...]}
    {"type": "x_state", "a": .., "b": .., "c": .., "d": .., "w": {"re", "im"}, "z": {"re", "im"}}
    {"type": "mems", "lambdas": [l1, l2, l3, l4]}
    {"type": "three_qubit_pure", "alphas": [a0, .., a4], "theta": t}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .qmat import validate_density
from .states import (
    MemsParams,
    ThreeQubitPure,
    XStateParams,
    is_x_form,
    mems_state,
    x_params_from_matrix,
    x_state,
)

STATE_TYPES = ("density_matrix", "x_state", "mems", "three_qubit_pure")


class StateFileError(ValueError):
    pass


@dataclass(frozen=True)
class ParsedState:
    kind: str
    rho: np.ndarray | None = None
    x: XStateParams | None = None
    three: ThreeQubitPure | None = None

    @property
    def two_qubit(self) -> bool:
        return self.rho is not None


def _complex(v, what: str) -> complex:
    if not isinstance(v, dict) or set(v) != {"re", "im"}:
        raise StateFileError(f"{what}: expected an object with keys 're' and 'im'")
    try:
        return complex(float(v["re"]), float(v["im"]))
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{what}: re/im must be numbers") from exc


def _float(doc: dict, key: str) -> float:
    if key not in doc:
        raise StateFileError(f"missing field {key!r}")
    try:
        return float(doc[key])
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"field {key!r} must be a number") from exc


def _floats(doc: dict, key: str, n: int) -> list[float]:
    vals = doc.get(key)
    if not isinstance(vals, list) or len(vals) != n:
        raise StateFileError(f"field {key!r} must be a list of {n} numbers")
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"field {key!r} must contain numbers") from exc


def parse_state(doc: dict) -> ParsedState:
    if not isinstance(doc, dict):
        raise StateFileError("state file must hold a JSON object")
    kind = doc.get("type")
    if kind not in STATE_TYPES:
        raise StateFileError(f"field 'type' must be one of {STATE_TYPES}, got {kind!r}")
    try:
        if kind == "density_matrix":
            if doc.get("qubits") != 2:
                raise StateFileError("density_matrix: 'qubits' must be 2")
            rows = doc.get("matrix")
            if not isinstance(rows, list) or len(rows) != 4 or any(
                not isinstance(r, list) or len(r) != 4 for r in rows
            ):
                raise StateFileError("density_matrix: 'matrix' must be 4 rows of 4 entries")
            rho = np.array(
                [[_complex(v, f"matrix[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
            )
            rho = validate_density(rho, dims=(4,))
            x = x_params_from_matrix(rho) if is_x_form(rho) else None
            return ParsedState(kind, rho=rho, x=x)
        if kind == "x_state":
            x = XStateParams(
                _float(doc, "a"), _float(doc, "b"), _float(doc, "c"), _float(doc, "d"),
                _complex(doc.get("w"), "w"), _complex(doc.get("z"), "z"),
            )
            return ParsedState(kind, rho=x_state(x), x=x)
        if kind == "mems":
            p = MemsParams(tuple(_floats(doc, "lambdas", 4)))
            rho = mems_state(p)
            return ParsedState(kind, rho=rho, x=x_params_from_matrix(rho))
        t = ThreeQubitPure(tuple(_floats(doc, "alphas", 5)), _float(doc, "theta"))
        return ParsedState(kind, three=t)
    except StateFileError:
        raise
    except ValueError as exc:
        # invariant violations from the state types carry the invariant in the message
        raise StateFileError(str(exc)) from exc


def load_state(path: str | Path) -> ParsedState:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_state(doc)


def density_to_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "type": "density_matrix",
        "qubits": 2,
        "matrix": [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in rho],
    }


def state_to_dict(obj) -> dict:
    """Serialize a state object (params dataclass or 4x4 array) to a state-file document."""
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return density_to_dict(obj)


def dump_state(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(obj), indent=2) + "\n")
