"""JSON interchange for matrices, vectors and report payloads.

Complex scalars are encoded as ``[re, im]`` pairs. A matrix is the object
``{"rows": r, "cols": c, "entries": [[re, im], ...]}`` in row-major order.
Python's float repr is shortest-round-trip, so finite doubles survive a
dump/load cycle bit for bit.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np
import numpy.typing as npt


def _pair(z: complex) -> list[float]:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite value cannot be serialized")
    return [float(z.real), float(z.imag)]


def _unpair(p: Any, where: str) -> complex:
    if isinstance(p, (int, float)) and not isinstance(p, bool):
        return complex(float(p), 0.0)
    if not (isinstance(p, (list, tuple)) and len(p) == 2):
        raise ValueError(f"{where}: expected [re, im] pair, got {p!r}")
    re, im = p
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (int, float)) or not math.isfinite(part):
            raise ValueError(f"{where}: invalid number {part!r}")
    return complex(float(re), float(im))


def matrix_to_json(M: npt.ArrayLike) -> dict[str, Any]:
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("matrix must be 2-D")
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [_pair(z) for z in A.ravel()],
    }


def matrix_from_json(obj: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object with rows/cols/entries")
    try:
        r, c, entries = obj["rows"], obj["cols"], obj["entries"]
    except KeyError as exc:
        raise ValueError(f"{where}: missing key {exc.args[0]!r}") from None
    if not (isinstance(r, int) and isinstance(c, int)) or r < 0 or c < 0:
        raise ValueError(f"{where}: rows and cols must be nonnegative integers")
    if not isinstance(entries, list) or len(entries) != r * c:
        raise ValueError(f"{where}: expected {r * c} entries")
    vals = [_unpair(p, f"{where}.entries[{i}]") for i, p in enumerate(entries)]
    return np.array(vals, dtype=np.complex128).reshape(r, c)


def vector_to_json(v: npt.ArrayLike) -> list[list[float]]:
    return [_pair(z) for z in np.asarray(v, dtype=np.complex128).ravel()]


def vector_from_json(obj: Any, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, list):
        raise ValueError(f"{where}: expected a list of [re, im] pairs")
    return np.array([_unpair(p, f"{where}[{i}]") for i, p in enumerate(obj)], dtype=np.complex128)


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy values into JSON-ready structures."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return matrix_to_json(obj)
        if np.iscomplexobj(obj):
            return vector_to_json(obj)
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(obj)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
