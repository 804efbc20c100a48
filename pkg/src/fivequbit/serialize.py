"""JSON helpers: complex numbers travel as ``[re, im]`` pairs."""
from __future__ import annotations

import json
from typing import Any

import numpy as np

SCHEMA_VERSION = "1.0"


def real(x: float) -> float:
    # +0.0 folds negative zero
    return float(x) + 0.0


def cpair(z: complex) -> list[float]:
    z = complex(z)
    return [real(z.real), real(z.imag)]


def cvec(values) -> list[list[float]]:
    return [cpair(z) for z in np.asarray(values).reshape(-1)]


def terms(pairs) -> list[dict]:
    return [{"bits": b, "amp": cpair(a)} for b, a in pairs]


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
