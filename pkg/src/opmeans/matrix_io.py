"""JSON encoding of matrices and vectors, plus the CLI's scalar shorthands.

Wire format: ``{"dim": n, "re": [[...]], "im": [[...]]}`` with ``im`` omitted
when every imaginary part is zero. Vectors use the same keys with flat lists.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .hermitian import hermitian


def _clean(x: float) -> float:
    # JSON has no -0.0 worth preserving
    return 0.0 if x == 0 else float(x)


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        out = {"dim": int(a.shape[0]), "re": [_clean(v) for v in a.real]}
        if np.any(a.imag != 0):
            out["im"] = [_clean(v) for v in a.imag]
        return out
    out = {"dim": int(a.shape[0]), "re": [[_clean(v) for v in row] for row in a.real]}
    if np.any(a.imag != 0):
        out["im"] = [[_clean(v) for v in row] for row in a.imag]
    return out


def matrix_from_json(obj) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; also accepts bare nested lists."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, (int, float)):
        return np.array([[obj]], dtype=complex)
    if isinstance(obj, list):
        return np.array(obj, dtype=complex)
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError("matrix JSON needs a 're' field")
    re_ = np.array(obj["re"], dtype=float)
    im = np.array(obj.get("im", np.zeros_like(re_)), dtype=float)
    if re_.shape != im.shape:
        raise ValueError("'re' and 'im' shapes differ")
    out = re_ + 1j * im
    dim = obj.get("dim")
    if dim is not None and out.shape[0] != dim:
        raise ValueError(f"'dim' is {dim} but data has {out.shape[0]} rows")
    return out


_DIAG = re.compile(r"^diag\((.*)\)$")
_IDENT = re.compile(r"^([-+0-9.eE]*)\*?I$")


def parse_matrix(text: str, dim: int | None = None) -> np.ndarray:
    """Parse a CLI matrix argument.

    Accepts a path to a JSON file, inline JSON, a plain number (1x1), ``diag(a,b,...)``,
    and ``I``/``cI`` (identity of size ``dim``, default 1).
    """
    text = text.strip()
    if not text.startswith(("{", "[")) and Path(text).is_file():
        text = Path(text).read_text().strip()
    m = _DIAG.match(text)
    if m:
        vals = [float(v) for v in m.group(1).split(",") if v.strip()]
        if not vals:
            raise ValueError("diag() needs at least one entry")
        return np.diag(vals).astype(complex)
    m = _IDENT.match(text)
    if m:
        coef = m.group(1)
        c = float(coef) if coef not in ("", "+", "-") else float(coef + "1")
        return c * np.eye(dim or 1, dtype=complex)
    try:
        value = float(text)
    except ValueError:
        pass
    else:
        if not math.isfinite(value):
            raise ValueError(f"non-finite scalar {text!r}")
        return np.array([[value]], dtype=complex)
    return matrix_from_json(json.loads(text))


def is_identity_shorthand(text: str) -> bool:
    return bool(_IDENT.match(text.strip()))


def parse_hermitian(text: str, dim: int | None = None) -> np.ndarray:
    return hermitian(parse_matrix(text, dim))
