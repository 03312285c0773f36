"""Deterministic serialization and the on-disk matrix cache.

JSON floats are written with 17 significant digits and exact rationals as
``"p/q"`` strings, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .fock_basis import GramMatrix, enumerate_basis
from .hamiltonian import HamiltonianMatrix, cached_gram, hamiltonian_matrix

CACHE_ENV = "SYMQM_CACHE"


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    s = f"{x:.17g}"
    return s if ("e" in s or "." in s) else s + ".0"


def fraction_text(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(fraction_text(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in seq]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text (17 significant digits, fractions as strings)."""
    return _encode(obj, indent, 0) + "\n"


def csv_text(header: list, rows: list) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(x) if isinstance(x, (float, np.floating)) else
                    fraction_text(x) if isinstance(x, Fraction) else x for x in r])
    return buf.getvalue()


# ----------------------------------------------------------------------
# matrix cache


def resolve_cache_dir(cache_dir=None) -> Path | None:
    """``SYMQM_CACHE`` overrides the argument; ``None`` disables caching."""
    env = os.environ.get(CACHE_ENV)
    chosen = env if env else cache_dir
    return Path(chosen) if chosen else None


def _cache_path(root: Path, kind: str, n: int, ncut: int) -> Path:
    return root / f"{kind}-N{n}-ncut{ncut}-v{__version__}.json"


def _write(path: Path, entries) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(dumps({"entries": [[fraction_text(x) for x in row] for row in entries]}))
    tmp.replace(path)


def _read(path: Path) -> tuple:
    data = json.loads(path.read_text())
    return tuple(tuple(Fraction(x) for x in row) for row in data["entries"])


def load_matrices(n: int, ncut: int, cache_dir=None) -> tuple:
    """Exact ``(H, S)`` for ``(n, ncut)``, read from or written to the cache."""
    root = resolve_cache_dir(cache_dir)
    basis = enumerate_basis(n, ncut)
    if root is None:
        return hamiltonian_matrix(basis), cached_gram(n, ncut)
    hp, sp = _cache_path(root, "hamiltonian", n, ncut), _cache_path(root, "gram", n, ncut)
    if hp.exists() and sp.exists():
        return HamiltonianMatrix(_read(hp), basis), GramMatrix(_read(sp), basis)
    h, s = hamiltonian_matrix(basis), cached_gram(n, ncut)
    _write(sp, s.entries)
    _write(hp, h.entries)
    return h, s
