"""
File writers for run outputs.

Floats are written with ``%.17g`` and every table has a fixed column order, so
two runs with the same configuration produce byte-identical files.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
from scipy import sparse

from ..numerics.hyperbolic import Lattice
from ..numerics.operators import OperatorMatrix
from ..numerics.spectra import Spectrum
from .errors import ParameterError

NORM_COLUMNS = ("symbol", "functional", "p", "alpha", "gamma", "clip", "value", "err", "oracle")
SPECTRUM_COLUMNS = ("index", "sigma")
LATTICE_COLUMNS = ("ring", "index", "re", "im")
TRIPLET_COLUMNS = ("row", "col", "re", "im")


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(col)) for col in columns])
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(data), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return path


# -------------------- matrices --------------------


def write_matrix_npy(path: Path, m: OperatorMatrix) -> Path:
    """Dense little-endian complex128 in C order (NumPy format 1.0)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(m.dense(), dtype="<c16")
    with open(path, "wb") as f:
        np.lib.format.write_array(f, data, version=(1, 0), allow_pickle=False)
    return path


def matrix_triplets(m: OperatorMatrix) -> List[Dict[str, Any]]:
    """Nonzero entries as (row, col, re, im) in row-major order."""
    if m.is_sparse:
        coo = sparse.coo_matrix(m.entries)
        keep = coo.data != 0
        rows, cols, data = coo.row[keep], coo.col[keep], coo.data[keep]
        order = np.lexsort((cols, rows))
        rows, cols, data = rows[order], cols[order], data[order]
    else:
        dense = m.dense()
        rows, cols = np.nonzero(dense)
        data = dense[rows, cols]
    return [
        {"row": int(r), "col": int(c), "re": float(v.real), "im": float(v.imag)}
        for r, c, v in zip(rows, cols, np.asarray(data, dtype=complex))
    ]


def write_matrix_triplets(path: Path, m: OperatorMatrix) -> Path:
    return write_csv(path, TRIPLET_COLUMNS, matrix_triplets(m))


def write_matrix(path: Path, m: OperatorMatrix, fmt: str = "npy") -> Path:
    if fmt == "npy":
        return write_matrix_npy(path, m)
    if fmt == "csv":
        return write_matrix_triplets(path, m)
    raise ParameterError("matrix_format", f"expected npy or csv, got {fmt!r}")


# -------------------- spectra, lattices, norms --------------------


def write_spectrum(path: Path, spectrum: Spectrum) -> Path:
    rows = ({"index": i, "sigma": float(s)} for i, s in enumerate(spectrum.values))
    return write_csv(path, SPECTRUM_COLUMNS, rows)


def spectrum_summary(spectrum: Spectrum, orders: Sequence[float]) -> Dict[str, Any]:
    out: Dict[str, Any] = {"label": spectrum.label, "count": len(spectrum), "top": spectrum.top, "orders": {}}
    for p in orders:
        tail = spectrum.tail(p)
        out["orders"][format_cell(float(p))] = {
            "schatten_sum": spectrum.schatten_sum(p),
            "norm": spectrum.schatten_sum(p) ** (1.0 / p),
            "tail_bound": tail.bound,
            "tail_heuristic": tail.heuristic,
            "tail_method": tail.method,
        }
    return out


def write_lattice(path: Path, lattice: Lattice) -> Path:
    starts = np.cumsum(np.concatenate(([0], lattice.ring_counts)))[:-1] if lattice.ring_structured else None
    rows = []
    for i, z in enumerate(lattice.points):
        ring = int(np.searchsorted(starts, i, side="right") - 1) if starts is not None else -1
        rows.append({"ring": ring, "index": i, "re": float(z.real), "im": float(z.imag)})
    return write_csv(path, LATTICE_COLUMNS, rows)


def write_norm_table(path: Path, rows: Iterable[Dict[str, Any]]) -> Path:
    return write_csv(path, NORM_COLUMNS, rows)
