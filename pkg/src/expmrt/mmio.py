"""Minimal Matrix Market I/O: coordinate matrices and array-format vectors.

Readers are strict and report failures with the 1-based line number.
Matrices must be ``coordinate`` with field ``real`` or ``integer`` and
symmetry ``general`` or ``symmetric`` (lower triangle stored, expanded on
read); duplicate entries are summed.  Vectors are single-column ``array``
files.  The vector writer serializes at 17 significant digits, which
round-trips IEEE doubles bitwise.
"""

import numpy as np
import scipy.sparse

from .errors import MatrixMarketError

_FIELDS = ("real", "integer")
_SYMMETRIES = ("general", "symmetric")


def _lines(path):
    with open(path, encoding="ascii") as fh:
        return fh.read().splitlines()


def _parse_header(path, lines, want_format):
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")
    parts = lines[0].split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket":
        raise MatrixMarketError(path, 1, "malformed Matrix Market header")
    _, obj, fmt, field, symmetry = (p.lower() for p in parts)
    if obj != "matrix":
        raise MatrixMarketError(path, 1, f"unsupported object {obj!r}")
    if fmt != want_format:
        raise MatrixMarketError(
            path, 1, f"expected {want_format!r} format, got {fmt!r}"
        )
    if field not in _FIELDS:
        raise MatrixMarketError(path, 1, f"unsupported field {field!r}")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(path, 1, f"unsupported symmetry {symmetry!r}")
    return field, symmetry


def _content_lines(lines):
    """Yield (1-based line number, stripped text) skipping comments/blanks."""
    for idx, raw in enumerate(lines[1:], start=2):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        yield idx, text


def _parse_number(path, lineno, token, field):
    try:
        if field == "integer":
            return float(int(token))
        return float(token)
    except ValueError:
        raise MatrixMarketError(
            path, lineno, f"invalid {field} value {token!r}"
        ) from None


def read_matrix(path):
    """Read a coordinate Matrix Market file into CSR form.

    Symmetric files (lower triangle stored) are expanded.  Raises
    MatrixMarketError with the offending line on any structural problem.
    """
    lines = _lines(path)
    field, symmetry = _parse_header(path, lines, "coordinate")
    content = _content_lines(lines)

    try:
        lineno, text = next(content)
    except StopIteration:
        raise MatrixMarketError(path, len(lines) + 1, "missing size line") from None
    parts = text.split()
    if len(parts) != 3:
        raise MatrixMarketError(path, lineno, "size line must be 'rows cols nnz'")
    try:
        nrows, ncols, nnz = (int(p) for p in parts)
    except ValueError:
        raise MatrixMarketError(path, lineno, "size line must be integers") from None
    if nrows < 1 or ncols < 1 or nnz < 0:
        raise MatrixMarketError(path, lineno, "size line out of range")
    if symmetry == "symmetric" and nrows != ncols:
        raise MatrixMarketError(path, lineno, "symmetric matrix must be square")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    count = 0
    for lineno, text in content:
        if count >= nnz:
            raise MatrixMarketError(
                path, lineno, f"more than the declared {nnz} entries"
            )
        parts = text.split()
        if len(parts) != 3:
            raise MatrixMarketError(path, lineno, "entry must be 'row col value'")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixMarketError(path, lineno, "indices must be integers") from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise MatrixMarketError(path, lineno, f"index ({i}, {j}) out of range")
        if symmetry == "symmetric" and i < j:
            raise MatrixMarketError(
                path, lineno, "symmetric file stores the lower triangle only"
            )
        rows[count] = i - 1
        cols[count] = j - 1
        vals[count] = _parse_number(path, lineno, parts[2], field)
        count += 1
    if count != nnz:
        raise MatrixMarketError(
            path, len(lines), f"declared {nnz} entries, found {count}"
        )

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    coo = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols))
    return coo.tocsr()


def read_vector(path):
    """Read a single-column array-format Matrix Market file."""
    lines = _lines(path)
    field, symmetry = _parse_header(path, lines, "array")
    if symmetry != "general":
        raise MatrixMarketError(path, 1, "vector files must be general")
    content = _content_lines(lines)

    try:
        lineno, text = next(content)
    except StopIteration:
        raise MatrixMarketError(path, len(lines) + 1, "missing size line") from None
    parts = text.split()
    if len(parts) != 2:
        raise MatrixMarketError(path, lineno, "size line must be 'rows cols'")
    try:
        nrows, ncols = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixMarketError(path, lineno, "size line must be integers") from None
    if ncols != 1:
        raise MatrixMarketError(path, lineno, "expected a single-column vector")
    if nrows < 1:
        raise MatrixMarketError(path, lineno, "size line out of range")

    out = np.empty(nrows, dtype=np.float64)
    count = 0
    for lineno, text in content:
        if count >= nrows:
            raise MatrixMarketError(
                path, lineno, f"more than the declared {nrows} values"
            )
        if len(text.split()) != 1:
            raise MatrixMarketError(path, lineno, "expected one value per line")
        out[count] = _parse_number(path, lineno, text, field)
        count += 1
    if count != nrows:
        raise MatrixMarketError(
            path, len(lines), f"declared {nrows} values, found {count}"
        )
    return out


def write_vector(path, v):
    """Write a vector in array format at 17 significant digits.

    A written vector read back with :func:`read_vector` is bitwise equal.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{v.shape[0]} 1\n")
        for x in v:
            fh.write(f"{x:.17g}\n")


def write_matrix(path, matrix):
    """Write a sparse matrix in coordinate format (general, column-major)."""
    coo = scipy.sparse.coo_matrix(matrix)
    order = np.lexsort((coo.row, coo.col))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for k in order:
            fh.write(f"{coo.row[k] + 1} {coo.col[k] + 1} {coo.data[k]:.17g}\n")
