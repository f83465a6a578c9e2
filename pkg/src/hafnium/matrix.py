"""Dense complex symmetric matrices: validation, pair operations, file I/O.

Vertices are 0-based; pair i couples rows/columns (2i, 2i+1). Matrices are
stored row-major as numpy complex128 arrays and frozen after validation so
they can be shared freely across threads.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricInput,
    DimensionMismatch,
    NonSquare,
    OddDimension,
    ParseError,
)

SYMMETRY_RTOL = 1e-12

_BINARY_MAGIC = b"HAFM1"
_BINARY_MAGIC_RECT = b"HAFG1"


@dataclass(frozen=True)
class ComplexSymmetricMatrix:
    """n x n complex matrix with exact entry[i,j] == entry[j,i].

    Construct through :func:`validate_or_symmetrize`; the lower triangle is
    mirrored from the upper one so downstream arithmetic never sees
    rounding-level asymmetry.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def array(self) -> np.ndarray:
        """Writable copy of the entries."""
        return self.entries.copy()


@dataclass(frozen=True)
class PairSubset:
    """Bitmask over the n/2 row/column pairs; bit i selects pair (2i, 2i+1)."""

    mask: int
    width: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.width):
            raise ValueError(f"mask {self.mask:#x} does not fit in {self.width} bits")

    @property
    def cardinality(self) -> int:
        return bin(self.mask).count("1")

    def pair_indices(self) -> list[int]:
        return [i for i in range(self.width) if self.mask >> i & 1]

    def vertex_indices(self) -> np.ndarray:
        """Sorted vertex indices {2i, 2i+1 : i in subset}."""
        idx = np.empty(2 * self.cardinality, dtype=np.int64)
        j = 0
        for i in self.pair_indices():
            idx[j] = 2 * i
            idx[j + 1] = 2 * i + 1
            j += 2
        return idx

    @classmethod
    def full(cls, width: int) -> "PairSubset":
        return cls((1 << width) - 1, width)


def _as_array(raw) -> np.ndarray:
    a = np.asarray(raw, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    return a


def validate_or_symmetrize(raw, mode: str = "strict") -> ComplexSymmetricMatrix:
    """Validate symmetry (strict) or average with the transpose (auto).

    Strict mode accepts iff max|raw - raw^T| <= 1e-12 * max(1, max|raw|) and
    then mirrors the upper triangle onto the lower one exactly.
    """
    a = _as_array(raw)
    if mode == "auto":
        a = (a + a.T) / 2
    elif mode == "strict":
        if a.size:
            dev = np.abs(a - a.T).max()
            tol = SYMMETRY_RTOL * max(1.0, float(np.abs(a).max()))
            if dev > tol:
                raise AsymmetricInput(
                    f"max|A - A^T| = {dev:.3e} exceeds tolerance {tol:.3e}"
                )
        a = a.copy()
        iu = np.triu_indices(a.shape[0], k=1)
        a[(iu[1], iu[0])] = a[iu]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ComplexSymmetricMatrix(np.ascontiguousarray(a))


def coerce(A, mode: str = "strict") -> ComplexSymmetricMatrix:
    """Accept a ComplexSymmetricMatrix or anything array-like."""
    if isinstance(A, ComplexSymmetricMatrix):
        return A
    return validate_or_symmetrize(A, mode=mode)


def pair_swap_matrix(n: int) -> np.ndarray:
    """The block-diagonal exchange matrix: 2x2 [[0,1],[1,0]] blocks."""
    if n % 2:
        raise OddDimension(f"pair swap needs even dimension, got {n}")
    x = np.zeros((n, n), dtype=np.complex128)
    for i in range(0, n, 2):
        x[i, i + 1] = 1.0
        x[i + 1, i] = 1.0
    return x


def pair_swap(A) -> np.ndarray:
    """Rows 2i and 2i+1 exchanged for every pair i (left-multiplication by
    the exchange matrix)."""
    a = A.entries if isinstance(A, ComplexSymmetricMatrix) else np.asarray(A, dtype=np.complex128)
    n = a.shape[0]
    if n % 2:
        raise OddDimension(f"pair swap needs even dimension, got {n}")
    perm = np.arange(n)
    perm[0::2] += 1
    perm[1::2] -= 1
    return np.ascontiguousarray(a[perm])


def pair_submatrix(M, Z: PairSubset) -> np.ndarray:
    """Square submatrix on the rows/columns of the selected pairs, ascending."""
    a = M.entries if isinstance(M, ComplexSymmetricMatrix) else np.asarray(M, dtype=np.complex128)
    idx = Z.vertex_indices()
    if idx.size and idx[-1] >= a.shape[0]:
        raise DimensionMismatch(
            f"pair subset selects index {int(idx[-1])} beyond size {a.shape[0]}"
        )
    return np.ascontiguousarray(a[np.ix_(idx, idx)])


def split_diag_offdiag(A) -> tuple[np.ndarray, np.ndarray]:
    """(diagonal vector, matrix with exact zero diagonal); parts sum to A."""
    a = A.entries if isinstance(A, ComplexSymmetricMatrix) else np.asarray(A, dtype=np.complex128)
    v = np.ascontiguousarray(np.diag(a))
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return v, off


# ---------------------------------------------------------------------------
# File I/O.  Text: header line "n" (or "rows cols" for rectangular factors),
# then one line per row with alternating "re im" per entry; '#' starts a
# comment.  Binary: magic HAFM1 (HAFG1 rectangular), little-endian u64
# dimension(s), then f64 (re, im) pairs row-major.  JSON: {"n", "re", "im"}.
# ---------------------------------------------------------------------------


def _parse_text(text: str, path: str):
    rows = []
    header = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) not in (1, 2):
                raise ParseError(f"{path}: header must be 'n' or 'rows cols'", line=lineno)
            try:
                header = tuple(int(p) for p in parts)
            except ValueError:
                raise ParseError(f"{path}: non-integer header", line=lineno) from None
            if any(h < 0 for h in header):
                raise ParseError(f"{path}: negative dimension in header", line=lineno)
            continue
        nrows = header[0]
        ncols = header[1] if len(header) == 2 else header[0]
        if len(rows) == nrows:
            raise ParseError(f"{path}: more than {nrows} data rows", line=lineno)
        if len(parts) != 2 * ncols:
            raise DimensionMismatch(
                f"{path}: line {lineno}: expected {2 * ncols} floats, got {len(parts)}"
            )
        vals = np.empty(ncols, dtype=np.complex128)
        for c in range(ncols):
            try:
                re = float(parts[2 * c])
                im = float(parts[2 * c + 1])
            except ValueError:
                raise ParseError(f"{path}: bad float", line=lineno, column=2 * c + 1) from None
            vals[c] = complex(re, im)
        rows.append(vals)
    if header is None:
        raise ParseError(f"{path}: empty file", line=1)
    nrows = header[0]
    ncols = header[1] if len(header) == 2 else header[0]
    if len(rows) != nrows:
        raise DimensionMismatch(f"{path}: declared {nrows} rows, found {len(rows)}")
    if nrows == 0:
        return np.zeros((0, ncols), dtype=np.complex128)
    return np.vstack(rows)


def _format_text(a: np.ndarray, rectangular: bool) -> str:
    rows, cols = a.shape
    head = f"{rows} {cols}" if rectangular else f"{rows}"
    lines = [head]
    for r in range(rows):
        parts = []
        for c in range(cols):
            parts.append(f"{a[r, c].real:.17g} {a[r, c].imag:.17g}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _read_binary(blob: bytes, path: str) -> np.ndarray:
    if blob[:5] == _BINARY_MAGIC:
        off = 5
        if len(blob) < off + 8:
            raise ParseError(f"{path}: truncated binary header")
        (n,) = struct.unpack_from("<Q", blob, off)
        rows = cols = n
        off += 8
    elif blob[:5] == _BINARY_MAGIC_RECT:
        off = 5
        if len(blob) < off + 16:
            raise ParseError(f"{path}: truncated binary header")
        rows, cols = struct.unpack_from("<QQ", blob, off)
        off += 16
    else:
        raise ParseError(f"{path}: bad magic bytes {blob[:5]!r}")
    want = rows * cols * 16
    if len(blob) - off != want:
        raise DimensionMismatch(
            f"{path}: payload is {len(blob) - off} bytes, expected {want}"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=off)
    return (flat[0::2] + 1j * flat[1::2]).reshape(rows, cols).astype(np.complex128)


def _write_binary(a: np.ndarray, rectangular: bool) -> bytes:
    rows, cols = a.shape
    if rectangular:
        head = _BINARY_MAGIC_RECT + struct.pack("<QQ", rows, cols)
    else:
        head = _BINARY_MAGIC + struct.pack("<Q", rows)
    flat = np.empty(rows * cols * 2, dtype="<f8")
    flat[0::2] = a.real.ravel()
    flat[1::2] = a.imag.ravel()
    return head + flat.tobytes()


def _read_json(text: str, path: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    try:
        n = obj["n"]
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad JSON matrix object ({exc})") from None
    if re.shape != im.shape or re.ndim != 2:
        raise DimensionMismatch(f"{path}: re/im shapes differ or are not 2-D")
    if re.shape[0] != n:
        raise DimensionMismatch(f"{path}: declared n={n}, found {re.shape[0]} rows")
    return re + 1j * im


def read_array(path, format: str = "auto") -> np.ndarray:
    """Read a complex matrix (possibly rectangular) without symmetry checks."""
    path = str(path)
    if format == "auto":
        format = _guess_format(path)
    if format == "binary":
        with open(path, "rb") as fh:
            return _read_binary(fh.read(), path)
    with open(path, "r") as fh:
        text = fh.read()
    if format == "json":
        return _read_json(text, path)
    if format == "text":
        return _parse_text(text, path)
    raise ValueError(f"unknown format {format!r}")


def read_matrix(path, format: str = "auto", mode: str = "strict") -> ComplexSymmetricMatrix:
    a = read_array(path, format=format)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{path}: expected square matrix, got {a.shape}")
    return validate_or_symmetrize(a, mode=mode)


def write_matrix(A, path, format: str = "auto") -> None:
    a = A.entries if isinstance(A, ComplexSymmetricMatrix) else np.asarray(A, dtype=np.complex128)
    path = str(path)
    if format == "auto":
        format = _guess_format(path)
    rectangular = a.shape[0] != a.shape[1]
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(_write_binary(a, rectangular))
    elif format == "json":
        obj = {"n": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}
        with open(path, "w") as fh:
            json.dump(obj, fh)
            fh.write("\n")
    elif format == "text":
        with open(path, "w") as fh:
            fh.write(_format_text(a, rectangular))
    else:
        raise ValueError(f"unknown format {format!r}")


def _guess_format(path: str) -> str:
    if path.endswith((".bin", ".hafm")):
        return "binary"
    if path.endswith(".json"):
        return "json"
    return "text"
