"""Sparse symmetric graph operators, signals, and the I/O around them.

The operator type is a plain CSR matrix restricted to the symmetric case:
both triangles are stored explicitly, column indices are strictly
increasing within each row, and no explicit zeros are kept. Construction
validates all of that once, after which instances are immutable and safe
to share across threads.

Graph files come in two flavours: a whitespace edge list (``i j [w]``,
0-based, ``#`` comments) and Matrix Market coordinate format (symmetric,
real). Signals are one-value-per-line text files or generator specs such
as ``dirac:3``, ``normal:42``, ``const:0.5``.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .errors import ParseError

__all__ = [
    "SparseSymMatrix",
    "GraphSignal",
    "build_laplacian",
    "erdos_renyi",
    "load_graph",
    "load_signal",
    "save_edge_list",
]


def _digest(*arrays) -> str:
    h = hashlib.blake2b(digest_size=16)
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


class SparseSymMatrix:
    """Symmetric sparse matrix in CSR form.

    Parameters
    ----------
    n : int
        Dimension.
    row_ptr : array_like of int, shape (n + 1,)
        Row start offsets into ``col_idx`` / ``values``.
    col_idx : array_like of int
        Column indices, strictly increasing within each row.
    values : array_like of float
        Stored entries; explicit zeros are rejected.

    Notes
    -----
    Symmetry is checked at construction by a transpose compare, so every
    stored ``(i, j)`` entry must have a mirror ``(j, i)`` with a bitwise
    equal value. The backing arrays are marked read-only afterwards.
    """

    __slots__ = ("n", "row_ptr", "col_idx", "values", "_fp")

    def __init__(self, n, row_ptr, col_idx, values):
        n = int(n)
        row_ptr = np.array(row_ptr, dtype=np.int64)
        col_idx = np.array(col_idx, dtype=np.int64)
        values = np.array(values, dtype=np.float64)
        if n < 1:
            raise ValueError("matrix dimension must be >= 1")
        if row_ptr.shape != (n + 1,):
            raise ValueError("row_ptr must have length n + 1")
        if row_ptr[0] != 0 or row_ptr[-1] != values.size:
            raise ValueError("row_ptr must start at 0 and end at nnz")
        if np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing")
        if col_idx.shape != values.shape or col_idx.ndim != 1:
            raise ValueError("col_idx and values must be 1-d and equal length")
        if values.size:
            if col_idx.min() < 0 or col_idx.max() >= n:
                raise ValueError("column index out of range")
            if values.size > 1:
                # strictly increasing inside each row; row boundaries exempt
                inc = np.diff(col_idx) > 0
                starts = row_ptr[1:-1]
                starts = starts[(starts > 0) & (starts < values.size)]
                boundary = np.zeros(values.size - 1, dtype=bool)
                boundary[starts - 1] = True
                if np.any(~inc & ~boundary):
                    raise ValueError("column indices must be strictly increasing within a row")
            if np.any(values == 0.0):
                raise ValueError("explicit zero entries are not allowed")
        self.n = n
        self.row_ptr = row_ptr
        self.col_idx = col_idx
        self.values = values
        self._check_symmetry()
        for a in (row_ptr, col_idx, values):
            a.flags.writeable = False
        self._fp = None

    def _check_symmetry(self):
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_ptr))
        order = np.lexsort((rows, self.col_idx))
        if not (
            np.array_equal(self.col_idx[order], rows)
            and np.array_equal(rows[order], self.col_idx)
            and np.array_equal(self.values[order], self.values)
        ):
            raise ValueError("matrix is not symmetric")

    @classmethod
    def _from_parts_unchecked(cls, n, row_ptr, col_idx, values) -> "SparseSymMatrix":
        # internal fast path: caller guarantees the invariants
        m = object.__new__(cls)
        m.n = int(n)
        m.row_ptr = row_ptr
        m.col_idx = col_idx
        m.values = values
        for a in (row_ptr, col_idx, values):
            a.flags.writeable = False
        m._fp = None
        return m

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def fingerprint(self) -> str:
        """Hex digest of the full stored content (structure and values)."""
        if self._fp is None:
            self._fp = _digest(
                np.asarray([self.n], dtype=np.int64),
                self.row_ptr,
                self.col_idx,
                self.values,
            )
        return self._fp

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Multiply by a dense vector.

        Rows are accumulated independently with a fixed reduction order,
        so repeated calls with identical inputs are bit-identical.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got shape {x.shape}")
        out = np.zeros(self.n)
        if self.values.size == 0:
            return out
        prod = self.values * x[self.col_idx]
        counts = np.diff(self.row_ptr)
        nonempty = counts > 0
        out[nonempty] = np.add.reduceat(prod, self.row_ptr[:-1][nonempty])
        return out

    def scaled(self, alpha: float) -> "SparseSymMatrix":
        """Return a copy with every stored value multiplied by ``alpha``.

        ``alpha`` must be positive; structure is shared with the parent.
        """
        if not alpha > 0.0:
            raise ValueError("scale factor must be positive")
        if alpha == 1.0:
            return self
        return SparseSymMatrix._from_parts_unchecked(
            self.n, self.row_ptr, self.col_idx, self.values * alpha
        )

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
        a[rows, self.col_idx] = self.values
        return a

    def __repr__(self):
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"


class GraphSignal:
    """Dense vertex signal with cached aggregate statistics.

    The squared Euclidean norm and the plain component sum are computed
    once at construction and reused by the error-bound machinery.
    """

    __slots__ = ("values", "norm_sq", "component_sum", "_fp")

    def __init__(self, values):
        v = np.array(values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("signal must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal contains non-finite values")
        v.flags.writeable = False
        self.values = v
        self.norm_sq = float(v @ v)
        self.component_sum = float(np.sum(v))
        self._fp = None

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def fingerprint(self) -> str:
        if self._fp is None:
            self._fp = _digest(self.values)
        return self._fp

    def __repr__(self):
        return f"GraphSignal(n={self.n}, norm_sq={self.norm_sq:.6g})"


def _accumulate_edges(edges, n):
    """Canonicalize, validate, and sum duplicate undirected edges."""
    ii, jj, ww = [], [], []
    for idx, edge in enumerate(edges):
        if len(edge) == 2:
            i, j = edge
            w = 1.0
        elif len(edge) == 3:
            i, j, w = edge
        else:
            raise ValueError(f"edge #{idx}: expected (i, j) or (i, j, w)")
        i = int(i)
        j = int(j)
        w = float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge #{idx}: endpoint out of range for n={n}: ({i}, {j})")
        if i == j:
            raise ValueError(f"edge #{idx}: self-loop at node {i} is not allowed")
        if not (w > 0.0) or not np.isfinite(w):
            raise ValueError(f"edge #{idx}: weight must be positive and finite, got {w}")
        ii.append(min(i, j))
        jj.append(max(i, j))
        ww.append(w)
    if not ii:
        return (
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.float64),
        )
    lo = np.asarray(ii, dtype=np.int64)
    hi = np.asarray(jj, dtype=np.int64)
    w = np.asarray(ww, dtype=np.float64)
    key = lo * n + hi
    uniq, inverse = np.unique(key, return_inverse=True)
    wsum = np.bincount(inverse, weights=w, minlength=uniq.size)
    return uniq // n, uniq % n, wsum


def build_laplacian(edges, n: int, kind: str = "combinatorial") -> SparseSymMatrix:
    """Assemble a graph Laplacian from an undirected edge list.

    Parameters
    ----------
    edges : iterable of (i, j) or (i, j, weight)
        Undirected edges, 0-based endpoints, positive weights (default 1).
        Duplicate edges, in either orientation, are summed into one weight.
    n : int
        Number of nodes.
    kind : {"combinatorial", "normalized"}
        ``combinatorial`` is ``D - A``; ``normalized`` is
        ``I - D^{-1/2} A D^{-1/2}`` and requires every node to have at
        least one incident edge.

    Returns
    -------
    SparseSymMatrix
        Positive semi-definite operator. Rows of isolated nodes are empty
        under ``combinatorial`` (no explicit zeros are stored).
    """
    if kind not in ("combinatorial", "normalized"):
        raise ValueError(f"unknown laplacian kind: {kind!r}")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi, w = _accumulate_edges(edges, n)
    deg = np.zeros(n)
    np.add.at(deg, lo, w)
    np.add.at(deg, hi, w)
    if kind == "normalized":
        isolated = np.nonzero(deg == 0.0)[0]
        if isolated.size:
            raise ValueError(
                f"normalized laplacian undefined: node {int(isolated[0])} is isolated"
            )
        off = -w / np.sqrt(deg[lo] * deg[hi])
        diag_vals = np.ones(n)
        diag_idx = np.arange(n, dtype=np.int64)
    else:
        off = -w
        diag_idx = np.nonzero(deg > 0.0)[0].astype(np.int64)
        diag_vals = deg[diag_idx]
    rows = np.concatenate([lo, hi, diag_idx])
    cols = np.concatenate([hi, lo, diag_idx])
    vals = np.concatenate([off, off, diag_vals])
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    vals = vals[order]
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=row_ptr[1:])
    return SparseSymMatrix(n, row_ptr, cols, vals)


def erdos_renyi(n: int, p: float, seed: int):
    """Sample a G(n, p) edge list with unit weights.

    Every unordered pair is included independently with probability
    ``p``; the draw is deterministic for a given ``seed``. Disconnected
    samples are returned as-is.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n - 1):
        hits = np.nonzero(rng.random(n - 1 - i) < p)[0]
        base = i + 1
        for off in hits:
            edges.append((i, base + int(off), 1.0))
    return edges


_N_TOKEN = re.compile(r"(?:^|\s)n=(\d+)(?:\s|$)")


def _parse_edge_list(path, lines):
    edges = []
    declared_n = None
    max_idx = -1
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _N_TOKEN.search(line[1:])
            if m and declared_n is None:
                declared_n = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(path, line_no, f"expected 'i j [w]', got {line!r}")
        try:
            i = int(parts[0])
            j = int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(path, line_no, f"could not parse edge fields in {line!r}") from None
        if i < 0 or j < 0:
            raise ParseError(path, line_no, "node indices must be non-negative")
        if i == j:
            raise ParseError(path, line_no, f"self-loop at node {i} is not allowed")
        max_idx = max(max_idx, i, j)
        edges.append((i, j, w))
    n = declared_n if declared_n is not None else max_idx + 1
    if n < 1:
        raise ParseError(path, 1, "file declares no nodes")
    if max_idx >= n:
        raise ParseError(path, 1, f"node index {max_idx} exceeds declared n={n}")
    return edges, n


def _parse_matrix_market(path, lines):
    it = iter(enumerate(lines, start=1))
    try:
        line_no, header = next(it)
    except StopIteration:
        raise ParseError(path, 1, "empty file") from None
    fields = header.strip().lower().split()
    if (
        len(fields) < 5
        or fields[0] != "%%matrixmarket"
        or fields[1] != "matrix"
        or fields[2] != "coordinate"
    ):
        raise ParseError(path, line_no, "expected '%%MatrixMarket matrix coordinate ...' header")
    if fields[3] not in ("real", "integer", "pattern"):
        raise ParseError(path, line_no, f"unsupported field type {fields[3]!r}")
    if fields[4] != "symmetric":
        raise ParseError(path, line_no, "only symmetric matrices describe graphs here")
    pattern = fields[3] == "pattern"
    dims = None
    edges = []
    for line_no, raw in it:
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if dims is None:
            if len(parts) != 3:
                raise ParseError(path, line_no, "expected 'rows cols nnz' size line")
            r, c, _ = (int(p) for p in parts)
            if r != c:
                raise ParseError(path, line_no, f"matrix must be square, got {r}x{c}")
            dims = r
            continue
        expected = 2 if pattern else 3
        if len(parts) != expected:
            raise ParseError(path, line_no, f"expected {expected} fields, got {len(parts)}")
        i = int(parts[0]) - 1
        j = int(parts[1]) - 1
        w = 1.0 if pattern else float(parts[2])
        if i == j:
            raise ParseError(
                path, line_no, "diagonal entries are not edges; supply an adjacency pattern"
            )
        if not (0 <= i < dims and 0 <= j < dims):
            raise ParseError(path, line_no, "entry index out of declared range")
        edges.append((i, j, w))
    if dims is None:
        raise ParseError(path, 1, "missing size line")
    return edges, dims


def load_graph(path, fmt: str | None = None):
    """Load an undirected graph file.

    Parameters
    ----------
    path : str or Path
        Edge-list or Matrix Market file. The format is sniffed from the
        first line unless ``fmt`` is one of ``"edge-list"`` /
        ``"matrix-market"``.
    fmt : str, optional
        Force a specific parser.

    Returns
    -------
    (edges, n)
        Edge triples ``(i, j, w)`` and the node count. For edge lists,
        ``n`` is ``1 + max index`` unless a ``# ... n=<int>`` comment
        declares it.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if fmt is None:
        first = ""
        for raw in lines:
            if raw.strip():
                first = raw.strip()
                break
        fmt = "matrix-market" if first.lower().startswith("%%matrixmarket") else "edge-list"
    if fmt == "matrix-market":
        return _parse_matrix_market(path, lines)
    if fmt == "edge-list":
        return _parse_edge_list(path, lines)
    raise ValueError(f"unknown graph format: {fmt!r}")


def save_edge_list(path, edges, n: int, comment: str | None = None):
    """Write an edge list with an ``n=`` header so round-trips are exact."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={int(n)}\n")
        if comment:
            fh.write(f"# {comment}\n")
        for edge in edges:
            if len(edge) == 2:
                i, j = edge
                w = 1.0
            else:
                i, j, w = edge
            fh.write(f"{int(i)} {int(j)} {float(w):.17g}\n")


def load_signal(source, n: int | None = None) -> GraphSignal:
    """Build a signal from a generator spec or a text file.

    Specs: ``dirac:k`` (unit impulse at node ``k``), ``normal:seed``
    (standard normal entries), ``const:v``. Anything else is read as a
    one-value-per-line file (``#`` comments and blank lines skipped).
    ``n`` is required for specs and, when given, validated against files.
    """
    if isinstance(source, str) and ":" in source:
        head, _, arg = source.partition(":")
        if head in ("dirac", "normal", "const"):
            if n is None:
                raise ValueError(f"signal spec {source!r} needs the node count")
            if head == "dirac":
                k = int(arg)
                if not (0 <= k < n):
                    raise ValueError(f"dirac node {k} out of range for n={n}")
                v = np.zeros(n)
                v[k] = 1.0
                return GraphSignal(v)
            if head == "normal":
                rng = np.random.default_rng(int(arg))
                return GraphSignal(rng.standard_normal(n))
            return GraphSignal(np.full(n, float(arg)))
    values = []
    with open(source, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(source, line_no, f"not a number: {line!r}") from None
    if not values:
        raise ParseError(source, 1, "signal file holds no values")
    if n is not None and len(values) != n:
        raise ValueError(f"signal length {len(values)} does not match graph size {n}")
    return GraphSignal(values)
