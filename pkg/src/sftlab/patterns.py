"""Patterns on finite shapes, window extraction, integer window codecs, codecs and IO.

A window code is the base-|A| integer whose digits are the window's symbols in
lexicographic (row-major) point order, first point most significant.  This is
the bijection used for allowed-set bitsets and for the little-endian binary
window format.
"""

import math
import struct
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DomainError, ResourceBudgetError
from .geometry import Cube, PointSet, check_dim, cubes_in, full_cube

MAX_WINDOW_TABLE_BITS = 28  # refuse |A|^(n^d) > 2^28 window tables
HISTOGRAM_BUDGET = 2 ** 24


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if not 2 <= self.size <= 255:
            raise DomainError(f"alphabet size must be in [2, 255], got {self.size}")


def window_table_size(alphabet: int, d: int, n: int) -> int:
    """Number of distinct side-n windows, guarded to 2^28."""
    count = alphabet ** (n ** d)
    if count > 2 ** MAX_WINDOW_TABLE_BITS:
        raise ResourceBudgetError(
            f"window table {alphabet}^{n**d} exceeds 2^{MAX_WINDOW_TABLE_BITS}"
        )
    return count


def _shape_points(shape):
    if isinstance(shape, Cube):
        return shape.points()
    return list(shape)


def _normalize_shape(shape):
    """Translate so the lex-minimal point sits at the origin."""
    if isinstance(shape, Cube):
        m = shape.origin
        if all(x == 0 for x in m):
            return shape, m
        return Cube((0,) * shape.d, shape.side), m
    if not len(shape):
        return shape, ()
    m = shape.min_point()
    if all(x == 0 for x in m):
        return shape, m
    moved = PointSet(tuple(x - o for x, o in zip(p, m)) for p in shape)
    return moved, m


class Pattern:
    """Symbols on a finite shape (Cube or PointSet), defined up to translation.

    Stored normalized: the shape's lex-minimal point is the origin, and
    `symbols` lists the symbols in lex order of the shape's points.
    """

    __slots__ = ("shape", "symbols", "alphabet", "_index")

    def __init__(self, shape, symbols, alphabet: int):
        shape, _ = _normalize_shape(shape)
        symbols = np.asarray(symbols, dtype=np.uint8)
        pts = _shape_points(shape)
        if symbols.ndim != 1 or len(symbols) != len(pts):
            raise DomainError("symbol count does not match shape size")
        if len(symbols) and int(symbols.max()) >= alphabet:
            raise DomainError("symbol out of alphabet range")
        self.shape = shape
        self.symbols = symbols
        self.alphabet = alphabet
        self._index = None

    @classmethod
    def from_array(cls, arr, alphabet: int) -> "Pattern":
        arr = np.asarray(arr, dtype=np.uint8)
        check_dim(arr.ndim)
        side = arr.shape[0]
        if any(s != side for s in arr.shape):
            raise DomainError("array pattern must be a hypercube")
        return cls(Cube((0,) * arr.ndim, side), arr.reshape(-1), alphabet)

    @property
    def d(self) -> int:
        if isinstance(self.shape, Cube):
            return self.shape.d
        return len(self.shape.min_point())

    def points(self):
        return _shape_points(self.shape)

    def is_cube(self) -> bool:
        return isinstance(self.shape, Cube)

    def as_array(self) -> np.ndarray:
        if not self.is_cube():
            raise DomainError("as_array requires a cube-shaped pattern")
        k = self.shape.side
        return self.symbols.reshape((k,) * self.shape.d)

    def _point_index(self):
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.points())}
        return self._index

    def at(self, p) -> int:
        return int(self.symbols[self._point_index()[tuple(p)]])

    def restrict(self, S) -> "Pattern":
        """Subpattern on S (translated into this pattern's coordinates)."""
        idx = self._point_index()
        if isinstance(S, (Cube, PointSet)):
            pts = _shape_points(S)
        else:
            pts = [tuple(p) for p in S]
        try:
            sel = [idx[p] for p in pts]
        except KeyError as e:
            raise DomainError(f"restriction target not inside shape: {e}") from None
        sub_shape = S if isinstance(S, (Cube, PointSet)) else PointSet(pts)
        return Pattern(sub_shape, self.symbols[sel], self.alphabet)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        if self.alphabet != other.alphabet:
            return False
        if self.is_cube() != other.is_cube():
            return self.points() == other.points() and np.array_equal(
                self.symbols, other.symbols
            )
        if self.is_cube():
            if (self.shape.side, self.shape.d) != (other.shape.side, other.shape.d):
                return False
        elif self.shape != other.shape:
            return False
        return np.array_equal(self.symbols, other.symbols)

    def __hash__(self) -> int:
        key = tuple(self.points()) if not self.is_cube() else (self.shape.side, self.shape.d)
        return hash((key, self.symbols.tobytes(), self.alphabet))

    def __repr__(self) -> str:
        return f"Pattern(d={self.d}, |shape|={len(self.symbols)}, A={self.alphabet})"


def _lex_weights(alphabet: int, count: int) -> np.ndarray:
    return (alphabet ** np.arange(count - 1, -1, -1, dtype=np.int64)).astype(np.int64)


def encode_window(symbols, alphabet: int) -> int:
    """Base-|A| code of a symbol list in lex point order (first = most significant)."""
    code = 0
    for s in symbols:
        code = code * alphabet + int(s)
    return code


def decode_window(code: int, n: int, d: int, alphabet: int) -> Pattern:
    total = n ** d
    syms = np.empty(total, dtype=np.uint8)
    for i in range(total - 1, -1, -1):
        syms[i] = code % alphabet
        code //= alphabet
    if code:
        raise DomainError("window code out of range")
    return Pattern(full_cube(n, d), syms, alphabet)


def _codes_fit_int64(alphabet: int, cells: int) -> bool:
    return cells * math.log2(alphabet) <= 62


def cube_window_codes(arr: np.ndarray, n: int, alphabet: int):
    """Codes of every side-n window of a cube pattern, anchor-ordered (C order).
    Falls back to Python integers when codes overflow 64 bits."""
    d = arr.ndim
    if any(s < n for s in arr.shape):
        raise DomainError("no side-n cube fits in the pattern")
    view = np.lib.stride_tricks.sliding_window_view(arr, (n,) * d)
    flat = view.reshape(-1, n ** d)
    if _codes_fit_int64(alphabet, n ** d):
        return flat.astype(np.int64) @ _lex_weights(alphabet, n ** d)
    return [encode_window(row, alphabet) for row in flat]


def windows(u: Pattern, n: int) -> frozenset:
    """Set of side-n window codes appearing in u."""
    if u.is_cube():
        if u.shape.side < n:
            raise DomainError("no side-n cube fits in the pattern")
        codes = cube_window_codes(u.as_array(), n, u.alphabet)
        return frozenset(codes.tolist() if isinstance(codes, np.ndarray) else codes)
    cubes = cubes_in(u.shape, n)
    if not cubes:
        raise DomainError("no side-n cube fits in the pattern")
    out = set()
    for c in cubes:
        out.add(encode_window(u.restrict(c).symbols, u.alphabet))
    return frozenset(out)


def window_positions(u: Pattern, n: int):
    """(anchor, code) for every side-n cube in u, in lex anchor order."""
    if u.is_cube():
        k = u.shape.side
        codes = cube_window_codes(u.as_array(), n, u.alphabet)
        if isinstance(codes, np.ndarray):
            codes = codes.tolist()
        anchors = list(product(range(k - n + 1), repeat=u.d))
        return list(zip(anchors, codes))
    out = []
    for c in cubes_in(u.shape, n):
        out.append((c.origin, encode_window(u.restrict(c).symbols, u.alphabet)))
    return out


def complexity_histogram(alphabet: int, d: int, n: int, k: int) -> dict:
    """Exhaustive: bucket all side-k patterns by their number of distinct
    side-n windows.  Masses sum to |A|^(k^d)."""
    if n > k:
        raise DomainError("need n <= k")
    total = alphabet ** (k ** d)
    if total > HISTOGRAM_BUDGET:
        raise ResourceBudgetError(f"{alphabet}^{k**d} patterns exceed budget 2^24")
    window_table_size(alphabet, d, n)
    cells = k ** d
    weights = _lex_weights(alphabet, n ** d)
    # window anchor -> flat cell offsets, shared by every pattern
    offs = []
    for anchor in product(range(k - n + 1), repeat=d):
        cell_ids = []
        for rel in product(range(n), repeat=d):
            p = tuple(a + r for a, r in zip(anchor, rel))
            cell_ids.append(int(np.ravel_multi_index(p, (k,) * d)))
        offs.append(cell_ids)
    offs = np.asarray(offs, dtype=np.int64)  # (n_windows, n^d)
    hist: dict = {}
    chunk = max(1, min(total, 1 << 18))
    digits_pow = (alphabet ** np.arange(cells - 1, -1, -1, dtype=object)).astype(object)
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # base-A digits of each pattern id, most significant cell first
        digs = np.empty((len(ids), cells), dtype=np.int64)
        rem = ids.copy()
        for c in range(cells - 1, -1, -1):
            digs[:, c] = rem % alphabet
            rem //= alphabet
        codes = digs[:, offs.reshape(-1)].reshape(len(ids), offs.shape[0], offs.shape[1])
        codes = codes @ weights  # (chunk, n_windows)
        for row in codes:
            j = len(set(row.tolist()))
            hist[j] = hist.get(j, 0) + 1
    assert sum(hist.values()) == total
    return hist


# ---------------------------------------------------------------------------
# IO: text patterns and binary window indices

def save_text(path, u: Pattern) -> None:
    """Text format: header 'd side alphabet', then symbol rows (one row per
    trailing-axis line, blank line between higher-dimensional blocks)."""
    if not u.is_cube():
        raise DomainError("text format covers cube-shaped patterns")
    arr = u.as_array()
    k, d = u.shape.side, u.d
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{d} {k} {u.alphabet}\n")
        if d == 1:
            f.write(" ".join(str(int(x)) for x in arr) + "\n")
        elif d == 2:
            for row in arr:
                f.write(" ".join(str(int(x)) for x in row) + "\n")
        else:
            for block in arr:
                for row in block:
                    f.write(" ".join(str(int(x)) for x in row) + "\n")
                f.write("\n")


def load_text(path) -> Pattern:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 3:
            raise DomainError("bad pattern header, expected 'd side alphabet'")
        d, k, alphabet = (int(x) for x in header)
        vals = [int(tok) for line in f for tok in line.split()]
    if len(vals) != k ** d:
        raise DomainError(f"expected {k**d} symbols, got {len(vals)}")
    return Pattern.from_array(np.asarray(vals, dtype=np.uint8).reshape((k,) * d), alphabet)


def write_window_indices(path, codes) -> None:
    """Window codes as little-endian unsigned 64-bit integers."""
    with open(path, "wb") as f:
        for c in sorted(int(x) for x in codes):
            f.write(struct.pack("<Q", c))


def read_window_indices(path):
    out = []
    with open(path, "rb") as f:
        while True:
            b = f.read(8)
            if not b:
                break
            if len(b) != 8:
                raise DomainError("truncated window index file")
            out.append(struct.unpack("<Q", b)[0])
    return out
