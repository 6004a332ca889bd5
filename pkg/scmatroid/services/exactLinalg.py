"""
Exact rank, determinant and minor machinery for matrices over F(z)(s).

Elimination runs fraction-free (Bareiss) on a denominator-cleared copy: every row
is multiplied by the lcm of its entry denominators. Row scaling by a nonzero
element keeps the rank and multiplies each minor by the product of the selected
row multipliers, which ``det`` divides back out.
"""
import logging
import random
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import Matrix, Rational
from sympy.polys.rings import PolyElement

from scmatroid.services.errors import (
    DimensionError,
    LimitExceededError,
    PencilError,
    PoleError,
    UnknownLabelError,
)
from scmatroid.services.symbolicCore import (
    ParamSpace,
    Polynomial,
    RationalFunction,
    Scalar,
    gcd_in_s,
    random_point,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_COLUMNS = 12


def default_labels(count: int) -> Tuple[str, ...]:
    return tuple(f"a{j + 1}" for j in range(count))


class SymMatrix:
    """Dense immutable matrix of RationalFunctions with labelled columns."""

    __slots__ = ("space", "rows", "cols", "entries", "col_labels")

    def __init__(self, space: ParamSpace, entries: Sequence[Sequence], cols: Optional[int] = None,
                 col_labels: Optional[Sequence[str]] = None):
        rows = tuple(tuple(RationalFunction.coerce(space, x) for x in row) for row in entries)
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise DimensionError(f"ragged matrix rows: widths {sorted(widths)}")
        width = widths.pop() if widths else (cols or 0)
        if cols is not None and cols != width:
            raise DimensionError(f"expected {cols} columns, got {width}")
        labels = tuple(col_labels) if col_labels is not None else default_labels(width)
        if len(labels) != width:
            raise DimensionError(f"{len(labels)} labels for {width} columns")
        if len(set(labels)) != len(labels):
            raise DimensionError(f"duplicate column labels in {labels}")
        self.space = space
        self.rows = len(rows)
        self.cols = width
        self.entries = rows
        self.col_labels = labels

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: Tuple[int, int]) -> RationalFunction:
        i, j = index
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (isinstance(other, SymMatrix) and self.shape == other.shape
                and all(a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(x.render() for x in row) for row in self.entries)
        return f"SymMatrix({self.rows}x{self.cols}: [{body}])"

    def label_index(self, label: str) -> int:
        try:
            return self.col_labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"unknown column label {label!r}") from None

    def select_columns(self, labels: Iterable[str]) -> "SymMatrix":
        idx = [self.label_index(label) for label in labels]
        return SymMatrix(self.space, [[row[j] for j in idx] for row in self.entries],
                         cols=len(idx), col_labels=[self.col_labels[j] for j in idx])

    def row_block(self, rows: Iterable[int]) -> "SymMatrix":
        """Rows by 0-based index; column labels are kept."""
        picked = [self.entries[i] for i in rows]
        return SymMatrix(self.space, picked, cols=self.cols, col_labels=self.col_labels)

    def transpose(self) -> "SymMatrix":
        return SymMatrix(self.space, [[self.entries[i][j] for i in range(self.rows)]
                                      for j in range(self.cols)], cols=self.rows)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        self._same_shape(other)
        return SymMatrix(self.space, [[a + b for a, b in zip(ra, rb)]
                                      for ra, rb in zip(self.entries, other.entries)],
                         cols=self.cols, col_labels=self.col_labels)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        self._same_shape(other)
        return SymMatrix(self.space, [[a - b for a, b in zip(ra, rb)]
                                      for ra, rb in zip(self.entries, other.entries)],
                         cols=self.cols, col_labels=self.col_labels)

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(self.space, [[-a for a in row] for row in self.entries],
                         cols=self.cols, col_labels=self.col_labels)

    def __matmul__(self, other: "SymMatrix") -> "SymMatrix":
        self.space.require_same(other.space)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        zero = RationalFunction.zero(self.space)
        out = []
        for row in self.entries:
            out_row = []
            for j in range(other.cols):
                acc = zero
                for k, a in enumerate(row):
                    b = other.entries[k][j]
                    if not a.is_zero and not b.is_zero:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return SymMatrix(self.space, out, cols=other.cols)

    def scale_row(self, i: int, factor) -> "SymMatrix":
        factor = RationalFunction.coerce(self.space, factor)
        rows = [list(r) for r in self.entries]
        rows[i] = [factor * x for x in rows[i]]
        return SymMatrix(self.space, rows, cols=self.cols, col_labels=self.col_labels)

    def _same_shape(self, other: "SymMatrix") -> None:
        self.space.require_same(other.space)
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def contains_s(self) -> bool:
        return any(not x.is_s_free() for row in self.entries for x in row)

    def evaluate(self, point: Mapping[str, Scalar]) -> List[List[Fraction]]:
        return [[x.evaluate(point) for x in row] for row in self.entries]

    def substitute(self, point: Mapping[str, Scalar]) -> "SymMatrix":
        return SymMatrix(self.space, [[x.substitute(point) for x in row] for row in self.entries],
                         cols=self.cols, col_labels=self.col_labels)

    def cleared_rows(self) -> Tuple[List[List[PolyElement]], List[Polynomial]]:
        """Polynomial rows plus the multiplier applied to each row."""
        ring = self.space.ring
        rows, multipliers = [], []
        for row in self.entries:
            lcm = reduce(_lcm, (x.den.rep for x in row if not x.is_zero), ring.one)
            rows.append([(x.num.rep * lcm.exquo(x.den.rep)) if not x.is_zero else ring.zero
                         for x in row])
            multipliers.append(Polynomial(self.space, lcm))
        return rows, multipliers


def _lcm(a: PolyElement, b: PolyElement) -> PolyElement:
    if a == b or b == b.ring.one:
        return a
    if a == a.ring.one:
        return b
    return (a * b).exquo(a.gcd(b))


def hstack(*blocks: SymMatrix) -> SymMatrix:
    space = blocks[0].space
    rows = blocks[0].rows
    for b in blocks:
        space.require_same(b.space)
        if b.rows != rows:
            raise DimensionError(f"hstack row mismatch: {rows} vs {b.rows}")
    entries = [[x for b in blocks for x in b.entries[i]] for i in range(rows)]
    return SymMatrix(space, entries, cols=sum(b.cols for b in blocks))


def vstack(*blocks: SymMatrix) -> SymMatrix:
    space = blocks[0].space
    cols = blocks[0].cols
    for b in blocks:
        space.require_same(b.space)
        if b.cols != cols:
            raise DimensionError(f"vstack column mismatch: {cols} vs {b.cols}")
    return SymMatrix(space, [row for b in blocks for row in b.entries], cols=cols)


def block_diag(*blocks: SymMatrix) -> SymMatrix:
    space = blocks[0].space
    total = sum(b.cols for b in blocks)
    zero = RationalFunction.zero(space)
    entries, offset = [], 0
    for b in blocks:
        space.require_same(b.space)
        for row in b.entries:
            entries.append([zero] * offset + list(row) + [zero] * (total - offset - b.cols))
        offset += b.cols
    return SymMatrix(space, entries, cols=total)


def build_pencil(A: SymMatrix, B: SymMatrix) -> SymMatrix:
    """[sI - A | B] with labels a1..a_{n+m}."""
    A.space.require_same(B.space)
    n = A.rows
    if A.cols != n:
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.rows != n:
        raise DimensionError(f"B must have {n} rows, got {B.rows}")
    if A.contains_s() or B.contains_s():
        raise PencilError(f"the indeterminate {A.space.s_name!r} may not occur in A or B")
    s = RationalFunction(A.space.s())
    left = [[(s - A[i, j]) if i == j else -A[i, j] for j in range(n)] for i in range(n)]
    entries = [left[i] + list(B.entries[i]) for i in range(n)]
    return SymMatrix(A.space, entries, cols=n + B.cols)


# --- fraction-free elimination on polynomial rows ---

def _bareiss_rank(rows: List[List[PolyElement]]) -> int:
    """Echelon rank with full pivoting: lowest row, then lowest column."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    active = list(range(ncols))
    prev = None
    rank = 0
    for k in range(len(m)):
        pivot = next(((i, j) for i in range(k, len(m)) for j in active if m[i][j]), None)
        if pivot is None:
            break
        pi, pj = pivot
        m[k], m[pi] = m[pi], m[k]
        active.remove(pj)
        p = m[k][pj]
        logger.debug("pivot %d at row %d column %d", k, pi, pj)
        for i in range(k + 1, len(m)):
            lead = m[i][pj]
            for j in active:
                value = p * m[i][j] - lead * m[k][j]
                m[i][j] = value.exquo(prev) if prev is not None else value
            m[i][pj] = p.ring.zero
        prev = p
        rank += 1
    return rank


def _bareiss_det(rows: List[List[PolyElement]]) -> PolyElement:
    """Determinant with row pivoting on the lowest nonzero row of each column."""
    n = len(rows)
    m = [list(r) for r in rows]
    ring = m[0][0].ring
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return ring.zero
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]).exquo(prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def numeric_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a matrix of rationals."""
    if not rows or not rows[0]:
        return 0
    return Matrix([[_rational(x) for x in row] for row in rows]).rank()


def _rational(x: Scalar) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def generic_rank_lower_bound(M: SymMatrix, seed: int, attempts: int = 3) -> int:
    """Rank at a seeded random point; never exceeds the rank over F(z)(s)."""
    rng = random.Random(seed)
    best = 0
    for _ in range(attempts):
        try:
            best = max(best, numeric_rank(M.evaluate(random_point(M.space, rng))))
        except PoleError:
            continue
        if best == min(M.shape):
            break
    return best


def rank(M: SymMatrix, seed: Optional[int] = None) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    if seed is not None:
        bound = generic_rank_lower_bound(M, seed)
        if bound == min(M.shape):
            return bound
    rows, _ = M.cleared_rows()
    return _bareiss_rank(rows)


def det(M: SymMatrix) -> RationalFunction:
    if M.rows != M.cols:
        raise DimensionError(f"determinant of a non-square {M.shape} matrix")
    if M.rows == 0:
        return RationalFunction.one(M.space)
    rows, multipliers = M.cleared_rows()
    scaled = Polynomial(M.space, _bareiss_det(rows))
    scale = reduce(lambda a, b: a * b, multipliers)
    return RationalFunction(scaled, scale)


def cofactor_det(M: SymMatrix) -> RationalFunction:
    """Laplace expansion along the first row, skipping zero entries."""
    if M.rows != M.cols:
        raise DimensionError(f"determinant of a non-square {M.shape} matrix")

    def expand(rows: List[Tuple[RationalFunction, ...]], cols: List[int]) -> RationalFunction:
        if not rows:
            return RationalFunction.one(M.space)
        total = RationalFunction.zero(M.space)
        first, rest = rows[0], rows[1:]
        for pos, j in enumerate(cols):
            entry = first[j]
            if entry.is_zero:
                continue
            minor = expand(rest, cols[:pos] + cols[pos + 1:])
            term = entry * minor
            total = total + term if pos % 2 == 0 else total - term
        return total

    return expand(list(M.entries), list(range(M.cols)))


def minors_gcd_in_s(M: SymMatrix, k: int, max_columns: int = DEFAULT_MAX_COLUMNS) -> Polynomial:
    """gcd in F(z)[s] of all k x k minors; the zero polynomial iff they all vanish.

    Row multipliers from denominator clearing must be s-free, so they are units of
    F(z)[s] and leave the gcd unchanged.
    """
    if k > min(M.shape):
        raise DimensionError(f"no {k}x{k} minors in a {M.shape} matrix")
    if M.cols > max_columns:
        raise LimitExceededError(f"{M.cols} columns exceed the minor enumeration limit of {max_columns}",
                                 "max_columns", max_columns)
    rows, multipliers = M.cleared_rows()
    if any(mult.s_degree > 0 for mult in multipliers):
        raise PencilError("entries with s in a denominator have no minor gcd in F(z)[s]")
    running = M.space.zero()
    seen = 0
    for row_idx in combinations(range(M.rows), k):
        for col_idx in combinations(range(M.cols), k):
            minor = _bareiss_det([[rows[i][j] for j in col_idx] for i in row_idx])
            seen += 1
            if not minor:
                continue
            running = gcd_in_s(running, Polynomial(M.space, minor))
            if running.s_degree == 0:
                logger.debug("minor gcd reached s-degree 0 after %d minors", seen)
                return running
    logger.debug("minor gcd over %d minors has s-degree %s", seen, running.s_degree)
    return running
