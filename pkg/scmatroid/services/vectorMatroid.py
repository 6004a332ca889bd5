"""
Vector matroids over F(z)(s): rank oracle, bases, unimodular bases and unions.

Labels are ordered by their position in the ground set, so "lexicographic" always
means lexicographic over column positions (a2 < a10).
"""
import logging
import threading
from dataclasses import dataclass
from itertools import chain, combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from scmatroid.services.errors import (
    DimensionError,
    GroundSetMismatchError,
    LimitExceededError,
    UnknownLabelError,
)
from scmatroid.services.exactLinalg import SymMatrix, det, rank
from scmatroid.services.symbolicCore import RationalFunction

logger = logging.getLogger(__name__)

DEFAULT_MAX_BASES = 10000
DEFAULT_MAX_UNION_SUBSET = 20


def powerset(items: Sequence) -> Iterator[Tuple]:
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


@dataclass(frozen=True)
class Base:
    labels: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def as_set(self) -> FrozenSet[str]:
        return frozenset(self.labels)

    def __str__(self) -> str:
        return "{" + ",".join(self.labels) + "}"


@dataclass(frozen=True)
class UnimodularBase:
    base: Base
    witness: Optional[RationalFunction]

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.base.labels


@dataclass(frozen=True)
class Enumeration:
    items: list
    truncated: bool

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


class VectorMatroid:
    """M[A]: column labels of A with linear independence over F(z)(s).

    The rank memo is shared between threads and guarded by a lock.
    """

    def __init__(self, matrix: SymMatrix, seed: Optional[int] = None):
        self.matrix = matrix
        self.ground: Tuple[str, ...] = matrix.col_labels
        self.seed = seed
        self._position = {label: i for i, label in enumerate(self.ground)}
        self._rank_cache: Dict[FrozenSet[str], int] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"VectorMatroid(ground={list(self.ground)!r}, rows={self.matrix.rows})"

    def ordered(self, labels: Iterable[str]) -> Tuple[str, ...]:
        labels = set(labels)
        unknown = labels - self._position.keys()
        if unknown:
            raise UnknownLabelError(f"labels {sorted(unknown)} are not in the ground set")
        return tuple(sorted(labels, key=self._position.__getitem__))

    def rank_of(self, labels: Iterable[str]) -> int:
        ordered = self.ordered(labels)
        key = frozenset(ordered)
        with self._lock:
            cached = self._rank_cache.get(key)
        if cached is not None:
            return cached
        value = rank(self.matrix.select_columns(ordered), seed=self.seed) if ordered else 0
        with self._lock:
            self._rank_cache[key] = value
        return value

    def is_independent(self, labels: Iterable[str]) -> bool:
        ordered = self.ordered(labels)
        return self.rank_of(ordered) == len(ordered)

    @property
    def rank(self) -> int:
        return self.rank_of(self.ground)

    def iter_bases(self) -> Iterator[Base]:
        r = self.rank
        for combo in combinations(self.ground, r):
            if self.is_independent(combo):
                yield Base(combo)

    def enumerate_bases(self, cap: int = DEFAULT_MAX_BASES) -> Enumeration:
        if cap < 1:
            raise ValueError("cap must be at least 1")
        bases: List[Base] = []
        for base in self.iter_bases():
            if len(bases) == cap:
                logger.warning("base enumeration of %r truncated at %d", self, cap)
                return Enumeration(bases, truncated=True)
            bases.append(base)
        return Enumeration(bases, truncated=False)

    def enumerate_unimodular_bases(self, cap: int = DEFAULT_MAX_BASES) -> Enumeration:
        """Bases whose square column selection has a nonzero s-free determinant.

        ``cap`` bounds the number of bases examined.
        """
        if cap < 1:
            raise ValueError("cap must be at least 1")
        r = self.rank
        if self.matrix.rows != r:
            raise DimensionError(f"unimodular bases need a row-full matroid: {self.matrix.rows} rows, rank {r}")
        found: List[UnimodularBase] = []
        examined = 0
        for combo in combinations(self.ground, r):
            witness = det(self.matrix.select_columns(combo))
            if witness.is_zero:
                continue
            if examined == cap:
                logger.warning("unimodular base enumeration of %r truncated at %d", self, cap)
                return Enumeration(found, truncated=True)
            examined += 1
            if witness.is_unit_in_s():
                found.append(UnimodularBase(Base(combo), witness.reduced()))
        return Enumeration(found, truncated=False)


def _require_common_ground(matroids: Sequence[VectorMatroid]) -> Tuple[str, ...]:
    if not matroids:
        raise GroundSetMismatchError("at least one matroid is required")
    ground = matroids[0].ground
    for m in matroids[1:]:
        if m.ground != ground:
            raise GroundSetMismatchError(f"ground sets differ: {list(ground)} vs {list(m.ground)}")
    return ground


def union_rank_formula(matroids: Sequence[VectorMatroid], labels: Iterable[str],
                       max_subset: int = DEFAULT_MAX_UNION_SUBSET) -> int:
    """min over Y subset of X of sum_i r_i(Y) + |X - Y|."""
    _require_common_ground(matroids)
    x = matroids[0].ordered(labels)
    if len(x) > max_subset:
        raise LimitExceededError(f"|X| = {len(x)} exceeds the union formula limit of {max_subset}",
                                 "max_union_subset", max_subset)
    best = len(x)
    for y in powerset(x):
        value = sum(m.rank_of(y) for m in matroids) + len(x) - len(y)
        best = min(best, value)
    return best


def max_base_union_size(matroids: Sequence[VectorMatroid], cap: int = DEFAULT_MAX_BASES) -> int:
    """Largest |B1 u ... u Bk| over one base per matroid."""
    _require_common_ground(matroids)
    families = [[b.as_set() for b in m.enumerate_bases(cap)] for m in matroids]
    best = 0

    def walk(i: int, acc: FrozenSet[str]) -> None:
        nonlocal best
        if i == len(families):
            best = max(best, len(acc))
            return
        for b in families[i]:
            walk(i + 1, acc | b)

    walk(0, frozenset())
    return best


def union_is_independent(matroids: Sequence[VectorMatroid], labels: Iterable[str]) -> bool:
    """X is independent in the union iff it splits into per-matroid independent parts."""
    _require_common_ground(matroids)
    x = matroids[0].ordered(labels)
    assignment: List[List[str]] = [[] for _ in matroids]

    def place(k: int) -> bool:
        if k == len(x):
            return True
        for i, m in enumerate(matroids):
            assignment[i].append(x[k])
            if m.is_independent(assignment[i]) and place(k + 1):
                return True
            assignment[i].pop()
        return False

    return place(0)


def iter_disjoint_families(candidates: Sequence[Sequence], key=lambda c: c.labels) -> Iterator[list]:
    """Pairwise-disjoint picks, one candidate per list, in backtracking order."""
    chosen: list = []
    used: set = set()

    def pick(i: int) -> Iterator[list]:
        if i == len(candidates):
            yield list(chosen)
            return
        for cand in candidates[i]:
            labels = set(key(cand))
            if labels & used:
                continue
            chosen.append(cand)
            used.update(labels)
            logger.debug("depth %d: trying %s", i, sorted(labels))
            yield from pick(i + 1)
            chosen.pop()
            used.difference_update(labels)

    return pick(0)


def disjoint_family(candidates: Sequence[Sequence], key=lambda c: c.labels) -> Optional[list]:
    """First pairwise-disjoint pick, one candidate per list, in the given orders."""
    return next(iter_disjoint_families(candidates, key), None)


def max_union_of_bases(matroids: Sequence[VectorMatroid], sizes_wanted: Sequence[int],
                       cap: int = DEFAULT_MAX_BASES) -> Optional[List[Base]]:
    _require_common_ground(matroids)
    if len(sizes_wanted) != len(matroids):
        raise ValueError("one wanted size per matroid is required")
    candidates = []
    for m, size in zip(matroids, sizes_wanted):
        if m.rank != size:
            return None
        candidates.append(list(m.enumerate_bases(cap)))
    return disjoint_family(candidates)
