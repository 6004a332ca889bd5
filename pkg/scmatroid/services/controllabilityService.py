"""
Structural controllability verdicts.

Exact tests (pencil rank + minor gcd, Kalman rank) may answer CONTROLLABLE or
NOT_CONTROLLABLE. The matroid certificates are sufficient conditions only: a
search either finds pairwise-disjoint unimodular bases together with a closure
that pins the stacked rank to n for every s (CERTIFIED) or reports INCONCLUSIVE.

Disjointness on its own is not enough. Two copies of x' = z1 x + [1 1] u have the
disjoint unimodular bases {a3} and {a4}, yet the composite loses rank at s = z1.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from scmatroid.services.errors import (
    DimensionError,
    LimitExceededError,
    PartitionError,
    PencilError,
    ShapeMismatchError,
)
from scmatroid.services.exactLinalg import (
    DEFAULT_MAX_COLUMNS,
    SymMatrix,
    block_diag,
    build_pencil,
    cofactor_det,
    det,
    hstack,
    minors_gcd_in_s,
    rank,
    vstack,
)
from scmatroid.services.symbolicCore import ParamSpace, Polynomial, RationalFunction
from scmatroid.services.vectorMatroid import (
    DEFAULT_MAX_BASES,
    UnimodularBase,
    VectorMatroid,
    iter_disjoint_families,
)

logger = logging.getLogger(__name__)


class VerdictStatus(str, Enum):
    CONTROLLABLE = "CONTROLLABLE"
    NOT_CONTROLLABLE = "NOT_CONTROLLABLE"
    CERTIFIED = "CERTIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


class CheckMethod(str, Enum):
    PBH = "pbh"
    KALMAN = "kalman"
    MATROID = "matroid"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class CheckLimits:
    max_bases: int = DEFAULT_MAX_BASES
    max_columns: int = DEFAULT_MAX_COLUMNS
    seed: Optional[int] = None

    @classmethod
    def from_settings(cls, settings: dict) -> "CheckLimits":
        return cls(
            max_bases=int(settings.get("max_bases", DEFAULT_MAX_BASES)),
            max_columns=int(settings.get("max_columns", DEFAULT_MAX_COLUMNS)),
            seed=settings.get("seed"),
        )


@dataclass(frozen=True)
class SystemDef:
    space: ParamSpace
    A: SymMatrix
    B: SymMatrix
    name: str = "system"

    def __post_init__(self):
        self.space.require_same(self.A.space)
        self.space.require_same(self.B.space)
        if self.A.rows != self.A.cols:
            raise DimensionError(f"{self.name}: A must be square, got {self.A.shape}")
        if self.B.rows != self.A.rows:
            raise DimensionError(f"{self.name}: B has {self.B.rows} rows, A has {self.A.rows}")
        if self.A.rows < 1:
            raise DimensionError(f"{self.name}: a system needs at least one state")
        if self.A.contains_s() or self.B.contains_s():
            raise PencilError(f"{self.name}: {self.space.s_name!r} may not occur in A or B")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.B.cols

    def pencil(self) -> SymMatrix:
        return build_pencil(self.A, self.B)


@dataclass(frozen=True)
class RowPartition:
    """Blocks of 1-based row indices."""

    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def singletons(cls, n: int) -> "RowPartition":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "RowPartition":
        blocks, start = [], 1
        for size in sizes:
            blocks.append(tuple(range(start, start + size)))
            start += size
        return cls(tuple(blocks))

    @classmethod
    def parse(cls, text: str) -> "RowPartition":
        """"1,2;3,4,5" -> ((1, 2), (3, 4, 5))."""
        blocks = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                raise PartitionError(f"empty block in partition {text!r}")
            try:
                blocks.append(tuple(int(part) for part in chunk.split(",")))
            except ValueError:
                raise PartitionError(f"non-integer row index in partition {text!r}") from None
        return cls(tuple(blocks))

    def validate(self, n: int) -> None:
        seen = [row for block in self.blocks for row in block]
        if any(not block for block in self.blocks):
            raise PartitionError("partition blocks must be nonempty")
        if len(seen) != len(set(seen)):
            raise PartitionError(f"partition blocks overlap: {self}")
        if sorted(seen) != list(range(1, n + 1)):
            raise PartitionError(f"partition {self} does not cover rows 1..{n}")

    def __str__(self) -> str:
        return ";".join(",".join(str(r) for r in block) for block in self.blocks)


class ClosureKind(str, Enum):
    UNION_MINOR = "union-minor"
    MINOR_GCD = "minor-gcd"


@dataclass(frozen=True)
class Closure:
    """Proof that the disjoint bases add up to rank n for every s.

    UNION_MINOR: the n x n minor on the union of the bases is a unit.
    MINOR_GCD: the maximal minors of the whole pencil have a unit gcd in s.
    """

    kind: ClosureKind
    value: RationalFunction


@dataclass(frozen=True)
class Certificate:
    partition: RowPartition
    bases: Tuple[UnimodularBase, ...]
    closure: Optional[Closure] = None

    @property
    def totals(self) -> Tuple[int, ...]:
        return tuple(len(b.base) for b in self.bases)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for b in self.bases for label in b.labels)


Evidence = Union[Certificate, Polynomial, str, None]


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    method: CheckMethod
    evidence: Evidence = None
    detail: str = ""

    @property
    def positive(self) -> bool:
        return self.status in (VerdictStatus.CONTROLLABLE, VerdictStatus.CERTIFIED)


@dataclass
class CertificateAudit:
    valid: bool
    witnesses: List[Optional[RationalFunction]] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    closure: Optional[Closure] = None

    def __bool__(self) -> bool:
        return self.valid


def pbh_check(sys: SystemDef, limits: CheckLimits = CheckLimits()) -> Verdict:
    """rank [sI - A | B] = n for every s: generic rank n and a unit minor gcd."""
    pencil = sys.pencil()
    n = sys.n
    if pencil.cols > limits.max_columns:
        return Verdict(VerdictStatus.INCONCLUSIVE, CheckMethod.PBH,
                       f"max_columns={limits.max_columns}",
                       f"{pencil.cols} pencil columns exceed max_columns={limits.max_columns}")
    r = rank(pencil, seed=limits.seed)
    if r < n:
        return Verdict(VerdictStatus.NOT_CONTROLLABLE, CheckMethod.PBH,
                       f"rank {r} < n = {n}", f"generic pencil rank deficit of {n - r}")
    g = minors_gcd_in_s(pencil, n, max_columns=limits.max_columns)
    if g.is_zero or g.s_degree > 0:
        logger.info("%s: pencil loses rank at the roots of %s", sys.name, g)
        return Verdict(VerdictStatus.NOT_CONTROLLABLE, CheckMethod.PBH, g,
                       "the maximal minors share a factor in s")
    logger.info("%s: pencil has full rank for every s", sys.name)
    return Verdict(VerdictStatus.CONTROLLABLE, CheckMethod.PBH, g,
                   "maximal minors have a unit gcd in s")


def controllability_matrix(sys: SystemDef) -> SymMatrix:
    blocks = [sys.B]
    for _ in range(1, sys.n):
        blocks.append(sys.A @ blocks[-1])
    return hstack(*blocks)


def kalman_check(sys: SystemDef, limits: CheckLimits = CheckLimits()) -> Verdict:
    if sys.m == 0:
        return Verdict(VerdictStatus.NOT_CONTROLLABLE, CheckMethod.KALMAN,
                       f"rank 0 < n = {sys.n}", "the system has no inputs")
    r = rank(controllability_matrix(sys), seed=limits.seed)
    logger.info("%s: controllability matrix rank %d of %d", sys.name, r, sys.n)
    if r == sys.n:
        return Verdict(VerdictStatus.CONTROLLABLE, CheckMethod.KALMAN, f"rank {r} = n",
                       "controllability matrix has full rank")
    return Verdict(VerdictStatus.NOT_CONTROLLABLE, CheckMethod.KALMAN, f"rank {r} < n = {sys.n}",
                   f"controllability matrix rank deficit of {sys.n - r}")


def block_matroids(sys: SystemDef, partition: RowPartition, seed: Optional[int] = None) -> List[VectorMatroid]:
    pencil = sys.pencil()
    return [VectorMatroid(pencil.row_block([r - 1 for r in block]), seed=seed)
            for block in partition.blocks]


def certificate_search(sys: SystemDef, partition: Optional[RowPartition] = None,
                       limits: CheckLimits = CheckLimits(),
                       method: CheckMethod = CheckMethod.MATROID) -> Verdict:
    """Look for pairwise-disjoint unimodular bases, one per row block, totalling n."""
    partition = partition or RowPartition.singletons(sys.n)
    partition.validate(sys.n)
    matroids = block_matroids(sys, partition, limits.seed)
    ranks = [m.rank for m in matroids]
    if sum(ranks) != sys.n:
        return Verdict(VerdictStatus.INCONCLUSIVE, method, f"block ranks {ranks}",
                       f"block ranks sum to {sum(ranks)}, not n = {sys.n}")
    candidates, truncated = [], False
    for i, m in enumerate(matroids):
        found = m.enumerate_unimodular_bases(limits.max_bases)
        truncated = truncated or found.truncated
        if not found.items:
            return Verdict(VerdictStatus.INCONCLUSIVE, method, None,
                           f"block {i + 1} has no unimodular base"
                           + (" among the enumerated candidates" if found.truncated else ""))
        candidates.append(found.items)
    pencil = sys.pencil()
    first, examined = None, 0
    for family in iter_disjoint_families(candidates):
        if examined == limits.max_bases:
            logger.warning("%s: stopped after %d disjoint families", sys.name, examined)
            break
        examined += 1
        first = first or family
        minor = union_minor(pencil, [label for ub in family for label in ub.labels])
        if minor.is_unit_in_s():
            return _certified(sys, partition, family, Closure(ClosureKind.UNION_MINOR, minor.reduced()), method)
    if first is None:
        detail = "no pairwise-disjoint family of unimodular bases"
        if truncated:
            detail += " (enumeration truncated at max_bases)"
        return Verdict(VerdictStatus.INCONCLUSIVE, method, None, detail)

    # Disjoint bases alone do not pin the rank for every s once blocks share columns.
    logger.debug("%s: no unit union minor among %d families, closing with the minor gcd", sys.name, examined)
    if pencil.cols > limits.max_columns:
        return Verdict(VerdictStatus.INCONCLUSIVE, method, f"max_columns={limits.max_columns}",
                       f"disjoint bases found but {pencil.cols} pencil columns exceed "
                       f"max_columns={limits.max_columns} for the minor gcd closure")
    g = minors_gcd_in_s(pencil, sys.n, max_columns=limits.max_columns)
    if g.is_zero or g.s_degree > 0:
        return Verdict(VerdictStatus.INCONCLUSIVE, method, None,
                       "disjoint unimodular bases exist but do not close to rank n for every s")
    return _certified(sys, partition, first, Closure(ClosureKind.MINOR_GCD, RationalFunction(g)), method)


def _certified(sys: SystemDef, partition: RowPartition, family: Sequence[UnimodularBase],
               closure: Closure, method: CheckMethod) -> Verdict:
    cert = Certificate(partition, tuple(family), closure)
    logger.info("%s: certified by %s (%s)", sys.name,
                ", ".join(str(b.base) for b in family), closure.kind.value)
    return Verdict(VerdictStatus.CERTIFIED, method, cert,
                   "pairwise-disjoint unimodular bases of sizes "
                   + "+".join(str(t) for t in cert.totals) + f" = {sys.n}, closed by {closure.kind.value}")


def union_minor(pencil: SymMatrix, labels: Sequence[str], oracle=det) -> RationalFunction:
    """Determinant of the pencil on the given columns, taken in pencil order."""
    return oracle(pencil.select_columns(sorted(labels, key=pencil.label_index)))


def compose_parallel(subs: Sequence[SystemDef], name: Optional[str] = None) -> SystemDef:
    """Block-diagonal A and stacked B over a shared input."""
    if not subs:
        raise DimensionError("nothing to compose")
    if len(subs) == 1:
        return subs[0]
    first = subs[0]
    for sub in subs[1:]:
        first.space.require_same(sub.space)
        if sub.m != first.m:
            raise DimensionError(f"input dimensions differ: {first.name} has m={first.m}, "
                                 f"{sub.name} has m={sub.m}")
    return SystemDef(first.space,
                     block_diag(*(sub.A for sub in subs)),
                     vstack(*(sub.B for sub in subs)),
                     name or " || ".join(sub.name for sub in subs))


def composite_certificate_check(subs: Sequence[SystemDef], limits: CheckLimits = CheckLimits()) -> Verdict:
    """Every subsystem SC plus disjoint unimodular bases of the zero-padded block rows."""
    composite = compose_parallel(subs)
    for sub in subs:
        verdict = pbh_check(sub, limits)
        if verdict.status is VerdictStatus.NOT_CONTROLLABLE:
            return Verdict(VerdictStatus.NOT_CONTROLLABLE, CheckMethod.PBH, verdict.evidence,
                           f"subsystem {sub.name} is not controllable, so neither is the composite")
        if verdict.status is not VerdictStatus.CONTROLLABLE:
            return Verdict(VerdictStatus.INCONCLUSIVE, CheckMethod.COMPOSITE, verdict.evidence,
                           f"subsystem {sub.name}: {verdict.detail}")
    partition = RowPartition.from_sizes([sub.n for sub in subs])
    return certificate_search(composite, partition, limits, method=CheckMethod.COMPOSITE)


def audit_certificate(sys: SystemDef, cert: Certificate,
                      max_columns: int = DEFAULT_MAX_COLUMNS) -> CertificateAudit:
    """Recompute every clause of a certificate from scratch (cofactor expansion).

    The closure is recomputed too, whatever the certificate claims for it.
    """
    pencil = sys.pencil()
    try:
        cert.partition.validate(sys.n)
    except PartitionError as e:
        raise ShapeMismatchError(str(e)) from None
    if len(cert.bases) != len(cert.partition.blocks):
        raise ShapeMismatchError(f"{len(cert.bases)} bases for {len(cert.partition.blocks)} blocks")
    for ub in cert.bases:
        for label in ub.labels:
            if label not in pencil.col_labels:
                raise ShapeMismatchError(f"label {label!r} is not a pencil column of {sys.name}")

    audit = CertificateAudit(valid=True)
    for i, (block, ub) in enumerate(zip(cert.partition.blocks, cert.bases), start=1):
        rows = pencil.row_block([r - 1 for r in block])
        if len(ub.labels) != len(block):
            audit.witnesses.append(None)
            audit.failures.append(f"block {i}: base {ub.base} has {len(ub.labels)} labels "
                                  f"for {len(block)} rows")
            continue
        witness = union_minor(rows, ub.labels, oracle=cofactor_det).reduced()
        audit.witnesses.append(witness)
        if witness.is_zero:
            audit.failures.append(f"block {i}: witness of {ub.base} is zero")
        elif not witness.is_s_free():
            audit.failures.append(f"block {i}: witness {witness} of {ub.base} depends on "
                                  f"{sys.space.s_name}")
        if ub.witness is not None and ub.witness != witness:
            audit.failures.append(f"block {i}: claimed witness {ub.witness} differs from {witness}")
        block_rank = rank(rows)
        if block_rank != len(ub.labels):
            audit.failures.append(f"block {i}: base size {len(ub.labels)} differs from block rank {block_rank}")
    if sum(len(ub.labels) for ub in cert.bases) != sys.n:
        audit.failures.append(f"base sizes sum to {sum(len(ub.labels) for ub in cert.bases)}, not n = {sys.n}")
    for i in range(len(cert.bases)):
        for j in range(i + 1, len(cert.bases)):
            shared = set(cert.bases[i].labels) & set(cert.bases[j].labels)
            if shared:
                audit.failures.append(f"disjointness: blocks {i + 1} and {j + 1} share {sorted(shared)}")
    if not audit.failures:
        _audit_closure(sys, pencil, cert, audit, max_columns)
    audit.valid = not audit.failures
    return audit


def _audit_closure(sys: SystemDef, pencil: SymMatrix, cert: Certificate,
                   audit: CertificateAudit, max_columns: int) -> None:
    minor = union_minor(pencil, cert.labels, oracle=cofactor_det).reduced()
    if minor.is_unit_in_s():
        audit.closure = Closure(ClosureKind.UNION_MINOR, minor)
    else:
        try:
            g = minors_gcd_in_s(pencil, sys.n, max_columns=max_columns)
        except LimitExceededError as e:
            audit.failures.append(f"closure: union minor {minor} is not a unit and {e}")
            return
        if g.is_zero or g.s_degree > 0:
            audit.failures.append(f"closure: union minor {minor} is not a unit and the maximal minors "
                                  f"share the factor {g}")
            return
        audit.closure = Closure(ClosureKind.MINOR_GCD, RationalFunction(g))
    claimed = cert.closure
    if claimed is None:
        return
    if claimed.kind is audit.closure.kind:
        expected = audit.closure.value
    elif claimed.kind is ClosureKind.UNION_MINOR:
        audit.failures.append(f"closure: claimed union minor {claimed.value} but the union minor is {minor}")
        return
    else:
        try:
            expected = RationalFunction(minors_gcd_in_s(pencil, sys.n, max_columns=max_columns))
        except LimitExceededError:
            logger.warning("%s: claimed minor gcd not checked, %d columns exceed max_columns",
                           sys.name, pencil.cols)
            return
    if claimed.value != expected:
        audit.failures.append(f"closure: claimed {claimed.kind.value} {claimed.value} differs from {expected}")


def verify_certificate(sys: SystemDef, cert: Certificate) -> bool:
    return audit_certificate(sys, cert).valid


def run_checks(sys: SystemDef, methods: Sequence[CheckMethod], partition: Optional[RowPartition] = None,
               limits: CheckLimits = CheckLimits()) -> List[Verdict]:
    verdicts = []
    for method in methods:
        if method is CheckMethod.PBH:
            verdicts.append(pbh_check(sys, limits))
        elif method is CheckMethod.KALMAN:
            verdicts.append(kalman_check(sys, limits))
        elif method is CheckMethod.MATROID:
            verdicts.append(certificate_search(sys, partition, limits))
        else:
            raise ValueError(f"{method.value} checks need the subsystems, use composite_certificate_check")
    return verdicts


def overall_status(verdicts: Sequence[Verdict]) -> VerdictStatus:
    statuses = {v.status for v in verdicts}
    if VerdictStatus.NOT_CONTROLLABLE in statuses:
        return VerdictStatus.NOT_CONTROLLABLE
    if VerdictStatus.CONTROLLABLE in statuses:
        return VerdictStatus.CONTROLLABLE
    if VerdictStatus.CERTIFIED in statuses:
        return VerdictStatus.CERTIFIED
    return VerdictStatus.INCONCLUSIVE
