"""
SystemFile and certificate documents: JSON files <-> SystemDef / Certificate.

Every expression is parsed with its JSON field as origin, so diagnostics read
``fixtures/bad.json:A[1][0]:1:4: unknown identifier 'z9'``.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from scmatroid.domains.CertificateDocument import CertificateBase, CertificateClosure, CertificateDocument
from scmatroid.domains.CheckReport import AuditReport, CheckReport
from scmatroid.domains.SystemFile import SystemFile
from scmatroid.services.controllabilityService import (
    Certificate,
    CertificateAudit,
    Closure,
    ClosureKind,
    RowPartition,
    SystemDef,
    Verdict,
)
from scmatroid.services.errors import PartitionError, ShapeMismatchError, SystemFileError
from scmatroid.services.exactLinalg import SymMatrix
from scmatroid.services.exprParser import ExprSource, SourceOrigin, parse_expr
from scmatroid.services.symbolicCore import DEFAULT_REDUCE_THRESHOLD, ParamSpace, Polynomial
from scmatroid.services.vectorMatroid import Base, UnimodularBase

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Model = TypeVar("Model", bound=BaseModel)


def _field_path(loc: Sequence) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path


def _read_model(path: PathLike, model: Type[Model]) -> Model:
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise SystemFileError(f"cannot read file: {e.strerror}", path) from None
    try:
        return model.model_validate_json(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = _field_path(first.get("loc", ()))
        raise SystemFileError(first.get("msg", "invalid document"), path, field or None) from None


def _write_model(document: BaseModel, path: PathLike) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(dump_json(document))
    except OSError as e:
        raise SystemFileError(f"cannot write file: {e.strerror}", str(path)) from None


def dump_json(document: BaseModel) -> str:
    return json.dumps(document.model_dump(), indent=2) + "\n"


def _parse_matrix(rows: List[List[str]], space: ParamSpace, field: str, file: Optional[str]) -> SymMatrix:
    entries = []
    for i, row in enumerate(rows):
        entries.append([parse_expr(ExprSource(text, SourceOrigin(file, f"{field}[{i}][{j}]")), space)
                        for j, text in enumerate(row)])
    return SymMatrix(space, entries, cols=len(rows[0]) if rows else 0)


def system_from_document(doc: SystemFile, file: Optional[str] = None,
                         reduce_threshold: int = DEFAULT_REDUCE_THRESHOLD) -> SystemDef:
    try:
        space = ParamSpace(doc.parameters, reduce_threshold=reduce_threshold)
    except ValueError as e:
        raise SystemFileError(str(e), file, "parameters") from None
    n = len(doc.A)
    if n == 0:
        raise SystemFileError("A must have at least one row", file, "A")
    for i, row in enumerate(doc.A):
        if len(row) != n:
            raise SystemFileError(f"A must be square: row {i} has {len(row)} entries, expected {n}", file, f"A[{i}]")
    if len(doc.B) != n:
        raise SystemFileError(f"B has {len(doc.B)} rows, A has {n}", file, "B")
    widths = {len(row) for row in doc.B}
    if len(widths) > 1:
        raise SystemFileError(f"B rows have different lengths {sorted(widths)}", file, "B")
    A = _parse_matrix(doc.A, space, "A", file)
    B = _parse_matrix(doc.B, space, "B", file)
    return SystemDef(space, A, B, doc.name)


def system_to_document(sys: SystemDef) -> SystemFile:
    return SystemFile(
        name=sys.name,
        parameters=list(sys.space.params),
        A=[[x.render() for x in row] for row in sys.A.entries],
        B=[[x.render() for x in row] for row in sys.B.entries],
    )


def load_system(path: PathLike, reduce_threshold: int = DEFAULT_REDUCE_THRESHOLD) -> SystemDef:
    doc = _read_model(path, SystemFile)
    sys = system_from_document(doc, str(path), reduce_threshold)
    logger.debug("loaded %s from %s: n=%d m=%d", sys.name, path, sys.n, sys.m)
    return sys


def save_system(sys: SystemDef, path: PathLike) -> None:
    _write_model(system_to_document(sys), path)
    logger.info("wrote %s to %s", sys.name, path)


def certificate_to_document(sys: SystemDef, cert: Certificate) -> CertificateDocument:
    return CertificateDocument(
        system=sys.name,
        partition=[list(block) for block in cert.partition.blocks],
        bases=[CertificateBase(block=i, labels=list(ub.labels),
                               witness=ub.witness.render() if ub.witness is not None else None)
               for i, ub in enumerate(cert.bases, start=1)],
        totals=list(cert.totals),
        closure=_closure_document(cert.closure),
    )


def certificate_from_document(doc: CertificateDocument, sys: SystemDef,
                              file: Optional[str] = None) -> Certificate:
    partition = RowPartition(tuple(tuple(block) for block in doc.partition))
    try:
        partition.validate(sys.n)
    except PartitionError as e:
        raise ShapeMismatchError(f"{file or 'certificate'}: {e}") from None
    if [b.block for b in doc.bases] != list(range(1, len(doc.partition) + 1)):
        raise ShapeMismatchError(f"{file or 'certificate'}: bases must list blocks 1..{len(doc.partition)} in order")
    bases = []
    for i, entry in enumerate(doc.bases):
        witness = None
        if entry.witness is not None:
            origin = SourceOrigin(file, f"bases[{i}].witness")
            witness = parse_expr(ExprSource(entry.witness, origin), sys.space)
        bases.append(UnimodularBase(Base(tuple(entry.labels)), witness))
    closure = None
    if doc.closure is not None:
        origin = SourceOrigin(file, "closure.value")
        closure = Closure(ClosureKind(doc.closure.kind), parse_expr(ExprSource(doc.closure.value, origin), sys.space))
    cert = Certificate(partition, tuple(bases), closure)
    if list(cert.totals) != list(doc.totals):
        logger.warning("certificate totals %s do not match its bases %s", doc.totals, list(cert.totals))
    return cert


def load_certificate(path: PathLike, sys: SystemDef) -> Certificate:
    return certificate_from_document(_read_model(path, CertificateDocument), sys, str(path))


def save_certificate(sys: SystemDef, cert: Certificate, path: PathLike) -> None:
    _write_model(certificate_to_document(sys, cert), path)


def _evidence_text(evidence) -> Optional[str]:
    if evidence is None or isinstance(evidence, Certificate):
        return None
    if isinstance(evidence, Polynomial):
        return evidence.render()
    return str(evidence)


def verdict_to_report(sys: SystemDef, verdict: Verdict) -> CheckReport:
    certificate = None
    if isinstance(verdict.evidence, Certificate):
        certificate = certificate_to_document(sys, verdict.evidence)
    return CheckReport(
        method=verdict.method.value,
        status=verdict.status.value,
        evidence=_evidence_text(verdict.evidence),
        detail=verdict.detail,
        certificate=certificate,
    )


def audit_to_report(audit: CertificateAudit) -> AuditReport:
    return AuditReport(
        valid=audit.valid,
        witnesses=[w.render() if w is not None else None for w in audit.witnesses],
        failures=list(audit.failures),
        closure=_closure_document(audit.closure),
    )


def _closure_document(closure: Optional[Closure]) -> Optional[CertificateClosure]:
    if closure is None:
        return None
    return CertificateClosure(kind=closure.kind.value, value=closure.value.render())
