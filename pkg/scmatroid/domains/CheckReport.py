from typing import List, Optional

from pydantic import BaseModel

from scmatroid.domains.CertificateDocument import CertificateClosure, CertificateDocument


class CheckReport(BaseModel):
    method: str
    status: str
    evidence: Optional[str] = None
    detail: str = ""
    certificate: Optional[CertificateDocument] = None


class SystemReport(BaseModel):
    system: str
    status: str
    reports: List[CheckReport]


class AuditReport(BaseModel):
    valid: bool
    witnesses: List[Optional[str]]
    failures: List[str]
    closure: Optional[CertificateClosure] = None
