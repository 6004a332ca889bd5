from typing import List, Literal, Optional

from pydantic import BaseModel


class CertificateBase(BaseModel):
    block: int
    labels: List[str]
    witness: Optional[str] = None


class CertificateClosure(BaseModel):
    kind: Literal["union-minor", "minor-gcd"]
    value: str


class CertificateDocument(BaseModel):
    system: str
    partition: List[List[int]]
    bases: List[CertificateBase]
    totals: List[int]
    closure: Optional[CertificateClosure] = None
