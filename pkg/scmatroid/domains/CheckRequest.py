from typing import List, Literal, Optional

from pydantic import BaseModel

from scmatroid.domains.CertificateDocument import CertificateDocument
from scmatroid.domains.SystemFile import SystemFile


class CheckRequest(BaseModel):
    system: SystemFile
    method: Literal["pbh", "kalman", "matroid", "all"] = "all"
    partition: Optional[str] = None
    seed: Optional[int] = None


class ComposeRequest(BaseModel):
    systems: List[SystemFile]
    name: Optional[str] = None


class VerifyRequest(BaseModel):
    system: SystemFile
    certificate: CertificateDocument


class StoredCheckRequest(BaseModel):
    method: Literal["pbh", "kalman", "matroid", "all"] = "all"
    partition: Optional[str] = None
    seed: Optional[int] = None
