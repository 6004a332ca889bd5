from typing import Optional

from sqlalchemy import ForeignKey
from sqlalchemy import UniqueConstraint
from sqlalchemy.orm import DeclarativeBase
from sqlalchemy.orm import Mapped
from sqlalchemy.orm import mapped_column


class Base(DeclarativeBase):
    pass

class SystemRecord(Base):
    __tablename__ = "system"
    __table_args__ = (
        UniqueConstraint("name", name="uq_system_name"),
    )

    id: Mapped[int] = mapped_column(primary_key=True)
    name: Mapped[str]
    parameters: Mapped[str]  # comma separated, in declaration order
    document: Mapped[str]  # SystemFile JSON
    created_at: Mapped[str]

    def __repr__(self) -> str:
        return f"SystemRecord(id={self.id!r}, name={self.name!r}, parameters={self.parameters!r})"

class CheckRunRecord(Base):
    __tablename__ = "check_run"

    id: Mapped[int] = mapped_column(primary_key=True)
    system_id: Mapped[int] = mapped_column(ForeignKey("system.id", ondelete="CASCADE"))
    method: Mapped[str]
    status: Mapped[str]
    evidence: Mapped[Optional[str]]
    detail: Mapped[Optional[str]]
    created_at: Mapped[str]

    def __repr__(self) -> str:
        return f"CheckRunRecord(id={self.id!r}, system_id={self.system_id!r}, method={self.method!r}, status={self.status!r})"

class CertificateRecord(Base):
    __tablename__ = "certificate"

    id: Mapped[int] = mapped_column(primary_key=True)
    system_id: Mapped[int] = mapped_column(ForeignKey("system.id", ondelete="CASCADE"))
    check_run_id: Mapped[Optional[int]] = mapped_column(ForeignKey("check_run.id", ondelete="CASCADE"))
    document: Mapped[str]  # CertificateDocument JSON
    created_at: Mapped[str]

    def __repr__(self) -> str:
        return f"CertificateRecord(id={self.id!r}, system_id={self.system_id!r}, check_run_id={self.check_run_id!r})"
