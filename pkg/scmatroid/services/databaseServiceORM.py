import logging
import os
from datetime import datetime
from typing import List, Optional

from sqlalchemy import create_engine, event
from sqlalchemy.orm import Session

from scmatroid.domains.ControlDomainsORM import Base, CertificateRecord, CheckRunRecord, SystemRecord

logger = logging.getLogger(__name__)


def now() -> str:
    return datetime.now().isoformat(timespec="seconds")


class ControlDB:
    def __init__(self, db_filename):
        db_dir = os.path.dirname(db_filename)
        if db_dir:
            os.makedirs(db_dir, exist_ok=True)
        self.engine = create_engine(
            f"sqlite:///{db_filename}",
            connect_args={"check_same_thread": False}
        )
        event.listen(self.engine, "connect", _enable_foreign_keys)
        Base.metadata.create_all(self.engine)
        logger.debug("opened store %s", db_filename)

    def close(self):
        self.engine.dispose()

    # ==================== SYSTEMS ====================

    def insert_system(self, system: SystemRecord) -> SystemRecord:
        if not system.created_at:
            system.created_at = now()
        with Session(self.engine, expire_on_commit=False) as session:
            session.add(system)
            session.commit()
            session.refresh(system)
            return system

    def get_system(self, system_id: int) -> Optional[SystemRecord]:
        with Session(self.engine) as session:
            return session.get(SystemRecord, system_id)

    def get_system_by_name(self, name: str) -> Optional[SystemRecord]:
        with Session(self.engine) as session:
            return session.query(SystemRecord).filter(SystemRecord.name == name).first()

    def list_systems(self) -> List[SystemRecord]:
        with Session(self.engine) as session:
            return session.query(SystemRecord).order_by(SystemRecord.id).all()

    def delete_system(self, system_id: int) -> bool:
        with Session(self.engine) as session:
            system = session.get(SystemRecord, system_id)
            if not system:
                return False
            session.delete(system)
            session.commit()
            return True

    # ==================== CHECK RUNS ====================

    def insert_check_run(self, run: CheckRunRecord) -> CheckRunRecord:
        if not run.created_at:
            run.created_at = now()
        with Session(self.engine, expire_on_commit=False) as session:
            session.add(run)
            session.commit()
            session.refresh(run)
            return run

    def list_check_runs(self, system_id: int) -> List[CheckRunRecord]:
        with Session(self.engine) as session:
            return (session.query(CheckRunRecord)
                    .filter(CheckRunRecord.system_id == system_id)
                    .order_by(CheckRunRecord.id).all())

    # ==================== CERTIFICATES ====================

    def insert_certificate(self, certificate: CertificateRecord) -> CertificateRecord:
        if not certificate.created_at:
            certificate.created_at = now()
        with Session(self.engine, expire_on_commit=False) as session:
            session.add(certificate)
            session.commit()
            session.refresh(certificate)
            return certificate

    def get_certificate(self, certificate_id: int) -> Optional[CertificateRecord]:
        with Session(self.engine) as session:
            return session.get(CertificateRecord, certificate_id)

    def list_certificates(self, system_id: int) -> List[CertificateRecord]:
        with Session(self.engine) as session:
            return (session.query(CertificateRecord)
                    .filter(CertificateRecord.system_id == system_id)
                    .order_by(CertificateRecord.id).all())


def _enable_foreign_keys(dbapi_connection, connection_record):
    cursor = dbapi_connection.cursor()
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()
