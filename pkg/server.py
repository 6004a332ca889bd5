import json
import logging
from pathlib import Path
from typing import Optional, Tuple

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from scmatroid.domains.CheckReport import AuditReport, SystemReport
from scmatroid.domains.CheckRequest import CheckRequest, ComposeRequest, StoredCheckRequest, VerifyRequest
from scmatroid.domains.ControlDomainsORM import CertificateRecord, CheckRunRecord, SystemRecord
from scmatroid.domains.SystemFile import SystemFile
from scmatroid.services.controllabilityService import (
    Certificate,
    CheckLimits,
    CheckMethod,
    RowPartition,
    SystemDef,
    audit_certificate,
    compose_parallel,
    overall_status,
    run_checks,
)
from scmatroid.services.databaseServiceORM import ControlDB
from scmatroid.services.errors import ScMatroidError
from scmatroid.services.settingsService import PROJECT_ROOT, configure_logging, load_settings
from scmatroid.services.systemFileService import (
    audit_to_report,
    certificate_from_document,
    certificate_to_document,
    system_from_document,
    system_to_document,
    verdict_to_report,
)

logger = logging.getLogger("scmatroid.server")

METHODS = {
    "pbh": [CheckMethod.PBH],
    "kalman": [CheckMethod.KALMAN],
    "matroid": [CheckMethod.MATROID],
    "all": [CheckMethod.PBH, CheckMethod.KALMAN, CheckMethod.MATROID],
}


def _system_dict(record: SystemRecord, with_document: bool = False) -> dict:
    data = {
        "id": record.id,
        "name": record.name,
        "parameters": record.parameters.split(",") if record.parameters else [],
        "created_at": record.created_at,
    }
    if with_document:
        data["document"] = json.loads(record.document)
    return data


def _run_dict(run: CheckRunRecord) -> dict:
    return {
        "id": run.id,
        "system_id": run.system_id,
        "method": run.method,
        "status": run.status,
        "evidence": run.evidence,
        "detail": run.detail,
        "created_at": run.created_at,
    }


def _certificate_dict(record: CertificateRecord) -> dict:
    return {
        "id": record.id,
        "system_id": record.system_id,
        "check_run_id": record.check_run_id,
        "certificate": json.loads(record.document),
        "created_at": record.created_at,
    }


class ControlServer:
    def __init__(self, settings: Optional[dict] = None):
        self.settings = settings if settings is not None else load_settings()
        self.limits = CheckLimits.from_settings(self.settings)
        self.app = FastAPI(title="Structural Controllability Server", version="1.0.0")
        self.app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_credentials=True,
            allow_methods=["*"],
            allow_headers=["*"],
        )
        db_path = Path(self.settings.get("database", "data/scmatroid.db"))
        if not db_path.is_absolute():
            db_path = PROJECT_ROOT / db_path
        self.db = ControlDB(str(db_path))
        self._add_routes()

    def _system(self, doc: SystemFile) -> SystemDef:
        return system_from_document(doc, reduce_threshold=self.settings.get("gcd_threshold", 64))

    def _limits(self, seed: Optional[int]) -> CheckLimits:
        if seed is None:
            return self.limits
        return CheckLimits(self.limits.max_bases, self.limits.max_columns, seed)

    def check(self, sys_def: SystemDef, method: str, partition: Optional[str], seed: Optional[int]):
        parsed = RowPartition.parse(partition) if partition else None
        if parsed is not None:
            parsed.validate(sys_def.n)
        verdicts = run_checks(sys_def, METHODS[method], parsed, self._limits(seed))
        report = SystemReport(system=sys_def.name, status=overall_status(verdicts).value,
                              reports=[verdict_to_report(sys_def, v) for v in verdicts])
        return verdicts, report

    def _stored_system(self, system_id: int) -> SystemRecord:
        record = self.db.get_system(system_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"System with id {system_id} not found")
        return record

    def _add_routes(self):
        @self.app.post("/api/check")
        def check_system(request: CheckRequest) -> SystemReport:
            try:
                _, report = self.check(self._system(request.system), request.method,
                                       request.partition, request.seed)
                return report
            except ScMatroidError as e:
                raise HTTPException(status_code=400, detail=str(e))
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.post("/api/compose")
        def compose_systems(request: ComposeRequest) -> SystemFile:
            try:
                subs = [self._system(doc) for doc in request.systems]
                return system_to_document(compose_parallel(subs, request.name))
            except ScMatroidError as e:
                raise HTTPException(status_code=400, detail=str(e))
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.post("/api/verify")
        def verify_certificate(request: VerifyRequest) -> AuditReport:
            try:
                sys_def = self._system(request.system)
                cert = certificate_from_document(request.certificate, sys_def)
                return audit_to_report(audit_certificate(sys_def, cert, self.limits.max_columns))
            except ScMatroidError as e:
                raise HTTPException(status_code=400, detail=str(e))
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        # ==================== STORED SYSTEMS ====================

        @self.app.get("/api/systems")
        def list_systems():
            try:
                return [_system_dict(record) for record in self.db.list_systems()]
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.post("/api/systems")
        def create_system(doc: SystemFile = Body(...)):
            try:
                sys_def = self._system(doc)
                if self.db.get_system_by_name(sys_def.name) is not None:
                    raise HTTPException(status_code=409, detail=f"System {sys_def.name!r} already exists")
                record = self.db.insert_system(SystemRecord(
                    name=sys_def.name,
                    parameters=",".join(sys_def.space.params),
                    document=system_to_document(sys_def).model_dump_json(),
                ))
                logger.info("stored system %s as id %d", record.name, record.id)
                return _system_dict(record, with_document=True)
            except HTTPException:
                raise
            except ScMatroidError as e:
                raise HTTPException(status_code=400, detail=str(e))
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.get("/api/systems/{system_id}")
        def get_system(system_id: int):
            try:
                return _system_dict(self._stored_system(system_id), with_document=True)
            except HTTPException:
                raise
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.delete("/api/systems/{system_id}")
        def delete_system(system_id: int):
            try:
                if not self.db.delete_system(system_id):
                    raise HTTPException(status_code=404, detail=f"System with id {system_id} not found")
                return {"message": f"System with id {system_id} deleted"}
            except HTTPException:
                raise
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.post("/api/systems/{system_id}/check")
        def check_stored_system(system_id: int, request: Optional[StoredCheckRequest] = None) -> SystemReport:
            request = request or StoredCheckRequest()
            try:
                record = self._stored_system(system_id)
                sys_def = self._system(SystemFile.model_validate_json(record.document))
                verdicts, report = self.check(sys_def, request.method, request.partition, request.seed)
                for verdict, entry in zip(verdicts, report.reports):
                    run = self.db.insert_check_run(CheckRunRecord(
                        system_id=system_id,
                        method=entry.method,
                        status=entry.status,
                        evidence=entry.evidence,
                        detail=entry.detail,
                    ))
                    if isinstance(verdict.evidence, Certificate):
                        self.db.insert_certificate(CertificateRecord(
                            system_id=system_id,
                            check_run_id=run.id,
                            document=certificate_to_document(sys_def, verdict.evidence).model_dump_json(),
                        ))
                return report
            except HTTPException:
                raise
            except ScMatroidError as e:
                raise HTTPException(status_code=400, detail=str(e))
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.get("/api/systems/{system_id}/runs")
        def list_runs(system_id: int):
            try:
                self._stored_system(system_id)
                return [_run_dict(run) for run in self.db.list_check_runs(system_id)]
            except HTTPException:
                raise
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))

        @self.app.get("/api/systems/{system_id}/certificates")
        def list_certificates(system_id: int):
            try:
                self._stored_system(system_id)
                return [_certificate_dict(c) for c in self.db.list_certificates(system_id)]
            except HTTPException:
                raise
            except Exception as e:
                raise HTTPException(status_code=500, detail=str(e))


def create_app(settings: Optional[dict] = None) -> Tuple[FastAPI, dict]:
    server = ControlServer(settings)
    return server.app, server.settings


if __name__ == "__main__":
    import uvicorn
    server = ControlServer()
    configure_logging(server.settings.get("log_level", "INFO"))
    port = server.settings.get("port", 7000)
    logger.info("Starting server on port %d", port)
    uvicorn.run(server.app, host="localhost", port=port)
