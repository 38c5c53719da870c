"""HTTP facade over the repository, the job runner, and the analyses.

Thin by design: every endpoint parses its inputs, calls the library, and
serializes the result.  No anonymization logic lives here.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .analysis import data_utility, disclosure_risk
from .errors import (
    MalformedAbstraction,
    MalformedXml,
    ModelInvariantError,
    ParameterValidation,
    ParseFailure,
    Pc4pmError,
    SchemaViolation,
    UnknownEntry,
    UnknownTechnique,
)
from .group_privacy import KNOWLEDGE_KINDS
from .guidance import GuideQuery, filter_techniques, registry, runner_schemas
from .jobs import JobRunner
from .repo import Repository
from .stats import variants
from .xes import parse_xes

_NOT_FOUND = (UnknownEntry, UnknownTechnique)
_BAD_REQUEST = (ParseFailure, MalformedXml, SchemaViolation, MalformedAbstraction)


def _entry_kind(filename: str) -> str:
    lowered = (filename or "").lower()
    if lowered.endswith(".xes"):
        return "xes"
    if lowered.endswith(".ela"):
        return "ela"
    raise ParseFailure(f"cannot tell the artifact kind from filename {filename!r}")


def create_app(repo_root=None, max_workers: int = 2) -> FastAPI:
    app = FastAPI(title="pc4pm", version="1.0")
    # The analyst console is a static page served from anywhere; the service
    # carries no credentials, so cross-origin reads are safe to allow.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    repo = Repository(repo_root)
    runner = JobRunner(repo, max_workers=max_workers)
    app.state.repo = repo
    app.state.runner = runner

    @app.exception_handler(Pc4pmError)
    async def _pc4pm_error(request: Request, exc: Pc4pmError):
        if isinstance(exc, _NOT_FOUND):
            return JSONResponse(status_code=404, content={"detail": str(exc)})
        if isinstance(exc, ParameterValidation):
            return JSONResponse(
                status_code=422,
                content={"detail": str(exc), "messages": exc.messages},
            )
        if isinstance(exc, _BAD_REQUEST):
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # -- techniques and guidance ---------------------------------------------

    @app.get("/techniques")
    def techniques():
        return {
            "techniques": [sig.as_dict() for sig in registry()],
            "runners": runner_schemas(),
        }

    @app.post("/guide")
    def guide(body: Optional[dict] = None):
        body = body or {}
        unknown = set(body) - {"pmps", "pmac", "prps", "prac"}
        if unknown:
            raise ParameterValidation(
                {name: "unknown guide dimension" for name in sorted(unknown)}
            )
        try:
            query = GuideQuery(
                pmps=body.get("pmps"),
                pmac=body.get("pmac"),
                prps=body.get("prps"),
                prac=body.get("prac"),
            )
        except ModelInvariantError as exc:
            raise ParameterValidation({"choice": str(exc)}) from exc
        return {"techniques": filter_techniques(query)}

    # -- repository ------------------------------------------------------------

    @app.get("/logs")
    def list_logs():
        return {"entries": [e.as_dict() for e in repo.list_entries()]}

    @app.post("/logs", status_code=201)
    async def upload_log(
        file: UploadFile = File(...),
        name: Optional[str] = Form(None),
    ):
        content = await file.read()
        kind = _entry_kind(file.filename)
        entry = repo.store(content, kind=kind, name=name or file.filename)
        return entry.as_dict()

    @app.get("/logs/{entry_id}")
    def show_log(entry_id: str):
        entry = repo.get(entry_id)
        doc = entry.as_dict()
        if entry.kind == "xes":
            log = parse_xes(repo.content(entry_id))
            doc["summary"] = {
                "traces": len(log.traces),
                "events": log.event_count,
                "variants": len(variants(log)),
                "operation_records": len(log.privacy_metadata.records),
                "operations": [
                    {
                        "seq": record.seq,
                        "operation_kind": record.operation_kind,
                        "level": record.level,
                        "target_attributes": sorted(record.target_attributes),
                    }
                    for record in log.privacy_metadata.records
                ],
            }
        return doc

    @app.get("/logs/{entry_id}/content")
    def log_content(entry_id: str):
        entry = repo.get(entry_id)
        media = "application/xml" if entry.kind == "xes" else "application/json"
        return Response(content=repo.content(entry_id), media_type=media)

    @app.get("/logs/{entry_id}/lineage")
    def log_lineage(entry_id: str):
        return repo.lineage(entry_id)

    @app.delete("/logs/{entry_id}")
    def delete_log(entry_id: str):
        repo.delete(entry_id)
        return {"deleted": entry_id}

    # -- jobs -------------------------------------------------------------------

    @app.post("/jobs", status_code=201)
    def submit_job(body: dict):
        unknown = set(body) - {"technique", "input", "params", "seed", "worker_count"}
        if unknown:
            raise ParameterValidation(
                {name: "unknown job field" for name in sorted(unknown)}
            )
        if "technique" not in body or "input" not in body:
            raise ParameterValidation(
                {
                    name: "required job field is missing"
                    for name in ("technique", "input")
                    if name not in body
                }
            )
        job_id = runner.submit(
            body["technique"],
            body["input"],
            body.get("params") or {},
            seed=int(body.get("seed", 0)),
            worker_count=int(body.get("worker_count", 1)),
        )
        return runner.status(job_id)

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        return runner.status(job_id)

    # -- analyses -----------------------------------------------------------------

    @app.get("/analysis/risk")
    def analysis_risk(log: str, kind: str = "set", l: int = 1):
        if kind not in KNOWLEDGE_KINDS:
            raise ParameterValidation(
                {"kind": f"must be one of {', '.join(KNOWLEDGE_KINDS)}"}
            )
        if l < 1:
            raise ParameterValidation({"l": "must be at least 1"})
        entry = repo.get(log)
        if entry.kind != "xes":
            raise ParameterValidation({"log": f"entry {log} is not an event log"})
        report = disclosure_risk(parse_xes(repo.content(log)), kind, l)
        return report.as_dict()

    @app.get("/analysis/utility")
    def analysis_utility(original: str, anonymized: str):
        logs = {}
        for label, entry_id in (("original", original), ("anonymized", anonymized)):
            entry = repo.get(entry_id)
            if entry.kind != "xes":
                raise ParameterValidation(
                    {label: f"entry {entry_id} is not an event log"}
                )
            logs[label] = parse_xes(repo.content(entry_id))
        report = data_utility(logs["original"], logs["anonymized"])
        return report.as_dict()

    return app
