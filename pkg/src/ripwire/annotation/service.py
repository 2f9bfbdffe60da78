"""HTTP facade over the report store.

Endpoints (structured-text payloads):

    GET  /api/reports?status=&page=       paged summaries
    GET  /api/reports/{id}?tweet_page=    one report with a timeline page
    POST /api/reports/{id}/annotation     submit a label or a skip
    GET  /api/export                      tab-separated labeled dataset

Semantic problems map to 400, unknown report ids to 404. The optional
static directory serves the browser client; API routes take precedence.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from ripwire.annotation.store import (
    AnnotationRecord,
    ReportStore,
    UnknownReportError,
)
from ripwire.errors import ConfigurationError

__all__ = ["create_app", "serve", "main"]


def create_app(store: ReportStore, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="ripwire annotation", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownReportError)
    async def _unknown_report(request: Request, exc: UnknownReportError):
        return JSONResponse(
            status_code=404, content={"detail": f"unknown report: {exc.args[0]}"}
        )

    @app.exception_handler(ConfigurationError)
    async def _bad_request(request: Request, exc: ConfigurationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/reports")
    def list_reports(status: str = "all", page: int = 1):
        summaries = store.list_reports(status=status, page=page)
        body = {
            "reports": summaries,
            "page": page,
            "page_count": store.page_count(status),
        }
        body.update(store.counts())
        return body

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str, tweet_page: int = 1):
        return store.get_report(report_id, tweet_page=tweet_page)

    @app.post("/api/reports/{report_id}/annotation")
    def submit_annotation(report_id: str, payload: dict = Body(...)):
        body_id = payload.get("report_id")
        if body_id is not None and body_id != report_id:
            raise ConfigurationError(
                f"payload report_id {body_id!r} does not match path {report_id!r}"
            )
        annotator = str(payload.get("annotator") or "anonymous")
        annotated_at = int(payload.get("annotated_at") or time.time())
        if payload.get("skip"):
            counts = store.skip(report_id, annotator, annotated_at)
            return {"ok": True, "skipped": True, **counts}
        missing = [k for k in ("resolved_person_id", "label") if not payload.get(k)]
        if missing:
            raise ConfigurationError(f"missing fields: {', '.join(missing)}")
        record = AnnotationRecord(
            report_id=report_id,
            resolved_person_id=str(payload["resolved_person_id"]),
            label=str(payload["label"]),
            annotator=annotator,
            annotated_at=annotated_at,
        )
        counts = store.submit(record)
        return {"ok": True, "report_id": report_id, **counts}

    @app.get("/api/export")
    def export():
        return PlainTextResponse(store.export_labels())

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def serve(store_dir: str, host: str, port: int, static_dir: str | None = None) -> None:
    import uvicorn

    store = ReportStore(store_dir)
    app = create_app(store, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="annotate-serve",
        description="Serve the report annotation API and browser client.",
    )
    parser.add_argument("--store", required=True, help="report store directory")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument(
        "--static",
        default=None,
        help="directory with the built browser client (optional)",
    )
    args = parser.parse_args(argv)
    if args.static is not None and not Path(args.static).is_dir():
        print(f"annotate-serve: no such directory: {args.static}", file=sys.stderr)
        return 2
    try:
        serve(args.store, args.host, args.port, static_dir=args.static)
    except ConfigurationError as exc:
        print(f"annotate-serve: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
