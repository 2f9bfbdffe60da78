"""Annotation workflow: report store, HTTP service, label export."""

from ripwire.annotation.store import (
    PAGE_SIZE,
    TWEET_PAGE_SIZE,
    AnnotationRecord,
    ReportStore,
    UnknownReportError,
)

__all__ = [
    "PAGE_SIZE",
    "TWEET_PAGE_SIZE",
    "AnnotationRecord",
    "ReportStore",
    "UnknownReportError",
]
