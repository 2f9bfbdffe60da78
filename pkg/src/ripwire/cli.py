"""Command line entry point: `ripwire <stage> --config FILE`.

Exit codes: 0 success, 1 usage problem, 2 data or configuration
problem, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from ripwire.corpus.records import RecordError
from ripwire.errors import ConfigurationError, LeakageError
from ripwire.pipeline import (
    STAGES,
    MissingArtifactError,
    PipelineConfig,
    parse_config_file,
    run_stage,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on errors; raise instead so main can
    # map usage problems to exit code 1.
    def error(self, message):
        raise _UsageError(message)


_STAGE_HELP = {
    "synth": "generate the synthetic benchmark corpus, knowledge base, and labels",
    "ingest": "keep only tweets that pass the uppercase keyword filter",
    "link": "match filtered tweets against knowledge-base names",
    "build-reports": "aggregate matches into report instances and seed the store",
    "train-embeddings": "train the shared and per-class embedding models",
    "featurize": "write the feature matrix for one feature set",
    "train": "fit the report classifier from the feature matrix",
    "evaluate": "run the experiment grid and emit result tables",
    "annotate-serve": "serve the annotation API over HTTP",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ripwire",
        description="Pipeline for early detection of hoax death reports.",
    )
    sub = parser.add_subparsers(dest="stage", metavar="stage")
    for name in STAGES:
        stage = sub.add_parser(name, help=_STAGE_HELP[name], description=_STAGE_HELP[name])
        stage.add_argument("--config", required=True, help="key = value config file")
        stage.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        if name == "evaluate":
            stage.add_argument(
                "--grid",
                help="extra key = value file with grid settings (keys without a "
                "dot are treated as grid.*)",
            )
            stage.add_argument("--store", help="override paths.store")
            stage.add_argument("--models", help="override paths.models")
            stage.add_argument("--out", help="override paths.results")
    return parser


def _merge_cli_values(args: argparse.Namespace) -> dict[str, str]:
    values = parse_config_file(args.config)
    if getattr(args, "grid", None):
        for key, value in parse_config_file(args.grid).items():
            values[key if "." in key else f"grid.{key}"] = value
    for flag, key in (("store", "paths.store"), ("models", "paths.models"), ("out", "paths.results")):
        flag_value = getattr(args, flag, None)
        if flag_value:
            values[key] = flag_value
    for item in args.override:
        if "=" not in item:
            raise _UsageError(f"--override expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        values[key.strip()] = value.strip()
    return values


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.stage:
            raise _UsageError("a stage name is required")
        config = PipelineConfig(_merge_cli_values(args))
        stats = run_stage(args.stage, config)
        summary = " ".join(f"{k}={v}" for k, v in stats.items())
        print(f"{args.stage}: ok" + (f" ({summary})" if summary else ""))
        return 0
    except _UsageError as exc:
        print(f"ripwire: {exc}", file=sys.stderr)
        print("usage: ripwire <stage> --config FILE [--override KEY=VALUE]...", file=sys.stderr)
        return 1
    except (
        ConfigurationError,
        RecordError,
        MissingArtifactError,
        LeakageError,
        OSError,
        ValueError,
    ) as exc:
        print(f"ripwire: {exc}", file=sys.stderr)
        return 2
    except Exception:
        print("ripwire: internal error", file=sys.stderr)
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
