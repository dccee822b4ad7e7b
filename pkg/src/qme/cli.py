"""``qme`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 model errors, 3 I/O errors,
4 data errors.  Option values resolve as: command-line flag, then
environment variable, then config file (``--config`` or ``QME_CONFIG``,
a JSON object keyed by option name), then built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

import jsonschema

from . import __version__
from .adaptation import AdaptationGoal, adapt, default_clock
from .calibration import calibrate_model, read_corpus
from .engine.assess import Assessor
from .engine.result import AssessmentResult
from .errors import (
    DataError,
    EmptyInput,
    GoalMatchesNothing,
    LinkError,
    ModelFormatError,
    ModelInvalid,
    ModelMismatch,
    NonFiniteInput,
)
from .ingestion import ingest_findings, ingest_metrics, merge, read_findings, read_metrics
from .model.io import dumps_module, load_modules, load_schema
from .model.link import link
from .model.types import QualityModel
from .model.validate import errors, validate
from .reporting import kiviat_dumps, render_html, sunburst_dumps, to_kiviat, to_sunburst

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_IO, EXIT_DATA = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers ---------------------------------------------------------------------------


def write_atomic(path: str | Path, data: str | bytes) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


class Settings:
    """Resolved option values (flag > environment > config file > default)."""

    ENV = {"jobs": "QME_JOBS"}

    def __init__(self, args: argparse.Namespace):
        self.args = args
        cfg_path = getattr(args, "config", None) or os.environ.get("QME_CONFIG")
        self.config: dict[str, Any] = {}
        if cfg_path:
            try:
                self.config = json.loads(Path(cfg_path).read_text("utf-8"))
            except json.JSONDecodeError as exc:
                raise UsageError(f"config file {cfg_path}: {exc}") from exc
            if not isinstance(self.config, dict):
                raise UsageError(f"config file {cfg_path}: expected a JSON object")

    def get(self, name: str, default: Any = None, conv: Callable[[Any], Any] = lambda x: x) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        env = self.ENV.get(name)
        if env and os.environ.get(env):
            try:
                return conv(os.environ[env])
            except ValueError as exc:
                raise UsageError(f"{env}={os.environ[env]!r}: {exc}") from exc
        if name in self.config:
            return conv(self.config[name])
        return default


def _positive_int(text: Any) -> int:
    n = int(text)
    if n < 1:
        raise ValueError("must be at least 1")
    return n


def _say(args: argparse.Namespace, msg: str = "") -> None:
    if not getattr(args, "quiet", False):
        print(msg)


def _load_model(paths: Sequence[str], settings: Settings) -> tuple[QualityModel, list[str]]:
    strict = not settings.get("lenient", False)
    files = [Path(p) for p in paths]
    for p in files:
        if not p.exists():
            raise FileNotFoundError(f"model path {p} does not exist")
    modules, warnings = load_modules(files, strict=strict)
    if not modules:
        raise ModelFormatError(f"no module files found in {', '.join(paths)}")
    return link(modules), warnings


def _clock(settings: Settings) -> Callable[[], datetime]:
    if settings.get("deterministic", False):
        return lambda: datetime.fromtimestamp(int(os.environ.get("SOURCE_DATE_EPOCH", "0")), tz=timezone.utc)
    return default_clock


def _timestamp(settings: Settings) -> str | None:
    if settings.get("timestamp", False) and not settings.get("deterministic", False):
        return default_clock().isoformat(timespec="seconds")
    return None


def _write_modules(model: QualityModel, out: Path) -> list[Path]:
    written = []
    for m in model.modules:
        path = out / f"{m.id}.json"
        write_atomic(path, dumps_module(m))
        written.append(path)
    return written


# -- commands ----------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    model, warnings = _load_model(args.paths, settings)
    findings = validate(model)
    for w in warnings:
        print(f"warning: {w}")
    if args.format == "json":
        print(json.dumps([f.to_dict() for f in findings], indent=2))
    else:
        for f in findings:
            print(f"{f.level} {f.rule} {f.element}: {f.message}")
    n_err = len(errors(findings))
    _say(args, f"{len(model.modules)} module(s), {model.element_count()} element(s): "
         f"{n_err} error(s), {len(findings) - n_err} warning(s)")
    return EXIT_MODEL if n_err else EXIT_OK


def cmd_calibrate(args: argparse.Namespace, settings: Settings) -> int:
    model, _ = _load_model(args.model, settings)
    corpus = read_corpus(args.corpus)
    calibrated, report = calibrate_model(model, corpus)
    problems = errors(validate(calibrated))
    if problems:
        raise ModelInvalid(problems)
    written = _write_modules(calibrated, Path(args.out))
    if args.stats:
        write_atomic(args.stats, report.dumps())
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _say(args, f"calibrated {len(report.stats)} measure(s) from {len(corpus.systems)} system(s); "
         f"wrote {len(written)} module(s) to {args.out}")
    return EXIT_OK


def _dataset(model: QualityModel, system_id: str, findings: Sequence[Path], metrics: Sequence[Path], tools_ran):
    for p in (*findings, *metrics):
        if not p.is_file():
            raise FileNotFoundError(f"input file {p} does not exist")
    records = [r for p in findings for r in read_findings(p)]
    tools = tools_ran if tools_ran is not None else sorted({r.tool for r in records})
    parts = [ingest_findings(records, model, tools_ran=tools)] if findings else []
    parts += [ingest_metrics(read_metrics(p), model) for p in metrics]
    return merge(system_id, parts)


def _system_inputs(directory: Path) -> tuple[list[Path], list[Path]]:
    if not directory.is_dir():
        raise FileNotFoundError(f"system directory {directory} does not exist")
    findings = sorted(directory.glob("*findings*.csv"))
    metrics = sorted(directory.glob("*metrics*.csv"))
    return findings, metrics


def cmd_assess(args: argparse.Namespace, settings: Settings) -> int:
    model, _ = _load_model(args.model, settings)
    assessor = Assessor(model)
    tools_ran = [t for t in args.tools_ran.split(",") if t] if args.tools_ran is not None else None
    stamp = _timestamp(settings)

    if args.batch:
        jobs = settings.get("jobs", 1, _positive_int)
        dirs = [Path(d) for d in args.batch]
        ids = [d.name for d in dirs]
        if len(set(ids)) != len(ids):
            raise UsageError("batch system directories must have distinct names")

        def one(d: Path) -> AssessmentResult:
            findings, metrics = _system_inputs(d)
            return assessor.assess(_dataset(model, d.name, findings, metrics, tools_ran))

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, dirs))
        out = Path(args.out)
        for r in results:
            write_atomic(out / f"{r.system_id}.json", r.dumps())
            if args.html:
                write_atomic(out / f"{r.system_id}.html", render_html(r, generated_at=stamp))
            _summary(args, r)
        return EXIT_OK

    if not args.findings and not args.metrics:
        raise UsageError("assess needs --findings and/or --metrics, or --batch")
    system_id = args.system_id or "system"
    dataset = _dataset(model, system_id, [Path(p) for p in args.findings], [Path(p) for p in args.metrics], tools_ran)
    result = assessor.assess(dataset)
    write_atomic(args.out, result.dumps())
    if args.html:
        write_atomic(args.html, render_html(result, generated_at=stamp))
    if args.sunburst:
        write_atomic(args.sunburst, sunburst_dumps(to_sunburst(result)))
    _summary(args, result)
    return EXIT_OK


def _summary(args: argparse.Namespace, r: AssessmentResult) -> None:
    lo, hi = r.root.utility.lo, r.root.utility.hi
    g = r.root_grade[0]
    _say(args, f"{r.system_id}: utility [{lo:.4f}, {hi:.4f}], grade {g.band} ({g.continuous:.2f}), "
         f"{len(r.warnings)} warning(s)")


def cmd_adapt(args: argparse.Namespace, settings: Settings) -> int:
    model, _ = _load_model(args.model, settings)
    try:
        raw = json.loads(Path(args.goal).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"goal file {args.goal}: {exc}") from exc
    try:
        jsonschema.validate(raw, load_schema("goal"))
    except jsonschema.ValidationError as exc:
        raise DataError(f"goal file {args.goal}: {exc.message}") from exc
    plan = adapt(model, AdaptationGoal.from_dict(raw), clock=_clock(settings))
    _write_modules(plan.model, Path(args.out))
    write_atomic(args.tasks, plan.tasks_json())
    if args.history:
        write_atomic(args.history, plan.history_json())
    if not args.quiet:
        sys.stdout.write(plan.history_text())
        sys.stdout.write(plan.tasks_text())
    _say(args, f"removed {model.element_count() - plan.model.element_count()} element(s); "
         f"{len(plan.tasks)} task(s) written to {args.tasks}")
    return EXIT_OK


def _load_result(path: str) -> AssessmentResult:
    try:
        return AssessmentResult.loads(Path(path).read_text("utf-8"))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"result file {path}: {exc}") from exc


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    result = _load_result(args.result)
    others = [_load_result(p) for p in args.compare]
    kiviat = to_kiviat([*others, result]) if others else None
    sb = to_sunburst(result)
    write_atomic(args.html, render_html(result, sb, kiviat, generated_at=_timestamp(settings)))
    if args.sunburst:
        write_atomic(args.sunburst, sunburst_dumps(sb))
    _summary(args, result)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: Settings) -> int:
    results = [_load_result(p) for p in args.results]
    series = to_kiviat(results)
    write_atomic(args.kiviat, kiviat_dumps(series))
    if args.html:
        write_atomic(args.html, render_html(results[-1], None, series, generated_at=_timestamp(settings)))
    prev = None
    for s in series:
        delta = "" if prev is None else f" ({s.root_grade - prev:+.2f})"
        _say(args, f"{s.system_id}: grade {s.root_grade:.2f}{delta}, band {s.root_band}")
        prev = s.root_grade
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="lenient", action="store_false", default=None,
                      help="reject unknown attributes in module files (default)")
    mode.add_argument("--lenient", dest="lenient", action="store_true", default=None,
                      help="ignore unknown attributes in module files, with a warning")
    common.add_argument("--deterministic", action="store_true", default=None,
                        help="fixed timestamps (SOURCE_DATE_EPOCH or 0) in all outputs")
    common.add_argument("--timestamp", action="store_true", default=None,
                        help="print a generation time in HTML reports")
    common.add_argument("-q", "--quiet", action="store_true", help="print errors only")

    p = _Parser(prog="qme", description="Quality-model based software quality assessment.")
    p.add_argument("--version", action="version", version=f"qme {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", parents=[common], help="check module files")
    v.add_argument("paths", nargs="+", help="module files or directories")
    v.add_argument("--format", choices=["text", "json"], default="text")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("calibrate", parents=[common], help="derive utility thresholds from a benchmark corpus")
    c.add_argument("--model", nargs="+", required=True)
    c.add_argument("--corpus", required=True, help="system_id,measure_id,value CSV")
    c.add_argument("--out", required=True, help="directory for the calibrated modules")
    c.add_argument("--stats", help="JSON file for per-measure calibration statistics")
    c.set_defaults(func=cmd_calibrate)

    a = sub.add_parser("assess", parents=[common], help="assess one or more systems")
    a.add_argument("--model", nargs="+", required=True)
    a.add_argument("--findings", nargs="+", action="extend", default=[], help="tool findings CSV files")
    a.add_argument("--metrics", nargs="+", action="extend", default=[], help="metric CSV files")
    a.add_argument("--batch", nargs="+", metavar="DIR",
                   help="system directories holding *findings*.csv / *metrics*.csv; --out is then a directory")
    a.add_argument("--out", required=True)
    a.add_argument("--html", nargs="?", const=True, default=None,
                   help="HTML report path (in batch mode: flag only, written next to each result)")
    a.add_argument("--sunburst", help="write sunburst chart data as JSON")
    a.add_argument("--system-id")
    a.add_argument("--tools-ran", help="comma-separated tools whose clean runs count as zero findings "
                   "(default: tools present in the findings files)")
    a.add_argument("--jobs", type=_positive_int, help="parallel systems in batch mode (env QME_JOBS)")
    a.set_defaults(func=cmd_assess)

    d = sub.add_parser("adapt", parents=[common], help="tailor a model to a goal")
    d.add_argument("--model", nargs="+", required=True)
    d.add_argument("--goal", required=True)
    d.add_argument("--out", required=True, help="directory for the tailored modules")
    d.add_argument("--tasks", required=True, help="JSON file for the adaptation tasks")
    d.add_argument("--history", help="JSON file for the adaptation history")
    d.set_defaults(func=cmd_adapt)

    r = sub.add_parser("report", parents=[common], help="render an HTML report from a result file")
    r.add_argument("--result", required=True)
    r.add_argument("--html", required=True)
    r.add_argument("--sunburst")
    r.add_argument("--compare", nargs="+", default=[], help="earlier result files to chart alongside")
    r.set_defaults(func=cmd_report)

    k = sub.add_parser("compare", parents=[common], help="compare results of several systems or versions")
    k.add_argument("--results", nargs="+", required=True)
    k.add_argument("--kiviat", required=True)
    k.add_argument("--html", help="HTML report of the last result with the comparison chart")
    k.set_defaults(func=cmd_compare)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "assess" and args.batch and isinstance(args.html, str):
        parser.error("in batch mode --html takes no path")
    if args.command == "assess" and not args.batch and args.html is True:
        parser.error("--html needs a path")
    try:
        return args.func(args, Settings(args))
    except UsageError as exc:
        print(f"qme: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFormatError, LinkError, ModelInvalid) as exc:
        print(f"qme: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (DataError, NonFiniteInput, EmptyInput, GoalMatchesNothing, ModelMismatch) as exc:
        print(f"qme: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"qme: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())
