"""Command-line pipeline: ingest -> survival -> assess -> classify -> report / explain."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click

from . import catalog
from .catalog import ObjectType, parse_enum
from .classifier import CaptureRule, default_rules, explain, load_rule_config
from .config import (
    CI_METHODS,
    DEFAULT_BATCH_SIZE,
    DEFAULT_ENDPOINT,
    DEFAULT_THRESHOLDS,
    SurvivalConfig,
    ThresholdConfig,
    configure_logging,
)
from .errors import InvalidArguments, SchemaViolation, TriageError, UnknownSubject
from .fileio import atomic_write_text, read_bytes
from .ingest import (
    Diagnostic,
    StructuredRecord,
    merge,
    parse_annotations,
    parse_events,
    parse_given_values,
    parse_structured_document,
)
from .pipeline import Inputs, assess_all, assessment_csv, classify_all, classify_batches, result_lines
from .report import render_csv, render_json, render_table, summarize, to_csv_files
from .survival import BreakupClass, CohortEstimator, build_cohort, estimate

logger = logging.getLogger(__name__)

FORMATS = ("table", "csv", "json")


class TriageGroup(click.Group):
    """Turns package errors into a JSON error report and the documented exit code."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            param = getattr(exc, "param", None)
            self._fail(ctx, InvalidArguments(exc.format_message(), param.name if param is not None else None))
        except TriageError as exc:
            self._fail(ctx, exc)

    def _fail(self, ctx: click.Context, exc: TriageError) -> None:
        report = json.dumps(exc.to_report(), indent=2, default=str)
        output = (ctx.obj or {}).get("output")
        if output is not None:
            try:
                atomic_write_text(Path(output) / "error.json", report + "\n")
            except TriageError:
                pass
        click.echo(report, err=True)
        ctx.exit(exc.exit_code)


def _input_options(func: Callable) -> Callable:
    options = [
        click.option("--objects", "objects_path", type=click.Path(dir_okay=False), help="Object store written by `ingest`."),
        click.option("--catalog", "catalog_paths", multiple=True, type=click.Path(dir_okay=False), help="JSON:API catalog page (repeatable)."),
        click.option("--annotations", type=click.Path(dir_okay=False), help="Curated annotation CSV."),
        click.option("--given", "given_path", type=click.Path(dir_okay=False), help="CSV of given orbit ages / breakup probabilities."),
        click.option("--events", "events_path", type=click.Path(dir_okay=False), help="Event history CSV for survival estimates."),
        click.option("--rules", "rules_path", type=click.Path(dir_okay=False), help="Rule configuration (JSON)."),
        click.option("--thresholds", "thresholds_path", type=click.Path(dir_okay=False), help="Threshold overrides (JSON)."),
        click.option("--window-end", type=click.DateTime(formats=["%Y-%m-%d"]), help="Observation window end, YYYY-MM-DD."),
        click.option("--alpha", type=float, default=0.05, show_default=True, help="Confidence band level is 1 - alpha."),
        click.option("--ci-method", type=click.Choice(CI_METHODS), default="linear", show_default=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _output_options(func: Callable) -> Callable:
    func = click.option("--verbose", is_flag=True, help="Debug logging and rationale text.")(func)
    func = click.option("--output", type=click.Path(file_okay=False), help="Directory for output files.")(func)
    func = click.option("--format", "fmt", type=click.Choice(FORMATS), default="table", show_default=True)(func)
    return func


def _start(ctx: click.Context, output: Optional[str], verbose: bool) -> None:
    configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["output"] = output


def _resolve_config(rules_path: Optional[str], thresholds_path: Optional[str], window_end: Optional[Any]) -> Tuple[List[CaptureRule], ThresholdConfig]:
    cfg = DEFAULT_THRESHOLDS
    rules = default_rules()
    if rules_path:
        config = load_rule_config(read_bytes(rules_path))
        rules = list(config.rules)
        cfg = cfg.with_overrides(config.thresholds)
    if thresholds_path:
        try:
            doc = json.loads(read_bytes(thresholds_path))
        except ValueError as exc:
            raise SchemaViolation("$", f"thresholds file is not JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise SchemaViolation("$", "thresholds file must hold an object")
        cfg = cfg.with_overrides(doc.get("thresholds", doc))
    if window_end is not None:
        cfg = cfg.with_overrides({"window_end": window_end.date()})
    return rules, cfg


def _structured_records(paths: Sequence[str]) -> Tuple[List[StructuredRecord], List[Diagnostic]]:
    records: List[StructuredRecord] = []
    diagnostics: List[Diagnostic] = []
    for path in paths:
        page = parse_structured_document(read_bytes(path))
        records.extend(page.records)
        diagnostics.extend(page.diagnostics)
        if page.next_link:
            logger.info("%s links a further page: %s", path, page.next_link)
    return records, diagnostics


def _load_inputs(params: Dict[str, Any], cfg: ThresholdConfig) -> Inputs:
    diagnostics: List[Diagnostic] = []
    if params.get("objects_path"):
        objects = catalog.load(params["objects_path"])
    elif params.get("catalog_paths") and params.get("annotations"):
        structured, diagnostics = _structured_records(params["catalog_paths"])
        annotations = parse_annotations(read_bytes(params["annotations"]))
        merged = merge(structured, annotations.records)
        diagnostics += annotations.diagnostics + merged.diagnostics
        _echo_unmatched(merged.unmatched_structured, merged.unmatched_annotations)
        objects = merged.objects
    else:
        raise click.UsageError("give --objects, or --catalog together with --annotations")

    inputs = Inputs(objects=objects, diagnostics=diagnostics)
    if params.get("given_path"):
        given = parse_given_values(read_bytes(params["given_path"]))
        inputs.given = {g.cospar_id: g for g in given.records}
        known = {o.id for o in objects}
        unknown = sorted(set(inputs.given) - known)
        if unknown:
            raise UnknownSubject(unknown[0])
    if params.get("events_path"):
        events = parse_events(read_bytes(params["events_path"]))
        survival_cfg = SurvivalConfig(params.get("alpha", 0.05), params.get("ci_method", "linear"))
        inputs.estimator = CohortEstimator(objects, events.records, cfg.window_end, survival_cfg)
    return inputs


def _echo_unmatched(structured: Sequence[str], annotations: Sequence[str]) -> None:
    if structured:
        click.echo(f"unmatched structured ids: {', '.join(structured)}", err=True)
    if annotations:
        click.echo(f"unmatched annotation ids: {', '.join(annotations)}", err=True)


def _emit(text: str, output: Optional[str], filename: str) -> None:
    if output:
        atomic_write_text(Path(output) / filename, text)
    else:
        click.echo(text, nl=False)


@click.group(cls=TriageGroup)
@click.pass_context
def main(ctx: click.Context) -> None:
    """Characterise derelict objects, rate breakup criticality and pick ADR capture methods."""
    ctx.ensure_object(dict)


@main.command()
@click.option("--catalog", "catalog_paths", multiple=True, type=click.Path(dir_okay=False), help="JSON:API catalog page (repeatable).")
@click.option("--fetch", "fetch_query", default=None, help="Fetch the catalog from DISCOSweb with this filter instead.")
@click.option("--annotations", required=True, type=click.Path(dir_okay=False))
@click.option("--diagnostics", "diagnostics_path", type=click.Path(dir_okay=False), help="Write machine-readable diagnostics here.")
@click.option("--output", type=click.Path(file_okay=False), help="Directory for objects.jsonl.")
@click.option("--verbose", is_flag=True)
@click.pass_context
def ingest(ctx, catalog_paths, fetch_query, annotations, diagnostics_path, output, verbose) -> None:
    """Merge catalog pages and annotations into a validated object store."""
    _start(ctx, output, verbose)
    if fetch_query is not None:
        from .discos import DiscosClient

        structured, diagnostics = DiscosClient(endpoint=DEFAULT_ENDPOINT).fetch_objects(fetch_query or None)
    elif catalog_paths:
        structured, diagnostics = _structured_records(catalog_paths)
    else:
        raise click.UsageError("give --catalog or --fetch")

    parsed = parse_annotations(read_bytes(annotations))
    merged = merge(structured, parsed.records)
    diagnostics = diagnostics + parsed.diagnostics + merged.diagnostics
    _echo_unmatched(merged.unmatched_structured, merged.unmatched_annotations)

    if diagnostics_path:
        doc = {
            "diagnostics": [d.to_dict() for d in diagnostics],
            "unmatched_structured": merged.unmatched_structured,
            "unmatched_annotations": merged.unmatched_annotations,
        }
        atomic_write_text(diagnostics_path, json.dumps(doc, indent=2) + "\n")
    _emit(catalog.render_store(merged.objects), output, "objects.jsonl")
    click.echo(f"{len(merged.objects)} object(s) merged", err=True)


@main.command()
@_input_options
@click.option("--breakup-class", "breakup_classes", multiple=True, type=click.Choice([c.value for c in BreakupClass]), help="Target breakup class (repeatable; default all).")
@click.option("--object-type", type=click.Choice(["PL", "RB"]), help="Restrict the cohort to one object type.")
@click.option("--output", type=click.Path(file_okay=False), help="Directory for survival.csv.")
@click.option("--verbose", is_flag=True)
@click.pass_context
def survival(ctx, breakup_classes, object_type, output, verbose, **params) -> None:
    """Export the product-limit curve with confidence bands as plot-ready CSV."""
    _start(ctx, output, verbose)
    if not params.get("events_path"):
        raise click.UsageError("survival needs --events")
    _, cfg = _resolve_config(params["rules_path"], params["thresholds_path"], params["window_end"])
    inputs = _load_inputs({**params, "events_path": None}, cfg)
    objects = inputs.objects
    events = parse_events(read_bytes(params["events_path"])).records
    known = {o.id for o in objects}
    for event in events:
        if event.cospar_id.strip() not in known:
            raise UnknownSubject(event.cospar_id.strip())
    if object_type:
        wanted = parse_enum(ObjectType, object_type)
        objects = [o for o in objects if o.object_type is wanted]
        ids = {o.id for o in objects}
        events = [e for e in events if e.cospar_id.strip() in ids]

    targets = [BreakupClass(c) for c in breakup_classes] or list(BreakupClass)
    records = build_cohort(objects, events, targets, cfg.window_end)
    curve = estimate(records, SurvivalConfig(params["alpha"], params["ci_method"]))
    _emit(curve.to_csv(), output, "survival.csv")


@main.command()
@_input_options
@_output_options
@click.pass_context
def assess(ctx, fmt, output, verbose, **params) -> None:
    """Severity, probability and criticality numbers per object."""
    _start(ctx, output, verbose)
    _, cfg = _resolve_config(params["rules_path"], params["thresholds_path"], params["window_end"])
    assessments = assess_all(_load_inputs(params, cfg), cfg)

    if fmt == "json":
        rows = [{**a.to_row(), "rationale": list(a.rationale)} if verbose else a.to_row() for a in assessments]
        _emit(json.dumps(rows, indent=2) + "\n", output, "assessments.json")
    elif fmt == "csv":
        _emit(assessment_csv(assessments, verbose), output, "assessments.csv")
    else:
        lines = []
        for a in assessments:
            lines.append(f"{a.cospar_id:<11} SN {a.sn}  PN {a.pn}  CN {a.cn:>2}  {a.level.label}")
            if verbose:
                lines.extend(f"    {note}" for note in a.rationale)
        _emit("\n".join(lines) + ("\n" if lines else ""), output, "assessments.txt")


@main.command()
@_input_options
@click.option("--batch-size", type=int, default=DEFAULT_BATCH_SIZE, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True, help="Threads per batch.")
@click.option("--output", type=click.Path(file_okay=False), help="Directory for results.jsonl.")
@click.option("--verbose", is_flag=True)
@click.pass_context
def classify(ctx, batch_size, workers, output, verbose, **params) -> None:
    """Match every object against the capture rules; one JSON result per line."""
    _start(ctx, output, verbose)
    rules, cfg = _resolve_config(params["rules_path"], params["thresholds_path"], params["window_end"])
    inputs = _load_inputs(params, cfg)
    assessments = assess_all(inputs, cfg)

    collected = []
    for batch in classify_batches(inputs.objects, assessments, rules, cfg, batch_size, workers):
        if output:
            collected.extend(batch)
        else:
            click.echo(result_lines(batch), nl=False)
    if output:
        atomic_write_text(Path(output) / "results.jsonl", result_lines(collected))


@main.command()
@_input_options
@_output_options
@click.option("--percentiles", nargs=2, type=float, default=(25.0, 75.0), show_default=True, help="Interpercentile range bounds.")
@click.option("--batch-size", type=int, default=DEFAULT_BATCH_SIZE, show_default=True)
@click.pass_context
def report(ctx, fmt, output, verbose, percentiles, batch_size, **params) -> None:
    """Per-method medians and the object-type / CN / regime breakdowns."""
    _start(ctx, output, verbose)
    rules, cfg = _resolve_config(params["rules_path"], params["thresholds_path"], params["window_end"])
    inputs = _load_inputs(params, cfg)
    assessments = assess_all(inputs, cfg)
    results = classify_all(inputs.objects, assessments, rules, cfg, batch_size)
    summary = summarize(results, assessments, inputs.objects, cfg, tuple(percentiles))

    if fmt == "csv":
        if output:
            for name, text in to_csv_files(summary).items():
                atomic_write_text(Path(output) / name, text)
        else:
            click.echo(render_csv(summary), nl=False)
    elif fmt == "json":
        _emit(render_json(summary), output, "report.json")
    else:
        _emit(render_table(summary), output, "report.txt")


@main.command(name="explain")
@click.argument("cospar_id")
@_input_options
@click.option("--output", type=click.Path(file_okay=False), help="Directory for <id>.txt.")
@click.option("--verbose", is_flag=True)
@click.pass_context
def explain_command(ctx, cospar_id, output, verbose, **params) -> None:
    """Slot-by-slot trace of every rule for one object."""
    _start(ctx, output, verbose)
    rules, cfg = _resolve_config(params["rules_path"], params["thresholds_path"], params["window_end"])
    inputs = _load_inputs(params, cfg)
    wanted = catalog.CosparId(cospar_id).value
    inputs.objects = [o for o in inputs.objects if o.id == wanted]
    if not inputs.objects:
        raise UnknownSubject(wanted)
    assessments = assess_all(inputs, cfg)
    result = classify_all(inputs.objects, assessments, rules, cfg)[0]

    text = explain(result)
    if verbose:
        text += "\ncriticality:\n" + "".join(f"  {note}\n" for note in assessments[0].rationale)
    _emit(text, output, f"{wanted}.txt")


__all__ = ["main"]
