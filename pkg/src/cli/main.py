"""Command-line entry point.

Results go to stdout as JSON; diagnostics, the effective configuration and
summary tables go to stderr.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from rich.console import Console
from rich.syntax import Syntax
from rich.table import Table

from src import __version__
from src.core.config import AppConfig, ClockMode, load_config
from src.core.errors import ConfigInvalid, CorpusMissing, IoFailure, PipelineError
from src.core.identity import expected_check_character, validate_id
from src.core.llm_client import build_gateway
from src.core.logger import get_logger, set_console_level
from src.docgen.corpus import generate_corpus, load_manifest, manifest_digest
from src.docgen.models import CorpusSpec, DocumentRef
from src.evaluation.harness import best_methods, digest_config, run_matrix
from src.evaluation.reports import emit_reports, file_digests
from src.extract.models import ExtractionOutcome, Paradigm
from src.ingest.models import DocumentFormat
from src.router.backends import BackendRegistry, IngestBackend
from src.router.policy import MethodConfig, RoutingPolicy, all_methods, default_policy, load_policy
from src.router.router import execute_method, resolve_document, route_and_extract

console = Console(stderr=True)
logger = get_logger(__name__)

EXIT_OK = 0
EXIT_EXTRACTION = 1
EXIT_CONFIG = 2
EXIT_IO = 3

GATEWAY_BACKENDS = ("reference", "remote")
INGEST_BACKENDS = tuple(backend.value for backend in IngestBackend)


def exit_code_for(error: PipelineError) -> int:
    if isinstance(error, ConfigInvalid):
        return EXIT_CONFIG
    if isinstance(error, (IoFailure, CorpusMissing)):
        return EXIT_IO
    return EXIT_EXTRACTION


def emit(record: dict[str, Any]):
    sys.stdout.write(json.dumps(record, ensure_ascii=False, indent=2) + "\n")
    sys.stdout.flush()


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: ./config.yaml when present)")
    common.add_argument("--seed", type=int, help="Global seed for corpus and OCR noise")
    common.add_argument(
        "--backend",
        choices=GATEWAY_BACKENDS + INGEST_BACKENDS,
        help="Gateway backend (reference|remote), or an ingest backend to force for extract",
    )
    common.add_argument("--endpoint", help="Chat-completion endpoint for the remote backend")
    common.add_argument("--policy", help="Routing policy file")
    common.add_argument("--clock", choices=[mode.value for mode in ClockMode], help="Latency accounting")
    common.add_argument("--workers", type=int, help="Worker pool size")
    common.add_argument("--out", help="Output directory (corpus for generate, reports for evaluate)")
    common.add_argument("-v", "--verbose", action="store_true", help="Show progress logs on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="copyheavy",
        description="Format-aware identity extraction: corpus generation, extraction and evaluation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", parents=[common], help="Generate the synthetic corpus")
    generate.add_argument("--docs-per-format", type=int, help="Documents per format")
    generate.add_argument(
        "--formats",
        help="Comma-separated formats (markdown,docx,xlsx,pdf,transcript)",
    )

    extract = commands.add_parser("extract", parents=[common], help="Extract pairs from one document")
    extract.add_argument("document", help="Path to the document")
    extract.add_argument("--paradigm", choices=[p.value for p in Paradigm], help="Force an extraction paradigm")

    evaluate = commands.add_parser("evaluate", parents=[common], help="Run the method x format matrix")
    evaluate.add_argument("--corpus", help="Corpus directory (default: corpus_dir from config)")
    evaluate.add_argument("--methods", help="Comma-separated methods, e.g. native_docx+table,native_docx+direct")

    validate = commands.add_parser("validate-id", help="Check an 18-character ID number")
    validate.add_argument("id_number", help="ID number to check")
    return parser


def config_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Flag values as nested config overrides; flags win over every other source."""
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    gateway: dict[str, Any] = {}
    if args.backend in GATEWAY_BACKENDS:
        gateway["backend"] = args.backend
    if args.endpoint:
        gateway["endpoint"] = args.endpoint
    if gateway:
        overrides["gateway"] = gateway
    if args.policy:
        overrides["policy_path"] = args.policy
    if args.clock:
        overrides["clock"] = args.clock
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out:
        overrides["corpus_dir" if args.command == "generate" else "report_dir"] = args.out

    corpus: dict[str, Any] = {}
    if getattr(args, "docs_per_format", None) is not None:
        corpus["docs_per_format"] = args.docs_per_format
    if getattr(args, "formats", None):
        corpus["formats"] = [item.strip() for item in args.formats.split(",") if item.strip()]
    if corpus:
        overrides["corpus"] = corpus
    return overrides


def show_config(config: AppConfig):
    console.print("[bold cyan]Effective configuration[/bold cyan]")
    console.print(Syntax(config.effective_yaml(), "yaml", theme="ansi_dark"))


def cmd_generate(config: AppConfig) -> int:
    spec = CorpusSpec(**{**config.corpus.model_dump(), "seed": config.corpus_seed})
    out_dir = Path(config.corpus_dir)
    records = generate_corpus(spec, out_dir, workers=config.workers)
    total_pairs = sum(len(record.truth) for record in records)
    digest = manifest_digest(out_dir)
    console.print(f"[green]✓ Generated {len(records)} documents with {total_pairs} pairs[/green]")
    emit({
        "manifest": str(out_dir / "manifest.json"),
        "documents": len(records),
        "pairs": total_pairs,
        "manifest_digest": digest,
    })
    return EXIT_OK


def _policy(config: AppConfig, registry: BackendRegistry) -> RoutingPolicy:
    if config.policy_path is not None:
        return load_policy(config.policy_path)
    return default_policy(remote_ocr_configured=registry.remote_ocr_configured)


def _forced_method(
    doc: DocumentRef,
    policy: RoutingPolicy,
    backend: Optional[str],
    paradigm: Optional[str],
) -> MethodConfig:
    """Forced backend and/or paradigm; missing parts come from the policy's primary choice."""
    if backend and paradigm:
        return MethodConfig(ingest_backend=IngestBackend(backend), paradigm=Paradigm(paradigm))
    primary = policy.chain(doc.format)[0]
    return MethodConfig(
        ingest_backend=IngestBackend(backend) if backend else primary.ingest_backend,
        paradigm=Paradigm(paradigm) if paradigm else primary.paradigm,
    )


def outcome_record(doc: DocumentRef, outcome: ExtractionOutcome) -> dict[str, Any]:
    return {
        "doc_id": doc.doc_id,
        "format": doc.format.value,
        "method": outcome.method,
        "attempts": outcome.attempts,
        "paradigm": outcome.paradigm.value,
        "fatal": outcome.fatal,
        "failure_kind": outcome.failure_kind.value if outcome.failure_kind else None,
        "detail": outcome.detail,
        "pairs": [{"name": pair.name, "id": pair.id_number} for pair in outcome.pairs],
        "timings": {
            "ocr_s": round(outcome.ocr_seconds, 6),
            "llm_s": round(outcome.llm_seconds, 6),
            "total_s": round(outcome.total_seconds, 6),
        },
        "completions": outcome.completions,
        "output_tokens": outcome.output_tokens,
        "dropped_records": outcome.dropped_records,
    }


async def _extract(config: AppConfig, path: Path, forced_backend: Optional[str], paradigm: Optional[str]):
    gateway = build_gateway(config.gateway, config.clock)
    registry = BackendRegistry.from_config(config)
    try:
        policy = _policy(config, registry)
        doc = resolve_document(DocumentRef(doc_id=path.stem, format=DocumentFormat.UNKNOWN, payload_path=path))
        if forced_backend or paradigm:
            method = _forced_method(doc, policy, forced_backend, paradigm)
            outcome = await execute_method(doc, method, registry, gateway)
        else:
            outcome = await route_and_extract(doc, policy, registry, gateway)
        return doc, outcome
    finally:
        await gateway.close()
        await registry.close()


def cmd_extract(config: AppConfig, document: str, backend: Optional[str], paradigm: Optional[str]) -> int:
    path = Path(document)
    if not path.is_file():
        raise IoFailure(f"no such document: {path}")
    forced_backend = backend if backend in INGEST_BACKENDS else None
    doc, outcome = asyncio.run(_extract(config, path, forced_backend, paradigm))
    emit(outcome_record(doc, outcome))
    if outcome.fatal:
        console.print(f"[red]✗ {outcome.failure_kind.value}:[/red] {outcome.detail}")
        return EXIT_EXTRACTION
    console.print(f"[green]✓ {len(outcome.pairs)} pairs via {outcome.method}[/green]")
    return EXIT_OK


def _methods(formats: set[DocumentFormat], names: Optional[str], remote_ocr: bool) -> list[MethodConfig]:
    if names:
        try:
            methods = [MethodConfig.parse(name) for name in names.split(",") if name.strip()]
        except ValueError as e:
            raise ConfigInvalid(str(e)) from e
        return methods
    return [m for m in all_methods(remote_ocr) if any(m.supports(fmt) for fmt in formats)]


async def _evaluate(config: AppConfig, corpus_dir: Path, method_names: Optional[str]):
    records = load_manifest(corpus_dir)
    gateway = build_gateway(config.gateway, config.clock)
    registry = BackendRegistry.from_config(config)
    try:
        methods = _methods({r.format for r in records}, method_names, registry.remote_ocr_configured)
        return await run_matrix(
            records,
            methods,
            registry,
            gateway,
            clock_mode=config.clock,
            corpus_digest=manifest_digest(corpus_dir),
            config_digest=digest_config(config.digest_payload()),
            workers=config.workers,
        )
    finally:
        await gateway.close()
        await registry.close()


def show_best(best: dict):
    table = Table(title="Best method per format", show_header=True, header_style="bold magenta")
    table.add_column("Format")
    table.add_column("Method")
    table.add_column("F1", justify="right")
    table.add_column("Success", justify="right")
    table.add_column("Total (s)", justify="right")
    for fmt, cell in best.items():
        table.add_row(fmt.value, cell.method, f"{cell.f1:.3f}", f"{cell.success_rate:.0%}", f"{cell.total_s:.2f}")
    console.print(table)


def cmd_evaluate(config: AppConfig, corpus: Optional[str], method_names: Optional[str]) -> int:
    corpus_dir = Path(corpus) if corpus else Path(config.corpus_dir)
    report = asyncio.run(_evaluate(config, corpus_dir, method_names))
    written = emit_reports(report, Path(config.report_dir))
    best = best_methods(report)
    show_best(best)
    emit({
        "report_dir": str(config.report_dir),
        "files": file_digests(written),
        "best": {fmt.value: cell.method for fmt, cell in best.items()},
    })
    return EXIT_OK


def cmd_validate_id(id_number: str) -> int:
    valid = validate_id(id_number)
    expected = None if valid else expected_check_character(id_number)
    if valid:
        console.print(f"[green]✓ {id_number} is valid[/green]")
    elif expected is not None:
        console.print(f"[red]✗ {id_number} is invalid[/red]; expected check character '{expected}'")
    else:
        console.print(f"[red]✗ {id_number} is invalid[/red]")
    emit({"id": id_number, "valid": valid, "expected_check_character": expected})
    return EXIT_OK if valid else EXIT_EXTRACTION


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command == "validate-id":
        return cmd_validate_id(args.id_number)

    if args.verbose:
        set_console_level(logging.INFO)

    try:
        config = load_config(args.config, config_overrides(args))
        show_config(config)
        if args.command == "generate":
            return cmd_generate(config)
        if args.command == "extract":
            return cmd_extract(config, args.document, args.backend, args.paradigm)
        return cmd_evaluate(config, args.corpus, args.methods)
    except PipelineError as e:
        logger.error(f"{args.command} failed: {e.message}")
        console.print(f"[red]Error ({e.kind.value}):[/red] {e.message}")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
