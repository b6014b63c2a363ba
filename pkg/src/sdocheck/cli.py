"""Command line front end: fetch -> extract -> verify -> validate -> report.

Three subcommands:

    sdocheck verify   <url | page.html | annotation.json>
    sdocheck validate <url | page.html>
    sdocheck extract  <url | page.html | annotation.json>

Exit codes: 0 no finding at or above --fail-level, 1 findings, 2 tool
failure (unreadable input, bad vocabulary or constraint document, network
error).  The report goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import annotation as anno
from . import content as content_mod
from . import ds as ds_mod
from . import report as report_mod
from . import sdo_verifier
from . import vocab as vocab_mod
from .fetch import FetchError, fetch
from .report import Severity


class CliFailure(Exception):
    """Tool-level failure: maps to exit code 2."""


@dataclass
class LoadedInput:
    target: str        # identifier used in the report
    data: bytes
    base_url: str
    is_page: bool      # HTML page vs standalone annotation block


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdocheck",
        description="Verify schema.org annotations and validate them "
                    "against page content.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_validation_config: bool):
        p.add_argument("input",
                       help="URL, HTML file, or standalone annotation file")
        p.add_argument("--vocab", metavar="PATH", default=None,
                       help="vocabulary dump (default: vendored snapshot)")
        p.add_argument("--format", choices=["machine", "human"],
                       default="machine", help="report format")
        if with_validation_config:
            p.add_argument("--ds", metavar="PATH", default=None,
                           help="domain specification document")
            p.add_argument("--strict", action="store_true",
                           help="elevate domain/range findings to errors")
            p.add_argument("--fail-level",
                           choices=["error", "warning", "never"],
                           default="error",
                           help="lowest severity that fails the run")
            p.add_argument("--validation-config", metavar="PATH",
                           default=None,
                           help="content validation configuration (JSON)")

    add_common(sub.add_parser("verify", help="check vocabulary and "
                              "constraint conformance"), True)
    add_common(sub.add_parser("validate", help="verify plus page-content "
                              "consistency scoring"), True)
    add_common(sub.add_parser("extract", help="print the parsed annotation "
                              "graphs"), False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_extract(args)
    except CliFailure as exc:
        print(f"sdocheck: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


# ---------------------------------------------------------------------------
# input handling


def _load_input(raw: str) -> LoadedInput:
    if raw.startswith(("http://", "https://")):
        try:
            result = fetch(raw)
        except FetchError as exc:
            raise CliFailure(f"fetch failed: {exc}") from exc
        return LoadedInput(target=raw, data=result.body,
                           base_url=result.final_url,
                           is_page=_looks_like_html(result.body))
    try:
        with open(raw, "rb") as handle:
            data = handle.read()
    except OSError as exc:
        raise CliFailure(f"cannot read input: {exc}") from exc
    return LoadedInput(target=raw, data=data, base_url=f"file://{raw}",
                       is_page=_looks_like_html(data))


def _looks_like_html(data: bytes) -> bool:
    head = data.lstrip()[:512].lower()
    return head.startswith(b"<")


def _load_vocab(args):
    try:
        if args.vocab:
            with open(args.vocab, "rb") as handle:
                return vocab_mod.load_vocabulary(handle.read())
        return vocab_mod.load_default_vocabulary()
    except (OSError, vocab_mod.ParseError, vocab_mod.IntegrityError) as exc:
        raise CliFailure(f"cannot load vocabulary: {exc}") from exc


def _load_ds(args, vocabulary):
    if not args.ds:
        return None
    try:
        with open(args.ds, "rb") as handle:
            return ds_mod.load_domain_specification(handle.read(), vocabulary)
    except (OSError, ds_mod.DsParseError, ds_mod.DsIntegrityError) as exc:
        raise CliFailure(f"cannot load domain specification: {exc}") from exc


def _load_validation_config(args):
    if not getattr(args, "validation_config", None):
        return content_mod.ValidationConfig()
    try:
        with open(args.validation_config, "rb") as handle:
            return content_mod.load_validation_config(handle.read())
    except (OSError, ValueError) as exc:
        raise CliFailure(f"cannot load validation config: {exc}") from exc


def _blocks_for(loaded: LoadedInput) -> list[anno.RawBlock]:
    if loaded.is_page:
        return anno.extract_annotation_blocks(loaded.data, loaded.base_url)
    text = loaded.data.decode("utf-8", errors="replace")
    return [anno.RawBlock(text, anno.SourceFormat.JSON_LD, 0)]


def _parse_all_blocks(blocks, vocabulary, loaded):
    """Parse every block; returns (graphs, parse findings)."""
    graphs = []
    findings = []
    next_root = 0
    for block in blocks:
        graph, entries = anno.parse_annotation(block, vocab=vocabulary,
                                               first_root_ordinal=next_root)
        findings.extend(entries)
        if graph is not None:
            graphs.append(graph)
            next_root += len(graph.roots)
    if loaded.is_page and not blocks:
        findings.append(report_mod.make_entry(
            "E102", "$", "page contains no annotation blocks"))
    return graphs, findings


# ---------------------------------------------------------------------------
# commands


def _exit_code(report: report_mod.VerificationReport, fail_level: str) -> int:
    if fail_level == "never":
        return 0
    minimum = {"error": Severity.ERROR.rank, "warning": Severity.WARNING.rank}
    worst = report.worst_severity()
    if worst is not None and worst.rank >= minimum[fail_level]:
        return 1
    return 0


def _emit(report: report_mod.VerificationReport, fmt: str) -> None:
    sys.stdout.buffer.write(report_mod.serialize_report(report, fmt))
    sys.stdout.buffer.flush()


def _cmd_verify(args) -> int:
    vocabulary = _load_vocab(args)
    spec = _load_ds(args, vocabulary)
    loaded = _load_input(args.input)
    graphs, findings = _parse_all_blocks(_blocks_for(loaded), vocabulary,
                                         loaded)
    parts = [findings]
    for graph in graphs:
        parts.append(sdo_verifier.verify_schema_org(graph, vocabulary,
                                                    args.strict))
        if spec is not None:
            parts.append(ds_mod.verify_against_ds(graph, spec, vocabulary))
    report = report_mod.merge_reports(
        parts, target=loaded.target, snapshot_id=vocabulary.snapshot_id,
        ds_name=spec.name if spec else None)
    _emit(report, args.format)
    return _exit_code(report, args.fail_level)


def _cmd_validate(args) -> int:
    vocabulary = _load_vocab(args)
    spec = _load_ds(args, vocabulary)
    config = _load_validation_config(args)
    loaded = _load_input(args.input)
    if not loaded.is_page:
        raise CliFailure("validate needs a web page; "
                         "got a standalone annotation file")
    graphs, findings = _parse_all_blocks(_blocks_for(loaded), vocabulary,
                                         loaded)
    page = content_mod.extract_page_content(loaded.data, loaded.base_url,
                                            config)
    parts = [findings]
    consistencies = []
    for graph in graphs:
        parts.append(sdo_verifier.verify_schema_org(graph, vocabulary,
                                                    args.strict))
        if spec is not None:
            parts.append(ds_mod.verify_against_ds(graph, spec, vocabulary))
        consistencies.extend(content_mod.collect_consistencies(
            graph, page, config, vocabulary))
    parts.append(content_mod.consistency_entries(consistencies))
    score = content_mod.aggregate_scores(consistencies)
    report = report_mod.merge_reports(
        parts, target=loaded.target, snapshot_id=vocabulary.snapshot_id,
        ds_name=spec.name if spec else None, content_score=score)
    _emit(report, args.format)
    return _exit_code(report, args.fail_level)


def _cmd_extract(args) -> int:
    vocabulary = _load_vocab(args)
    loaded = _load_input(args.input)
    blocks = _blocks_for(loaded)
    dumps = []
    next_root = 0
    for block in blocks:
        graph, entries = anno.parse_annotation(block, vocab=vocabulary,
                                               first_root_ordinal=next_root)
        dump = {
            "block_index": block.block_index,
            "format": block.source_format.value,
            "roots": None,
            "findings": [
                {"code": e.code, "severity": e.severity.value,
                 "path": e.path, "description": e.description}
                for e in entries
            ],
        }
        if graph is not None:
            seen: set[int] = set()
            dump["roots"] = [_node_to_dict(r, seen) for r in graph.roots]
            next_root += len(graph.roots)
        dumps.append(dump)
    text = json.dumps(dumps, indent=2, ensure_ascii=False)
    sys.stdout.write(text + "\n")
    return 0


def _node_to_dict(node: anno.AnnotationNode, seen: set[int]) -> dict:
    if id(node) in seen:
        return {"ref": node.path.render() if node.path else None}
    seen.add(id(node))
    properties = {}
    for prop, values in node.properties.items():
        properties[prop] = [_value_to_dict(v, seen) for v in values]
    return {
        "path": node.path.render() if node.path else None,
        "types": list(node.types),
        "identifier": node.identifier,
        "properties": properties,
    }


def _value_to_dict(value, seen: set[int]) -> dict:
    rendered_path = value.path.render() if value.path else None
    if isinstance(value, anno.Literal):
        return {"kind": "literal", "path": rendered_path,
                "raw": value.raw, "datatype": value.datatype}
    if isinstance(value, anno.Reference):
        return {"kind": "reference", "path": rendered_path, "iri": value.iri}
    return {"kind": "entity", "path": rendered_path,
            "node": _node_to_dict(value.node, seen)}


if __name__ == "__main__":
    entry_point()
