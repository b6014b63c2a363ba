"""Diagnostic model: error codes, severities, report assembly and rendering.

Every finding produced by the parsers, the vocabulary checks, the domain
constraint checks and the content scoring is a :class:`ReportEntry`.  The
code catalog below is the single source of truth for titles, default
severities and finding sources.

Machine report format (the primary output contract, key order fixed):

    {
      "target": "<url or file identifier>",
      "snapshot_id": "<vocabulary snapshot id>",
      "ds_name": "<domain spec name>" | null,
      "summary": {"error": n, "warning": n, "info": n},
      "content_score": {"score": x|null, "checked": n, "matched": n,
                        "unverifiable": n} | null,
      "entries": [
        {"code": "...", "title": "...", "severity": "error|warning|info",
         "path": "...", "description": "...", "source": "..."},
        ...
      ]
    }

Serialization of equal reports is byte-identical, so expected-output tests
can compare serialized bytes directly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"

    @property
    def rank(self) -> int:
        return {"error": 3, "warning": 2, "info": 1}[self.value]


class Source(enum.Enum):
    PARSE = "parse"
    SCHEMA_ORG = "schema-org"
    DOMAIN_SPEC = "domain-spec"
    CONTENT = "content"


@dataclass(frozen=True)
class CatalogRow:
    code: str
    title: str
    severity: Severity
    source: Source
    # elevated severity under strict mode, None if strict makes no difference
    strict_severity: Severity | None = None


_ROWS = [
    CatalogRow("E101", "InvalidSyntax", Severity.ERROR, Source.PARSE),
    CatalogRow("E102", "EmptyAnnotation", Severity.ERROR, Source.PARSE),
    CatalogRow("E103", "UnsupportedConstruct", Severity.WARNING, Source.PARSE),
    CatalogRow("E201", "UnknownType", Severity.ERROR, Source.SCHEMA_ORG),
    CatalogRow("E202", "UnknownProperty", Severity.ERROR, Source.SCHEMA_ORG),
    CatalogRow("E203", "DomainViolation", Severity.WARNING, Source.SCHEMA_ORG,
               strict_severity=Severity.ERROR),
    CatalogRow("E204", "RangeViolation", Severity.WARNING, Source.SCHEMA_ORG,
               strict_severity=Severity.ERROR),
    CatalogRow("E205", "MalformedLiteral", Severity.WARNING, Source.SCHEMA_ORG),
    CatalogRow("E206", "EmptyValue", Severity.WARNING, Source.SCHEMA_ORG),
    CatalogRow("E207", "DuplicateValue", Severity.INFO, Source.SCHEMA_ORG),
    CatalogRow("E208", "SemanticInconsistency", Severity.ERROR, Source.SCHEMA_ORG),
    CatalogRow("E209", "UntypedEntity", Severity.INFO, Source.SCHEMA_ORG),
    CatalogRow("E301", "TargetMismatch", Severity.ERROR, Source.DOMAIN_SPEC),
    CatalogRow("E302", "MissingMandatoryProperty", Severity.ERROR, Source.DOMAIN_SPEC),
    CatalogRow("E303", "CardinalityViolation", Severity.ERROR, Source.DOMAIN_SPEC),
    CatalogRow("E304", "RangeNotPermitted", Severity.ERROR, Source.DOMAIN_SPEC),
    CatalogRow("E305", "NestedNonCompliance", Severity.ERROR, Source.DOMAIN_SPEC),
    CatalogRow("E401", "ValueUnmatched", Severity.WARNING, Source.CONTENT),
    CatalogRow("E402", "UrlMismatch", Severity.WARNING, Source.CONTENT),
    CatalogRow("E403", "DateOrNumberMismatch", Severity.WARNING, Source.CONTENT),
]

CATALOG: dict[str, CatalogRow] = {row.code: row for row in _ROWS}


@dataclass(frozen=True)
class ReportEntry:
    """One finding: code, title, severity, annotation path, description."""

    code: str
    title: str
    severity: Severity
    path: str
    description: str
    source: Source

    def human_line(self) -> str:
        return (f"{self.severity.value.upper()} {self.code} {self.path}: "
                f"{self.title} — {self.description}")


def make_entry(code: str, path: str, description: str,
               strict: bool = False) -> ReportEntry:
    """Build an entry from the catalog; unknown codes are a programming error."""
    row = CATALOG[code]
    severity = row.severity
    if strict and row.strict_severity is not None:
        severity = row.strict_severity
    return ReportEntry(code=code, title=row.title, severity=severity,
                       path=path, description=description, source=row.source)


@dataclass(frozen=True)
class ScoreSummary:
    """Aggregate content consistency over the checkable annotation values."""

    score: float | None  # None iff checked == 0
    checked: int
    matched: int
    unverifiable: int


@dataclass
class VerificationReport:
    target: str
    snapshot_id: str
    ds_name: str | None = None
    entries: list[ReportEntry] = field(default_factory=list)
    content_score: ScoreSummary | None = None

    @property
    def summary(self) -> dict[str, int]:
        counts = {"error": 0, "warning": 0, "info": 0}
        for entry in self.entries:
            counts[entry.severity.value] += 1
        return counts

    def worst_severity(self) -> Severity | None:
        if not self.entries:
            return None
        return max((e.severity for e in self.entries), key=lambda s: s.rank)


def _entry_sort_key(entry: ReportEntry) -> tuple[str, str]:
    return (entry.path, entry.code)


def merge_reports(parts: list[list[ReportEntry]], target: str, snapshot_id: str,
                  ds_name: str | None = None,
                  content_score: ScoreSummary | None = None) -> VerificationReport:
    """Concatenate entry lists, sort by (path, code), recompute the summary.

    Duplicate entries are kept: two identical findings from two parts are two
    findings.
    """
    entries: list[ReportEntry] = []
    for part in parts:
        entries.extend(part)
    entries.sort(key=_entry_sort_key)
    return VerificationReport(target=target, snapshot_id=snapshot_id,
                              ds_name=ds_name, entries=entries,
                              content_score=content_score)


def _score_to_dict(score: ScoreSummary | None):
    if score is None:
        return None
    return {
        "score": score.score,
        "checked": score.checked,
        "matched": score.matched,
        "unverifiable": score.unverifiable,
    }


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "target": report.target,
        "snapshot_id": report.snapshot_id,
        "ds_name": report.ds_name,
        "summary": report.summary,
        "content_score": _score_to_dict(report.content_score),
        "entries": [
            {
                "code": e.code,
                "title": e.title,
                "severity": e.severity.value,
                "path": e.path,
                "description": e.description,
                "source": e.source.value,
            }
            for e in report.entries
        ],
    }


def serialize_report(report: VerificationReport, format: str = "machine") -> bytes:
    """Render a report; ``machine`` is canonical JSON, ``human`` is line text."""
    if format == "machine":
        text = json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if format == "human":
        lines = [f"target: {report.target}"]
        if report.ds_name:
            lines.append(f"domain specification: {report.ds_name}")
        if report.content_score is not None:
            cs = report.content_score
            shown = "undefined" if cs.score is None else f"{cs.score:.3f}"
            lines.append(f"content score: {shown} "
                         f"(checked={cs.checked} matched={cs.matched} "
                         f"unverifiable={cs.unverifiable})")
        for entry in report.entries:
            lines.append(entry.human_line())
        counts = report.summary
        lines.append(f"summary: {counts['error']} error(s), "
                     f"{counts['warning']} warning(s), {counts['info']} info")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format: {format!r}")


def parse_report(data: bytes | str) -> VerificationReport:
    """Inverse of machine serialization; round-trips byte-identically."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    raw = json.loads(data)
    entries = [
        ReportEntry(
            code=e["code"],
            title=e["title"],
            severity=Severity(e["severity"]),
            path=e["path"],
            description=e["description"],
            source=Source(e["source"]),
        )
        for e in raw["entries"]
    ]
    score = None
    if raw.get("content_score") is not None:
        cs = raw["content_score"]
        score = ScoreSummary(score=cs["score"], checked=cs["checked"],
                             matched=cs["matched"],
                             unverifiable=cs["unverifiable"])
    return VerificationReport(target=raw["target"],
                              snapshot_id=raw["snapshot_id"],
                              ds_name=raw.get("ds_name"),
                              entries=entries, content_score=score)
