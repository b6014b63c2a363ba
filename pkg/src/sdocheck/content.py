"""Page-content consistency: does the annotation describe what the page shows?

The visible surface of a page is reduced to four comparable pools — text
tokens, link/image URLs, calendar dates and decimal numbers — and every
literal or reference value of the annotation is scored against the matching
pool.  Scores are in [0, 1]; string-like values score by token containment,
everything else scores 0/1 on normalized membership.  The overall page score
is the plain mean over checkable values; unverifiable values (booleans
without configured surface forms, times, token-free strings) are excluded.

The annotation's own serialization never corroborates itself: JSON-LD
script blocks are invisible by construction and Microdata ``content``
attributes are markup, not text.
"""

from __future__ import annotations

import enum
import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime
from decimal import Decimal, InvalidOperation
from typing import BinaryIO
from urllib.parse import urljoin, urlsplit, urlunsplit

from .annotation import AnnotationGraph, Literal, Reference, UNDETERMINED
from .htmltree import (Element, NON_CONTENT_ELEMENTS, effective_base_url,
                       parse_html)
from .report import ReportEntry, ScoreSummary, make_entry
from .vocab import VocabularyGraph, strip_namespace

OverallScore = ScoreSummary

_TOKEN_SPLIT_RE = re.compile(r"[\W_]+", re.UNICODE)
_NUMERAL_RE = re.compile(r"\d(?:[\d.,]*\d)?")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")

_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}
_ISO_DATE_RE = re.compile(r"(?<!\d)(\d{4})-(\d{2})-(\d{2})(?!\d)")
_DOTTED_DATE_RE = re.compile(r"(?<!\d)(\d{1,2})\.(\d{1,2})\.(\d{4})(?!\d)")
_SLASHED_DATE_RE = re.compile(r"(?<!\d)(\d{1,2})/(\d{1,2})/(\d{4})(?!\d)")
_MONTH_NAME_RE = re.compile(
    r"\b(" + "|".join(sorted(_MONTHS, key=len, reverse=True)) + r")\.?\s+"
    r"(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})\b", re.IGNORECASE)

# elements that break the text flow; prevents token fusion across tags
_BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "br", "caption", "dd",
    "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav",
    "ol", "option", "p", "pre", "section", "select", "table", "td", "tfoot",
    "th", "thead", "title", "tr", "ul",
})

_RATING_PROPERTIES = frozenset({"ratingValue", "bestRating", "worstRating"})


class ValueKind(enum.Enum):
    URL = "url"
    STRING = "string"
    BOOLEAN = "boolean"
    ENUMERATION = "enumeration"
    RATING = "rating"
    DATE = "date"
    TIME = "time"
    NUMBER = "number"


class MatchStatus(enum.Enum):
    MATCHED = "matched"
    UNMATCHED = "unmatched"
    UNVERIFIABLE = "unverifiable"


@dataclass
class ValidationConfig:
    threshold: float = 0.75
    date_order: str = "DMY"  # "DMY" or "MDY" for dotted/slashed page dates
    decimal_separator: str = "point"  # "point" or "comma"
    # property name -> {"true": [phrases], "false": [phrases]}
    boolean_surface_forms: dict[str, dict[str, list[str]]] = field(
        default_factory=dict)


def load_validation_config(source: bytes | str | BinaryIO) -> ValidationConfig:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        source = bytes(source).decode("utf-8")
    raw = json.loads(source)
    config = ValidationConfig()
    if "threshold" in raw:
        config.threshold = float(raw["threshold"])
    if "dateOrder" in raw:
        if raw["dateOrder"] not in ("DMY", "MDY"):
            raise ValueError("dateOrder must be 'DMY' or 'MDY'")
        config.date_order = raw["dateOrder"]
    if "decimalSeparator" in raw:
        if raw["decimalSeparator"] not in ("point", "comma"):
            raise ValueError("decimalSeparator must be 'point' or 'comma'")
        config.decimal_separator = raw["decimalSeparator"]
    for prop, forms in raw.get("booleanSurfaceForms", {}).items():
        config.boolean_surface_forms[prop] = {
            "true": list(forms.get("true", [])),
            "false": list(forms.get("false", [])),
        }
    return config


@dataclass(frozen=True)
class ValueConsistency:
    path: str
    value_kind: ValueKind
    score: float
    status: MatchStatus
    evidence: str


@dataclass(frozen=True)
class PageContent:
    text_tokens: frozenset[str]
    token_counts: dict[str, int]
    urls: frozenset[str]
    image_urls: frozenset[str]
    dates: frozenset[date]
    numbers: frozenset[Decimal]
    base_url: str


def tokenize(text: str) -> list[str]:
    """Unicode-compatibility normalize, lowercase, split on non-alphanumerics."""
    normalized = unicodedata.normalize("NFKC", text).lower()
    return [t for t in _TOKEN_SPLIT_RE.split(normalized) if t]


def normalize_url(url: str) -> str:
    parts = urlsplit(url)
    path = parts.path.rstrip("/")
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), path,
                       parts.query, ""))


def camel_case_tokens(name: str) -> list[str]:
    return [t.lower() for t in _CAMEL_RE.findall(name)]


def extract_page_content(html: bytes | str, base_url: str,
                         config: ValidationConfig | None = None) -> PageContent:
    """Reduce a page to its comparable pools.

    Script, style and template content is invisible, which keeps embedded
    JSON-LD annotation blocks out of their own evidence.
    """
    config = config or ValidationConfig()
    tree = parse_html(html)
    base = effective_base_url(tree, base_url)

    chunks: list[str] = []
    _collect_visible_text(tree, chunks)
    text = "".join(chunks)

    urls: set[str] = set()
    image_urls: set[str] = set()
    _collect_urls(tree, base, urls, image_urls)

    counts = Counter(tokenize(text))
    return PageContent(
        text_tokens=frozenset(counts),
        token_counts=dict(counts),
        urls=frozenset(urls),
        image_urls=frozenset(image_urls),
        dates=frozenset(_extract_dates(text, config.date_order)),
        numbers=frozenset(_extract_numbers(text, config.decimal_separator)),
        base_url=base,
    )


def _collect_visible_text(element: Element, out: list[str]) -> None:
    if element.tag in NON_CONTENT_ELEMENTS:
        return
    block = element.tag in _BLOCK_TAGS
    if block:
        out.append("\n")
    for child in element.children:
        if isinstance(child, str):
            out.append(child)
        else:
            _collect_visible_text(child, out)
    if block:
        out.append("\n")


def _collect_urls(element: Element, base: str, urls: set[str],
                  image_urls: set[str]) -> None:
    if element.tag in NON_CONTENT_ELEMENTS or element.tag == "base":
        return
    href = element.attrs.get("href")
    src = element.attrs.get("src")
    if href:
        urls.add(normalize_url(urljoin(base, href)))
    if src:
        resolved = normalize_url(urljoin(base, src))
        urls.add(resolved)
        if element.tag == "img":
            image_urls.add(resolved)
    for child in element.children:
        if isinstance(child, Element):
            _collect_urls(child, base, urls, image_urls)


def _extract_dates(text: str, date_order: str) -> set[date]:
    found: set[date] = set()
    for match in _ISO_DATE_RE.finditer(text):
        _add_date(found, match.group(1), match.group(2), match.group(3))
    for pattern in (_DOTTED_DATE_RE, _SLASHED_DATE_RE):
        for match in pattern.finditer(text):
            first, second, year = match.groups()
            day, month = (first, second) if date_order == "DMY" else (second, first)
            _add_date(found, year, month, day)
    for match in _MONTH_NAME_RE.finditer(text):
        month = _MONTHS[match.group(1).lower()]
        _add_date(found, match.group(3), str(month), match.group(2))
    return found


def _add_date(found: set[date], year: str, month: str, day: str) -> None:
    try:
        found.add(date(int(year), int(month), int(day)))
    except ValueError:
        pass


def _extract_numbers(text: str, decimal_separator: str) -> set[Decimal]:
    found: set[Decimal] = set()
    for match in _NUMERAL_RE.finditer(text):
        value = parse_numeral(match.group(0), decimal_separator)
        if value is not None:
            found.add(value)
    return found


def parse_numeral(run: str, decimal_separator: str = "point") -> Decimal | None:
    """Normalize one numeral run: thousands separators dropped, the decimal
    separator honored; a separator of the other kind is accepted as decimal
    when the grouping makes thousands impossible.  Returns None for runs
    that are not plausible numbers (e.g. version strings like 1.2.3)."""
    if not any(c in run for c in ".,"):
        try:
            return Decimal(run)
        except InvalidOperation:
            return None
    dec_char = "." if decimal_separator == "point" else ","
    thou_char = "," if dec_char == "." else "."
    last = max(run.rfind("."), run.rfind(","))
    tail = run[last + 1:]
    if run[last] == dec_char:
        int_part, frac = run[:last], tail
    elif len(tail) != 3:
        int_part, frac = run[:last], tail  # unambiguous decimal use
    else:
        int_part, frac = run, None
    groups = int_part.split(thou_char)
    if len(groups) > 1:
        if not all(g.isdigit() for g in groups):
            return None
        if not 1 <= len(groups[0]) <= 3 or any(len(g) != 3 for g in groups[1:]):
            return None
        digits = "".join(groups)
    else:
        if not int_part.isdigit():
            return None
        digits = int_part
    if frac is not None and not frac.isdigit():
        return None
    return Decimal(digits + ("." + frac if frac else ""))


# ---------------------------------------------------------------------------
# scoring


def classify_value_kind(value: Literal | Reference, property_name: str,
                        vocab: VocabularyGraph | None) -> ValueKind | None:
    """The consistency kind of a value; None when nothing can be checked.

    Enumeration members win over the URL reading: a member written in IRI
    form describes page wording, not a link target.
    """
    raw = value.iri if isinstance(value, Reference) else value.raw
    if vocab is not None and vocab.enumerations_of_member(strip_namespace(raw)):
        return ValueKind.ENUMERATION
    if isinstance(value, Reference):
        return ValueKind.URL
    datatype = value.datatype
    if datatype == UNDETERMINED:
        return None
    if datatype == "URL":
        return ValueKind.URL
    if datatype in ("Date", "DateTime"):
        return ValueKind.DATE
    if datatype == "Time":
        return ValueKind.TIME
    if datatype == "Boolean":
        return ValueKind.BOOLEAN
    if datatype in ("Integer", "Float"):
        if property_name in _RATING_PROPERTIES:
            return ValueKind.RATING
        return ValueKind.NUMBER
    return ValueKind.STRING


def consistency_of_value(value: Literal | Reference, property_name: str,
                         page: PageContent, config: ValidationConfig,
                         vocab: VocabularyGraph | None = None,
                         ) -> ValueConsistency:
    """Score one annotation value against the page pools."""
    path = value.path.render() if value.path else "$0"
    kind = classify_value_kind(value, property_name, vocab)
    raw = value.iri if isinstance(value, Reference) else value.raw

    if kind is None:
        return ValueConsistency(path, ValueKind.STRING, 0.0,
                                MatchStatus.UNVERIFIABLE, "empty value")
    if kind is ValueKind.URL:
        normalized = normalize_url(raw)
        hit = normalized in page.urls or normalized in page.image_urls
        return _scored(path, kind, 1.0 if hit else 0.0, config,
                       f"URL {normalized!r} "
                       + ("found on page" if hit else "not found on page"))
    if kind is ValueKind.DATE:
        when = _calendar_date(value)
        if when is None:
            return ValueConsistency(path, kind, 0.0, MatchStatus.UNVERIFIABLE,
                                    "value does not parse as a date")
        hit = when in page.dates
        return _scored(path, kind, 1.0 if hit else 0.0, config,
                       f"date {when.isoformat()} "
                       + ("found on page" if hit else "not found on page"))
    if kind is ValueKind.TIME:
        return ValueConsistency(path, kind, 0.0, MatchStatus.UNVERIFIABLE,
                                "times are not extracted from page content")
    if kind in (ValueKind.NUMBER, ValueKind.RATING):
        try:
            number = Decimal(raw)
        except InvalidOperation:
            return ValueConsistency(path, kind, 0.0, MatchStatus.UNVERIFIABLE,
                                    "value does not parse as a number")
        hit = number in page.numbers
        return _scored(path, kind, 1.0 if hit else 0.0, config,
                       f"number {number} "
                       + ("found on page" if hit else "not found on page"))
    if kind is ValueKind.BOOLEAN:
        forms = config.boolean_surface_forms.get(property_name)
        phrases = forms.get(raw, []) if forms else []
        if not phrases:
            return ValueConsistency(
                path, kind, 0.0, MatchStatus.UNVERIFIABLE,
                f"no surface forms configured for boolean {property_name!r}")
        score = max(_containment(tokenize(p), page) for p in phrases)
        return _scored(path, kind, score, config,
                       f"best surface-form containment {score:.3f}")
    if kind is ValueKind.ENUMERATION:
        tokens = camel_case_tokens(strip_namespace(raw))
        score = _containment(tokens, page)
        return _scored(path, kind, score, config,
                       f"member-name token containment {score:.3f}")

    tokens = tokenize(raw)
    if not tokens:
        return ValueConsistency(path, ValueKind.STRING, 0.0,
                                MatchStatus.UNVERIFIABLE,
                                "value has no comparable tokens")
    score = _containment(tokens, page)
    return _scored(path, ValueKind.STRING, score, config,
                   f"token containment {score:.3f}")


def _containment(tokens: list[str], page: PageContent) -> float:
    distinct = set(tokens)
    if not distinct:
        return 0.0
    return len(distinct & page.text_tokens) / len(distinct)


def _scored(path: str, kind: ValueKind, score: float,
            config: ValidationConfig, evidence: str) -> ValueConsistency:
    status = (MatchStatus.MATCHED if score >= config.threshold
              else MatchStatus.UNMATCHED)
    return ValueConsistency(path, kind, score, status, evidence)


def _calendar_date(value: Literal) -> date | None:
    try:
        if value.datatype == "Date":
            return date.fromisoformat(value.raw)
        return datetime.fromisoformat(value.raw.replace("Z", "+00:00")).date()
    except ValueError:
        return None


def aggregate_scores(items: list[ValueConsistency]) -> ScoreSummary:
    checkable = [c for c in items if c.status is not MatchStatus.UNVERIFIABLE]
    matched = sum(1 for c in checkable if c.status is MatchStatus.MATCHED)
    unverifiable = len(items) - len(checkable)
    if not checkable:
        return ScoreSummary(score=None, checked=0, matched=matched,
                            unverifiable=unverifiable)
    mean = sum(c.score for c in checkable) / len(checkable)
    return ScoreSummary(score=mean, checked=len(checkable), matched=matched,
                        unverifiable=unverifiable)


_KIND_TO_CODE = {
    ValueKind.URL: "E402",
    ValueKind.DATE: "E403",
    ValueKind.TIME: "E403",
    ValueKind.NUMBER: "E403",
    ValueKind.RATING: "E403",
    ValueKind.STRING: "E401",
    ValueKind.ENUMERATION: "E401",
    ValueKind.BOOLEAN: "E401",
}


def consistency_entries(items: list[ValueConsistency]) -> list[ReportEntry]:
    """Report entries for the unmatched values, ordered by (path, code)."""
    entries: list[ReportEntry] = []
    for item in items:
        if item.status is not MatchStatus.UNMATCHED:
            continue
        code = _KIND_TO_CODE[item.value_kind]
        entries.append(make_entry(
            code, item.path,
            f"{item.value_kind.value} value does not match page content "
            f"({item.evidence})"))
    entries.sort(key=lambda e: (e.path, e.code))
    return entries


def validate_annotation_against_page(graph: AnnotationGraph, page: PageContent,
                                     config: ValidationConfig | None = None,
                                     vocab: VocabularyGraph | None = None,
                                     ) -> tuple[list[ReportEntry], ScoreSummary]:
    """Score every literal and reference value in the graph and report the
    unmatched ones; entity values are recursed into, not scored as wholes."""
    config = config or ValidationConfig()
    consistencies = collect_consistencies(graph, page, config, vocab)
    return consistency_entries(consistencies), aggregate_scores(consistencies)


def collect_consistencies(graph: AnnotationGraph, page: PageContent,
                          config: ValidationConfig,
                          vocab: VocabularyGraph | None = None,
                          ) -> list[ValueConsistency]:
    out: list[ValueConsistency] = []
    for node in graph.iter_nodes():
        for prop, values in node.properties.items():
            for value in values:
                if isinstance(value, (Literal, Reference)):
                    out.append(consistency_of_value(value, prop, page,
                                                    config, vocab))
    return out
