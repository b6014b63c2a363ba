"""Extract annotation blocks from HTML and parse them into annotation graphs.

Two carriers are supported: JSON-LD ``<script>`` blocks and Microdata
(``itemscope``/``itemprop``) attribute trees.  Both parse into the same
graph shape: typed nodes with ordered property -> value lists, where every
node and value carries the path at which it sits (``$0.offers[1].price``).

JSON-LD handling is deliberately schema.org-flavored: only the keywords
``@context``, ``@type``, ``@id``, ``@graph`` and ``@value`` are honored,
and the context must be a schema.org context.  Anything else is reported
as an unsupported construct and skipped.

Parsing is pure; parsed graphs are only mutated during construction and are
safe to share afterwards.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, time
from urllib.parse import urljoin, urlparse

from .htmltree import Element, effective_base_url, parse_html
from .report import ReportEntry, make_entry
from .vocab import strip_namespace

UNDETERMINED = "Undetermined"

_HONORED_KEYWORDS = {"@context", "@type", "@id", "@graph", "@value"}

_LINK_HREF_TAGS = frozenset({"a", "area", "link"})
_MEDIA_SRC_TAGS = frozenset({"audio", "embed", "iframe", "img", "source",
                             "track", "video"})

_DURATION_RE = re.compile(
    r"^P(?=\d|T\d)(?:\d+Y)?(?:\d+M)?(?:\d+W)?(?:\d+D)?"
    r"(?:T(?=\d)(?:\d+H)?(?:\d+M)?(?:\d+(?:\.\d+)?S)?)?$")
_INTEGER_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(?:\d+\.\d+|\.\d+)$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?"
    r"(?:Z|[+-]\d{2}:?\d{2})?$")
_TIME_RE = re.compile(r"^\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:?\d{2})?$")

_PATH_STEP_RE = re.compile(r"\.([^.\[\]]+)(?:\[(\d+)\])?")
PATH_GRAMMAR_RE = re.compile(r"^\$\d+(?:\.[^.\[\]]+(?:\[\d+\])?)*$")


class SourceFormat(enum.Enum):
    JSON_LD = "json-ld"
    MICRODATA = "microdata"


@dataclass(frozen=True)
class AnnotationPath:
    """Location of a node or value: root ordinal plus property steps."""

    root: int
    steps: tuple[tuple[str, int | None], ...] = ()

    def child(self, prop: str, index: int | None = None) -> "AnnotationPath":
        return AnnotationPath(self.root, self.steps + ((prop, index),))

    def render(self) -> str:
        out = [f"${self.root}"]
        for prop, index in self.steps:
            out.append(f".{prop}")
            if index is not None:
                out.append(f"[{index}]")
        return "".join(out)


@dataclass
class Literal:
    raw: str
    datatype: str  # a vocabulary datatype name or UNDETERMINED
    path: AnnotationPath | None = None


@dataclass
class Reference:
    iri: str
    path: AnnotationPath | None = None


@dataclass
class Entity:
    node: "AnnotationNode"
    path: AnnotationPath | None = None


PropertyValue = Literal | Reference | Entity


@dataclass
class AnnotationNode:
    types: list[str] = field(default_factory=list)
    identifier: str | None = None
    properties: dict[str, list[PropertyValue]] = field(default_factory=dict)
    path: AnnotationPath | None = None


@dataclass
class AnnotationGraph:
    roots: list[AnnotationNode]
    block_index: int
    source_format: SourceFormat

    def iter_nodes(self):
        """Every reachable node exactly once, document order."""
        seen: set[int] = set()
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            nested = [v.node for values in node.properties.values()
                      for v in values if isinstance(v, Entity)]
            stack.extend(reversed(nested))


@dataclass(frozen=True)
class RawBlock:
    """One annotation block as found on a page.

    For JSON-LD the payload is the verbatim script text; for Microdata it is
    the pre-walked item tree (the attribute syntax has no textual block to
    preserve).
    """
    payload: str | dict
    source_format: SourceFormat
    block_index: int


def _string_list(value) -> list[str]:
    if value is None:
        return []
    items = value if isinstance(value, list) else [value]
    return [item for item in items if isinstance(item, str)]


def classify_literal(raw: str) -> str:
    """Deterministically infer the vocabulary datatype of a literal."""
    if raw == "":
        return UNDETERMINED
    if raw in ("true", "false"):
        return "Boolean"
    if _DATE_RE.match(raw):
        try:
            date.fromisoformat(raw)
            return "Date"
        except ValueError:
            return "Text"
    if _DATETIME_RE.match(raw):
        try:
            datetime.fromisoformat(raw.replace("Z", "+00:00"))
            return "DateTime"
        except ValueError:
            return "Text"
    if _TIME_RE.match(raw):
        try:
            time.fromisoformat(raw.replace("Z", "+00:00"))
            return "Time"
        except ValueError:
            return "Text"
    if _DURATION_RE.match(raw):
        return "Duration"
    if _INTEGER_RE.match(raw):
        return "Integer"
    if _FLOAT_RE.match(raw):
        return "Float"
    if raw.startswith(("http://", "https://")):
        parsed = urlparse(raw)
        if parsed.netloc and " " not in raw:
            return "URL"
        return "Text"
    return "Text"


# ---------------------------------------------------------------------------
# block extraction


def extract_annotation_blocks(html: bytes | str, base_url: str) -> list[RawBlock]:
    """All annotation blocks of a page, in document order.

    JSON-LD script blocks come first (verbatim, even if malformed), followed
    by one synthetic block per top-level Microdata item scope.  Block indices
    are global and zero-based.
    """
    tree = parse_html(html)
    base = effective_base_url(tree, base_url)
    blocks: list[RawBlock] = []
    for element in tree.iter_elements():
        if element.tag == "script" and _is_jsonld_type(element):
            text = "".join(c for c in element.children if isinstance(c, str))
            blocks.append(RawBlock(text, SourceFormat.JSON_LD, len(blocks)))
    for element in tree.iter_elements():
        if "itemscope" in element.attrs and "itemprop" not in element.attrs:
            item = _build_microdata_item(element, base)
            blocks.append(RawBlock(item, SourceFormat.MICRODATA, len(blocks)))
    return blocks


def _is_jsonld_type(element: Element) -> bool:
    media_type = element.attrs.get("type", "")
    return media_type.split(";")[0].strip().lower() == "application/ld+json"


def _build_microdata_item(element: Element, base: str) -> dict:
    item: dict = {"types": element.attrs.get("itemtype", "").split(),
                  "properties": []}
    if element.attrs.get("itemid"):
        item["id"] = urljoin(base, element.attrs["itemid"])
    if "itemref" in element.attrs:
        item["itemref"] = True
    _collect_microdata_properties(element, item["properties"], base)
    return item


def _collect_microdata_properties(element: Element, out: list, base: str) -> None:
    for child in element.children:
        if not isinstance(child, Element):
            continue
        if "itemprop" in child.attrs:
            names = child.attrs["itemprop"].split()
            if "itemscope" in child.attrs:
                value = {"item": _build_microdata_item(child, base)}
            else:
                value = {"literal": _microdata_value(child, base)}
                _collect_microdata_properties(child, out, base)
            for name in names:
                out.append([name, value])
        elif "itemscope" in child.attrs:
            continue  # a separate top-level item, not a property of this one
        else:
            _collect_microdata_properties(child, out, base)


def _microdata_value(element: Element, base: str) -> str:
    attrs = element.attrs
    if "content" in attrs:
        return attrs["content"]
    if element.tag in _LINK_HREF_TAGS and attrs.get("href"):
        return urljoin(base, attrs["href"])
    if element.tag in _MEDIA_SRC_TAGS and attrs.get("src"):
        return urljoin(base, attrs["src"])
    if element.tag == "time" and attrs.get("datetime"):
        return attrs["datetime"]
    return element.text_content().strip()


# ---------------------------------------------------------------------------
# parsing


def parse_annotation(raw_block: RawBlock | str | dict,
                     source_format: SourceFormat | None = None,
                     block_index: int = 0,
                     vocab=None,
                     first_root_ordinal: int = 0,
                     ) -> tuple[AnnotationGraph | None, list[ReportEntry]]:
    """Parse one block into an annotation graph.

    Returns ``(graph, findings)``; the graph is None when the block is
    unusable (E101 invalid syntax, E102 no typed node).  Warnings (E103)
    may accompany a successful parse.  ``first_root_ordinal`` offsets root
    numbering so paths stay unique when a page carries several blocks.
    The ``vocab`` argument is accepted for pipeline uniformity; parsing
    itself needs no vocabulary.
    """
    if isinstance(raw_block, RawBlock):
        payload = raw_block.payload
        source_format = raw_block.source_format
        block_index = raw_block.block_index
    else:
        payload = raw_block
        if source_format is None:
            source_format = (SourceFormat.MICRODATA if isinstance(payload, dict)
                             else SourceFormat.JSON_LD)

    entries: list[ReportEntry] = []
    if source_format is SourceFormat.JSON_LD:
        roots = _parse_jsonld(payload, entries)
    else:
        roots = _parse_microdata(payload, entries)
    if roots is None:
        return None, entries

    _materialize_references(roots)
    roots = _dedup_roots(roots)
    if not _has_typed_node(roots):
        entries.append(make_entry(
            "E102", "$", "annotation block contains no typed node"))
        return None, entries
    _assign_paths(roots, first_root_ordinal)
    graph = AnnotationGraph(roots=roots, block_index=block_index,
                            source_format=source_format)
    return graph, entries


class _JsonLdBuilder:
    def __init__(self, entries: list[ReportEntry]):
        self.entries = entries
        self.by_id: dict[str, AnnotationNode] = {}

    def warn(self, construct: str) -> None:
        self.entries.append(make_entry("E103", "$", construct))

    def node_for_id(self, identifier: str) -> AnnotationNode:
        node = self.by_id.get(identifier)
        if node is None:
            node = AnnotationNode(identifier=identifier)
            self.by_id[identifier] = node
        return node

    def build_node(self, obj: dict, top_level: bool = False) -> AnnotationNode:
        identifier = obj.get("@id")
        if isinstance(identifier, str) and identifier:
            node = self.node_for_id(identifier)
        else:
            node = AnnotationNode()
        for t in _string_list(obj.get("@type")):
            stripped = strip_namespace(t)
            if stripped not in node.types:
                node.types.append(stripped)
        for key, value in obj.items():
            if key in _HONORED_KEYWORDS:
                if key == "@context" and not top_level:
                    self.warn("embedded @context ignored")
                continue
            if key.startswith("@"):
                self.warn(f"keyword {key!r} is not supported; skipped")
                continue
            prop = strip_namespace(key)
            values = value if isinstance(value, list) else [value]
            parsed = [pv for pv in (self.build_value(v) for v in values)
                      if pv is not None]
            if parsed:
                node.properties.setdefault(prop, []).extend(parsed)
        return node

    def build_value(self, value) -> PropertyValue | None:
        if isinstance(value, bool):
            return Literal("true" if value else "false", "Boolean")
        if isinstance(value, int):
            return Literal(str(value), "Integer")
        if isinstance(value, float):
            return Literal(json.dumps(value), "Float")
        if isinstance(value, str):
            return Literal(value, classify_literal(value))
        if value is None:
            return None
        if isinstance(value, list):
            self.warn("nested array value is not supported; skipped")
            return None
        if isinstance(value, dict):
            if "@list" in value or "@set" in value:
                self.warn("@list/@set containers are not supported; skipped")
                return None
            if "@value" in value:
                inner = self.build_value(value["@value"])
                if inner is None or not isinstance(inner, Literal):
                    self.warn("non-scalar @value; skipped")
                    return None
                return inner
            meaningful = [k for k in value if k != "@id"]
            if not meaningful and isinstance(value.get("@id"), str):
                # bare node reference; resolves to a full node if one exists
                return Entity(self.node_for_id(value["@id"]))
            return Entity(self.build_node(value))
        self.warn(f"unsupported value {value!r}; skipped")
        return None


def _parse_jsonld(payload, entries: list[ReportEntry]):
    if not isinstance(payload, str):
        entries.append(make_entry("E101", "$", "JSON-LD payload is not text"))
        return None
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        entries.append(make_entry("E101", "$", f"block does not parse: {exc}"))
        return None
    if not isinstance(doc, (dict, list)):
        entries.append(make_entry(
            "E101", "$", "top-level JSON value is not an object or array"))
        return None

    builder = _JsonLdBuilder(entries)
    top_objects = doc if isinstance(doc, list) else [doc]
    roots: list[AnnotationNode] = []
    for top in top_objects:
        if not isinstance(top, dict):
            builder.warn("top-level entry is not an object; skipped")
            continue
        if not _context_accepted(top.get("@context"), builder):
            continue
        if isinstance(top.get("@graph"), list):
            for item in top["@graph"]:
                if isinstance(item, dict):
                    roots.append(builder.build_node(item, top_level=True))
                else:
                    builder.warn("@graph entry is not an object; skipped")
        else:
            roots.append(builder.build_node(top, top_level=True))
    return roots


_ACCEPTED_CONTEXT_BASES = {"http://schema.org", "https://schema.org", "schema.org"}


def _context_string_ok(value: str) -> bool:
    return value.rstrip("/") in _ACCEPTED_CONTEXT_BASES


def _context_accepted(context, builder: _JsonLdBuilder) -> bool:
    """True when the block declares a schema.org context (or none at all)."""
    if context is None:
        return True
    if isinstance(context, str):
        if _context_string_ok(context):
            return True
        builder.warn(f"context {context!r} is not a schema.org context; "
                     "block skipped")
        return False
    if isinstance(context, dict):
        vocab_entry = context.get("@vocab")
        aliases = [k for k in context if not k.startswith("@")]
        if isinstance(vocab_entry, str) and _context_string_ok(vocab_entry):
            if aliases:
                builder.warn("term-aliasing context entries ignored: "
                             + ", ".join(sorted(aliases)))
            return True
        builder.warn("context object lacks a schema.org default vocabulary; "
                     "block skipped")
        return False
    if isinstance(context, list):
        strings = [c for c in context if isinstance(c, str)]
        if any(_context_string_ok(s) for s in strings):
            if any(isinstance(c, dict) for c in context):
                builder.warn("term-aliasing context entries ignored")
            return True
    builder.warn("unsupported @context form; block skipped")
    return False


def _parse_microdata(payload, entries: list[ReportEntry]):
    if not isinstance(payload, dict):
        entries.append(make_entry("E101", "$", "microdata payload is not an item"))
        return None
    builder = _JsonLdBuilder(entries)  # shares the id-merging machinery
    root = _microdata_node(payload, builder)
    return [root]


def _microdata_node(item: dict, builder: _JsonLdBuilder) -> AnnotationNode:
    identifier = item.get("id")
    if identifier:
        node = builder.node_for_id(identifier)
    else:
        node = AnnotationNode()
    if item.get("itemref"):
        builder.warn("itemref is not supported; referenced properties skipped")
    for t in item.get("types", []):
        stripped = strip_namespace(t)
        if stripped and stripped not in node.types:
            node.types.append(stripped)
    for name, value in item.get("properties", []):
        prop = strip_namespace(name)
        if "item" in value:
            parsed: PropertyValue = Entity(_microdata_node(value["item"], builder))
        else:
            raw = value.get("literal", "")
            parsed = Literal(raw, classify_literal(raw))
        node.properties.setdefault(prop, []).append(parsed)
    return node


# ---------------------------------------------------------------------------
# finalization


def _materialize_references(roots: list[AnnotationNode]) -> None:
    """Turn bare-identifier placeholders that never gained substance into
    Reference values."""
    seen: set[int] = set()

    def walk(node: AnnotationNode) -> None:
        if id(node) in seen:
            return
        seen.add(id(node))
        for values in node.properties.values():
            for i, value in enumerate(values):
                if isinstance(value, Entity):
                    target = value.node
                    if (target.identifier and not target.types
                            and not target.properties):
                        values[i] = Reference(iri=target.identifier)
                    else:
                        walk(target)

    for root in roots:
        walk(root)


def _dedup_roots(roots: list[AnnotationNode]) -> list[AnnotationNode]:
    out: list[AnnotationNode] = []
    seen: set[int] = set()
    for root in roots:
        if id(root) not in seen:
            seen.add(id(root))
            out.append(root)
    return out


def _has_typed_node(roots: list[AnnotationNode]) -> bool:
    stack = list(roots)
    seen: set[int] = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if node.types:
            return True
        for values in node.properties.values():
            stack.extend(v.node for v in values if isinstance(v, Entity))
    return False


def _assign_paths(roots: list[AnnotationNode], first_root_ordinal: int) -> None:
    assigned: set[int] = set()

    def assign(node: AnnotationNode, path: AnnotationPath) -> None:
        if id(node) in assigned:
            return
        assigned.add(id(node))
        node.path = path
        for prop, values in node.properties.items():
            multi = len(values) > 1
            for i, value in enumerate(values):
                value.path = path.child(prop, i if multi else None)
                if isinstance(value, Entity):
                    assign(value.node, value.path)

    for i, root in enumerate(roots):
        assign(root, AnnotationPath(first_root_ordinal + i))


def resolve_path(graph: AnnotationGraph, rendered: str):
    """Follow a rendered path; returns the AnnotationNode or PropertyValue
    it designates.  Raises KeyError when the path does not resolve."""
    match = re.match(r"^\$(\d+)", rendered)
    if not match:
        raise KeyError(f"bad path: {rendered!r}")
    ordinal = int(match.group(1))
    node = next((r for r in graph.roots
                 if r.path is not None and r.path.root == ordinal), None)
    if node is None:
        raise KeyError(f"no root {ordinal} in graph")
    rest = rendered[match.end():]
    steps = _PATH_STEP_RE.findall(rest)
    if "".join(f".{p}" + (f"[{i}]" if i else "") for p, i in steps) != rest:
        raise KeyError(f"bad path: {rendered!r}")
    current: PropertyValue | AnnotationNode = node
    for prop, index in steps:
        if isinstance(current, Entity):
            current = current.node
        if not isinstance(current, AnnotationNode):
            raise KeyError(f"path {rendered!r} descends into a non-entity")
        values = current.properties.get(prop)
        if not values:
            raise KeyError(f"path {rendered!r}: no property {prop!r}")
        current = values[int(index) if index else 0]
    return current
