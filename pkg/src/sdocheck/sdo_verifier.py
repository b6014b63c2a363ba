"""Vocabulary conformance checks over an annotation graph.

Eight check families, each keyed to a report code:

    E201 unknown type              E205 malformed literal
    E202 unknown property          E206 empty value
    E203 domain violation          E207 duplicated value
    E204 range violation           E208 semantic inconsistency

plus E209, an informational note for untyped nested entities whose own
properties cannot be checked.  Findings are data, never exceptions, and the
returned list is ordered by (path, code) so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from decimal import Decimal
from typing import Callable

from .annotation import (AnnotationGraph, AnnotationNode, Entity, Literal,
                         PropertyValue, Reference)
from .report import ReportEntry, make_entry
from .vocab import (DATATYPE_WIDENING, TermKind, VocabularyGraph, lookup_term,
                    is_subclass_of, property_applies_to, strip_namespace,
                    value_conforms_to_range)


class DuplicateRuleId(Exception):
    """A semantic rule with this id is already registered."""


@dataclass(frozen=True)
class RuleViolation:
    description: str
    property_name: str | None = None


@dataclass(frozen=True)
class SemanticRule:
    """A consistency predicate over nodes of one applicable type.

    ``check`` must be side-effect free and total over nodes whose type is
    (a subclass of) ``applicable_type``; it returns None when satisfied.
    """

    id: str
    applicable_type: str
    check: Callable[[AnnotationNode], RuleViolation | None]


def _first_literal(node: AnnotationNode, prop: str) -> Literal | None:
    for value in node.properties.get(prop, []):
        if isinstance(value, Literal):
            return value
    return None


def _check_event_dates(node: AnnotationNode) -> RuleViolation | None:
    start = _first_literal(node, "startDate")
    end = _first_literal(node, "endDate")
    if start is None or end is None or start.datatype != end.datatype:
        return None
    if start.datatype == "Date":
        start_value, end_value = date.fromisoformat(start.raw), date.fromisoformat(end.raw)
    elif start.datatype == "DateTime":
        start_value = datetime.fromisoformat(start.raw.replace("Z", "+00:00"))
        end_value = datetime.fromisoformat(end.raw.replace("Z", "+00:00"))
        if (start_value.tzinfo is None) != (end_value.tzinfo is None):
            return None  # mixed naive/zoned timestamps are not comparable
    else:
        return None
    if end_value < start_value:
        return RuleViolation(
            f"endDate {end.raw} precedes startDate {start.raw}", "endDate")
    return None


def _check_value_order(node: AnnotationNode) -> RuleViolation | None:
    low = _first_literal(node, "minValue")
    high = _first_literal(node, "maxValue")
    if low is None or high is None:
        return None
    if low.datatype not in ("Integer", "Float") or high.datatype not in ("Integer", "Float"):
        return None
    if Decimal(low.raw) > Decimal(high.raw):
        return RuleViolation(
            f"minValue {low.raw} exceeds maxValue {high.raw}", "minValue")
    return None


def builtin_rules() -> tuple[SemanticRule, ...]:
    return (
        SemanticRule("event-dates", "Event", _check_event_dates),
        SemanticRule("value-order", "Thing", _check_value_order),
    )


class SemanticRuleRegistry:
    def __init__(self, rules: tuple[SemanticRule, ...] = ()):
        self._rules: dict[str, SemanticRule] = {}
        for rule in rules:
            self.register(rule)

    def register(self, rule: SemanticRule) -> None:
        if rule.id in self._rules:
            raise DuplicateRuleId(rule.id)
        self._rules[rule.id] = rule

    def rules(self) -> list[SemanticRule]:
        return sorted(self._rules.values(), key=lambda r: r.id)


DEFAULT_REGISTRY = SemanticRuleRegistry(builtin_rules())


def register_semantic_rule(rule: SemanticRule) -> None:
    """Add a rule to the default registry used by verify_schema_org."""
    DEFAULT_REGISTRY.register(rule)


def check_literal_against_ranges(value: Literal, ranges: set[str],
                                 vocab: VocabularyGraph,
                                 ) -> tuple[bool, str | None]:
    """Does a literal fit one of the declared ranges, and which one?

    Matching tiers, most informative first: exact datatype, numeric
    widening, a Text range (any literal is text), then enumeration
    membership by bare member name or member IRI.
    """
    inferred = value.datatype
    ordered = sorted(ranges)
    for r in ordered:
        if r == inferred:
            return True, r
    for r in ordered:
        if inferred in DATATYPE_WIDENING and r in DATATYPE_WIDENING[inferred]:
            return True, r
    if "Text" in ranges:
        return True, "Text"
    member = strip_namespace(value.raw)
    for r in ordered:
        cls = vocab.classes.get(r)
        if cls is not None and cls.is_enumeration:
            if member in vocab.enumeration_members.get(r, frozenset()):
                return True, r
    return False, None


def verify_schema_org(graph: AnnotationGraph, vocab: VocabularyGraph,
                      strict: bool = False,
                      registry: SemanticRuleRegistry | None = None,
                      ) -> list[ReportEntry]:
    """Run all vocabulary conformance checks over every reachable node."""
    rules = (registry or DEFAULT_REGISTRY).rules()
    findings: list[ReportEntry] = []
    for node in graph.iter_nodes():
        _check_node(node, vocab, strict, rules, findings)
    findings.sort(key=lambda e: (e.path, e.code))
    return findings


def _check_node(node: AnnotationNode, vocab: VocabularyGraph, strict: bool,
                rules: list[SemanticRule], findings: list[ReportEntry]) -> None:
    node_path = node.path.render()
    known_types = []
    for t in node.types:
        kind = lookup_term(vocab, t)
        if kind not in (TermKind.CLASS, TermKind.ENUMERATION):
            findings.append(make_entry(
                "E201", node_path, f"type {t!r} is not defined by the vocabulary",
                strict))
        else:
            known_types.append(t)

    if not node.types and node.properties:
        findings.append(make_entry(
            "E209", node_path,
            "entity has no type; domain and range checks were skipped"))
    if not node.properties:
        findings.append(make_entry(
            "E206", node_path, "entity has no properties"))

    for prop, values in node.properties.items():
        prop_path = node.path.child(prop).render()
        prop_known = lookup_term(vocab, prop) is TermKind.PROPERTY
        if not prop_known:
            findings.append(make_entry(
                "E202", prop_path,
                f"property {prop!r} is not defined by the vocabulary", strict))
        elif known_types and not any(property_applies_to(vocab, prop, t)
                                     for t in known_types):
            findings.append(make_entry(
                "E203", prop_path,
                f"property {prop!r} does not apply to "
                f"{_type_list_text(node.types)}", strict))

        for value in values:
            _check_value(value, prop, prop_known, vocab, strict, findings)
        _check_duplicates(prop, prop_path, values, findings, strict)

    for rule in rules:
        if not _rule_applies(rule, known_types, vocab):
            continue
        violation = rule.check(node)
        if violation is not None:
            path = node_path
            if violation.property_name:
                path = node.path.child(violation.property_name).render()
            findings.append(make_entry(
                "E208", path,
                f"rule {rule.id!r}: {violation.description}", strict))


def _type_list_text(types: list[str]) -> str:
    return "type " + "/".join(types) if types else "an untyped node"


def _rule_applies(rule: SemanticRule, known_types: list[str],
                  vocab: VocabularyGraph) -> bool:
    if rule.applicable_type not in vocab.classes:
        return False
    return any(is_subclass_of(vocab, t, rule.applicable_type)
               for t in known_types)


def _check_value(value: PropertyValue, prop: str, prop_known: bool,
                 vocab: VocabularyGraph, strict: bool,
                 findings: list[ReportEntry]) -> None:
    value_path = value.path.render()
    if isinstance(value, Literal):
        if value.raw.strip() == "":
            findings.append(make_entry(
                "E206", value_path, f"value of {prop!r} is empty"))
            return
        if not prop_known:
            return
        ranges = vocab.properties[prop].range_includes
        conforms, _ = check_literal_against_ranges(value, set(ranges), vocab)
        if conforms:
            return
        all_datatype_ranges = all(r in vocab.datatypes for r in ranges)
        if value.datatype == "Text" and all_datatype_ranges and "Text" not in ranges:
            findings.append(make_entry(
                "E205", value_path,
                f"value {_shorten(value.raw)!r} is plain text but {prop!r} "
                f"expects {_range_text(ranges)}", strict))
        else:
            findings.append(make_entry(
                "E204", value_path,
                f"value {_shorten(value.raw)!r} ({value.datatype}) does not "
                f"conform to {_range_text(ranges)}", strict))
        return

    if not prop_known:
        return
    ranges = vocab.properties[prop].range_includes

    if isinstance(value, Entity):
        class_types = [t for t in value.node.types if t in vocab.classes]
        if class_types:
            if not any(value_conforms_to_range(vocab, prop, t)
                       for t in class_types):
                findings.append(make_entry(
                    "E204", value_path,
                    f"entity of {_type_list_text(value.node.types)} does not "
                    f"conform to {_range_text(ranges)}", strict))
        elif value.node.types:
            pass  # every declared type is unknown; E201 already filed there
        elif not any(r in vocab.classes for r in ranges):
            findings.append(make_entry(
                "E204", value_path,
                f"untyped entity where {prop!r} expects {_range_text(ranges)}",
                strict))
        return

    if isinstance(value, Reference):
        member = strip_namespace(value.iri)
        for r in ranges:
            cls = vocab.classes.get(r)
            if cls is not None and cls.is_enumeration:
                if member in vocab.enumeration_members.get(r, frozenset()):
                    return
        if any(r in vocab.classes for r in ranges):
            return  # an external reference may denote any entity
        findings.append(make_entry(
            "E204", value_path,
            f"reference {value.iri!r} where {prop!r} expects "
            f"{_range_text(ranges)}", strict))


def _check_duplicates(prop: str, prop_path: str, values: list[PropertyValue],
                      findings: list[ReportEntry], strict: bool) -> None:
    counts: dict[tuple, int] = {}
    labels: dict[tuple, str] = {}
    for value in values:
        if isinstance(value, Literal):
            key = ("lit", value.raw)
            labels[key] = value.raw
        elif isinstance(value, Reference):
            key = ("ref", value.iri)
            labels[key] = value.iri
        elif value.node.identifier:
            key = ("ref", value.node.identifier)
            labels[key] = value.node.identifier
        else:
            key = ("ent", id(value.node))
            labels[key] = "<anonymous entity>"
        counts[key] = counts.get(key, 0) + 1
    for key, count in counts.items():
        if count > 1:
            findings.append(make_entry(
                "E207", prop_path,
                f"value {_shorten(labels[key])!r} occurs {count} times "
                f"under {prop!r}", strict))


def _range_text(ranges) -> str:
    return "range {" + ", ".join(sorted(ranges)) + "}"


def _shorten(text: str, limit: int = 60) -> str:
    return text if len(text) <= limit else text[:limit - 3] + "..."
