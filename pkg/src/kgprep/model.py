"""Core data model for tabular-to-RDF integration systems.

An integration system bundles an optional ontology signature, a set of named
tabular sources, and the mapping rules that describe RDF output in terms of
those sources.  Every rule is a safe conjunctive rule: a head (class, subject
template, property bindings) over a body of source predicates, where each head
variable must be bound by at least one body predicate.

All types here are immutable after construction; validation never mutates and
reports violations as data rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

# The null marker: an empty CSV cell.  Null is a legal value everywhere; the
# RDF emitter suppresses output that would use a null in a subject or object.
NULL_VALUE = ""

# Object kinds of a head property binding.
OBJECT_LITERAL = "literal"
OBJECT_IRI_TEMPLATE = "iri-template"

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def is_null(value: str) -> bool:
    return value == NULL_VALUE


class TemplateError(ValueError):
    """Raised for malformed IRI template patterns."""


@dataclass(frozen=True)
class IriTemplate:
    """An IRI pattern made of constant text and named slots.

    Slots name attributes when the template lives in a mapping document and
    variables once lowered into a rule; the structure is identical.  Segments
    are (text, is_slot) pairs.
    """

    segments: tuple[tuple[str, bool], ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise TemplateError("template needs at least one segment")
        for text, is_slot in self.segments:
            if is_slot and not text:
                raise TemplateError("empty slot name in template")

    @classmethod
    def from_pattern(cls, pattern: str) -> "IriTemplate":
        """Parse a curly-brace pattern such as ``http://ex/gene/{ENSG}``."""
        segments: list[tuple[str, bool]] = []
        rest = pattern
        while rest:
            open_idx = rest.find("{")
            if open_idx == -1:
                if "}" in rest:
                    raise TemplateError(f"unbalanced '}}' in template {pattern!r}")
                segments.append((rest, False))
                break
            if open_idx > 0:
                if "}" in rest[:open_idx]:
                    raise TemplateError(f"unbalanced '}}' in template {pattern!r}")
                segments.append((rest[:open_idx], False))
            close_idx = rest.find("}", open_idx)
            if close_idx == -1:
                raise TemplateError(f"unbalanced '{{' in template {pattern!r}")
            slot = rest[open_idx + 1 : close_idx]
            if "{" in slot:
                raise TemplateError(f"nested '{{' in template {pattern!r}")
            segments.append((slot, True))
            rest = rest[close_idx + 1 :]
        if not segments:
            raise TemplateError("empty template pattern")
        return cls(tuple(segments))

    @property
    def pattern(self) -> str:
        return "".join(
            "{%s}" % text if is_slot else text for text, is_slot in self.segments
        )

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(text for text, is_slot in self.segments if is_slot)

    def rename_slots(self, mapping: Mapping[str, str]) -> "IriTemplate":
        return IriTemplate(
            tuple(
                (mapping.get(text, text), True) if is_slot else (text, False)
                for text, is_slot in self.segments
            )
        )

    def shape(self) -> tuple[tuple[str, bool], ...]:
        """The template with slot names erased; equal shapes build equal IRIs
        from equal slot values regardless of naming."""
        return tuple(
            ("", True) if is_slot else (text, False) for text, is_slot in self.segments
        )


@dataclass(frozen=True)
class Ontology:
    classes: frozenset[str]
    properties: frozenset[str]
    # (property IRI, domain class IRI) pairs; stored, never reasoned over.
    axioms: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", frozenset(self.classes))
        object.__setattr__(self, "properties", frozenset(self.properties))
        object.__setattr__(self, "axioms", tuple(tuple(a) for a in self.axioms))


@dataclass(frozen=True)
class SourceSignature:
    name: str
    attributes: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))

    def index_of(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise KeyError(
                f"source {self.name!r} has no attribute {attribute!r}"
            ) from None


@dataclass(frozen=True)
class SourceRelation:
    signature: SourceSignature
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))

    @property
    def name(self) -> str:
        return self.signature.name

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.signature.attributes

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class AttributeBinding:
    attribute: str
    variable: str


@dataclass(frozen=True)
class SourcePredicate:
    """One body atom: a source name plus attribute/variable bindings."""

    source: str
    bindings: tuple[AttributeBinding, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bindings", tuple(self.bindings))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(b.variable for b in self.bindings)

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(b.attribute for b in self.bindings)

    def attribute_for(self, variable: str) -> str | None:
        for b in self.bindings:
            if b.variable == variable:
                return b.attribute
        return None

    def variable_for(self, attribute: str) -> str | None:
        for b in self.bindings:
            if b.attribute == attribute:
                return b.variable
        return None


@dataclass(frozen=True)
class PropertyBinding:
    """One head pair: property IRI plus the variable (and optional IRI
    template) that produces the object.

    ``object_kind`` is OBJECT_LITERAL (object = the variable's value) or
    OBJECT_IRI_TEMPLATE (object = IRI built from ``object_template``).  For a
    zero-slot template (a constant object) the variable caries no information
    and is conventionally the rule's subject variable.
    """

    property: str
    variable: str
    object_kind: str = OBJECT_LITERAL
    object_template: IriTemplate | None = None

    def __post_init__(self) -> None:
        if self.object_kind not in (OBJECT_LITERAL, OBJECT_IRI_TEMPLATE):
            raise ValueError(f"unknown object kind {self.object_kind!r}")
        if self.object_kind == OBJECT_IRI_TEMPLATE and self.object_template is None:
            raise ValueError("iri-template binding requires an object template")


@dataclass(frozen=True)
class RuleHead:
    class_iri: str | None
    subject_var: str
    subject_template: IriTemplate
    property_bindings: tuple[PropertyBinding, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "property_bindings", tuple(self.property_bindings))

    @property
    def variables(self) -> frozenset[str]:
        names = {self.subject_var}
        names.update(self.subject_template.slots)
        for pb in self.property_bindings:
            names.add(pb.variable)
            if pb.object_template is not None:
                names.update(pb.object_template.slots)
        return frozenset(names)


@dataclass(frozen=True)
class MappingRule:
    id: str
    head: RuleHead
    body: tuple[SourcePredicate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(self.body))


@dataclass(frozen=True)
class IntegrationSystem:
    """The triple of ontology, sources, and mapping rules that both the
    optimizer and the RDF emitter consume."""

    ontology: Ontology | None
    sources: Mapping[str, SourceRelation]
    mappings: tuple[MappingRule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", dict(self.sources))
        object.__setattr__(self, "mappings", tuple(self.mappings))


# A map mu assigns values to rule variables; plain dicts suffice.
VarMap = dict


def head_variables(rule: MappingRule) -> frozenset[str]:
    """All variables the head consumes: subject variable, property binding
    variables, and every template slot (subject and object templates)."""
    return rule.head.variables


def body_variables(rule: MappingRule) -> frozenset[str]:
    names: set[str] = set()
    for pred in rule.body:
        names.update(b.variable for b in pred.bindings)
    return frozenset(names)


def join_variables(rule: MappingRule) -> frozenset[str]:
    """Variables bound in two or more distinct body predicates."""
    seen: set[str] = set()
    joined: set[str] = set()
    for pred in rule.body:
        for var in pred.variables:
            if var in seen:
                joined.add(var)
        seen.update(pred.variables)
    return frozenset(joined)


# Violation kinds reported by validate_system.
V_SAFETY = "safety"
V_EMPTY_BODY = "empty-body"
V_MISSING_SOURCE = "missing-source"
V_UNKNOWN_ATTRIBUTE = "unknown-attribute"
V_DUPLICATE_ATTRIBUTE = "duplicate-attribute-binding"
V_DUPLICATE_VARIABLE = "duplicate-variable-binding"
V_BAD_SIGNATURE = "bad-signature"
V_ROW_ARITY = "row-arity"
V_ONTOLOGY_AXIOM = "ontology-axiom"
V_UNKNOWN_CLASS = "unknown-class"
V_UNKNOWN_PROPERTY = "unknown-property"


@dataclass(frozen=True)
class Violation:
    kind: str
    where: str  # rule id or source name
    message: str


def _check_signature(sig: SourceSignature, out: list[Violation]) -> None:
    seen: set[str] = set()
    for attr in sig.attributes:
        if not attr:
            out.append(Violation(V_BAD_SIGNATURE, sig.name, "empty attribute name"))
        if attr in seen:
            out.append(
                Violation(V_BAD_SIGNATURE, sig.name, f"duplicate attribute {attr!r}")
            )
        seen.add(attr)


def validate_system(system: IntegrationSystem) -> list[Violation]:
    """Check every structural invariant; an empty report means valid.

    The report is deterministic: sorted by rule/source identifier, then
    violation kind, then message.
    """
    out: list[Violation] = []

    if system.ontology is not None:
        ont = system.ontology
        for prop, domain in ont.axioms:
            if prop not in ont.properties:
                out.append(
                    Violation(V_ONTOLOGY_AXIOM, "ontology", f"axiom property {prop} not declared")
                )
            if domain not in ont.classes:
                out.append(
                    Violation(V_ONTOLOGY_AXIOM, "ontology", f"axiom domain {domain} not declared")
                )

    for name, rel in system.sources.items():
        sig = rel.signature
        if sig.name != name:
            out.append(
                Violation(V_BAD_SIGNATURE, name, f"registered under {name!r} but signature says {sig.name!r}")
            )
        _check_signature(sig, out)
        arity = len(sig.attributes)
        for i, row in enumerate(rel.rows):
            if len(row) != arity:
                out.append(
                    Violation(V_ROW_ARITY, name, f"row {i} has {len(row)} values, expected {arity}")
                )
                break  # one report per source keeps the output small

    for rule in system.mappings:
        if not rule.body:
            out.append(Violation(V_EMPTY_BODY, rule.id, "rule body is empty"))
        bound = body_variables(rule)
        for var in sorted(head_variables(rule) - bound):
            out.append(
                Violation(V_SAFETY, rule.id, f"head variable {var!r} never bound in body")
            )
        for pred in rule.body:
            rel = system.sources.get(pred.source)
            if rel is None:
                out.append(
                    Violation(V_MISSING_SOURCE, rule.id, f"body references unknown source {pred.source!r}")
                )
            attrs_seen: set[str] = set()
            vars_seen: set[str] = set()
            for b in pred.bindings:
                if b.attribute in attrs_seen:
                    out.append(
                        Violation(V_DUPLICATE_ATTRIBUTE, rule.id, f"{pred.source}: attribute {b.attribute!r} bound twice")
                    )
                if b.variable in vars_seen:
                    out.append(
                        Violation(V_DUPLICATE_VARIABLE, rule.id, f"{pred.source}: variable {b.variable!r} bound to two attributes")
                    )
                attrs_seen.add(b.attribute)
                vars_seen.add(b.variable)
                if rel is not None and b.attribute not in rel.signature.attributes:
                    out.append(
                        Violation(V_UNKNOWN_ATTRIBUTE, rule.id, f"{pred.source}: no attribute {b.attribute!r}")
                    )
        if system.ontology is not None:
            head = rule.head
            if head.class_iri is not None and head.class_iri not in system.ontology.classes:
                out.append(
                    Violation(V_UNKNOWN_CLASS, rule.id, f"class {head.class_iri} not in ontology")
                )
            for pb in head.property_bindings:
                if pb.property not in system.ontology.properties:
                    out.append(
                        Violation(V_UNKNOWN_PROPERTY, rule.id, f"property {pb.property} not in ontology")
                    )

    out.sort(key=lambda v: (v.where, v.kind, v.message))
    return out
