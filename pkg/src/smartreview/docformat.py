"""Article import/export as a structured text document.

One file per article: a metadata header (``Key: value`` directives), then
sections introduced by ``== heading`` lines. Comparison bodies are embedded
CSV blocks whose first row holds the property labels and whose first
column holds the paper titles. Cell values: ``"text"`` is a plain string
literal, ``"text"^^xsd:type`` a typed literal, bare integers/decimals
become numeric literals, anything else names a resource by label
(created on demand). Multiple values are separated by `` | ``.
"""

from __future__ import annotations

import csv
import io
import re

from . import mdcite, vocab
from .articles import (
    ArticleService,
    ComparisonRef,
    EntityTable,
    NaturalText,
    OntologyTable,
    VisualizationRef,
)
from .errors import DocumentFormatError, SmartReviewError
from .model import EntityId, EntityKind, Provenance

FORMAT_LINE = "SmartReview-Document: 1"

_SECTION_RE = re.compile(r"^==\s+(.*)$")
_OPTION_RE = re.compile(r"^([A-Za-z][A-Za-z-]*):\s?(.*)$")
_TYPED_VALUE_RE = re.compile(r'^"(.*)"\^\^(\S+)$')
_QUOTED_VALUE_RE = re.compile(r'^"(.*)"$')
_INT_RE = re.compile(r"^-?\d+$")
_DECIMAL_RE = re.compile(r"^-?\d*\.\d+$")


# --- parsing ---------------------------------------------------------------


class _Section:
    def __init__(self, heading: str, line: int):
        self.heading = heading
        self.line = line
        self.options: dict[str, str] = {}
        self.body: list[str] = []


class _Document:
    def __init__(self):
        self.header: list[tuple[str, str, int]] = []
        self.sections: list[_Section] = []

    def header_values(self, key: str) -> list[str]:
        return [v for k, v, _ in self.header if k == key]

    def header_value(self, key: str) -> str | None:
        values = self.header_values(key)
        return values[0] if values else None


def _parse_document(text: str) -> _Document:
    lines = text.replace("\r\n", "\n").split("\n")
    if not lines or lines[0].strip() != FORMAT_LINE:
        raise DocumentFormatError(1, f"first line must be {FORMAT_LINE!r}")
    doc = _Document()
    section: _Section | None = None
    in_options = False
    for no, raw in enumerate(lines[1:], start=2):
        heading = _SECTION_RE.match(raw)
        if heading:
            section = _Section(heading.group(1).strip(), no)
            doc.sections.append(section)
            in_options = True
            continue
        if section is None:
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            option = _OPTION_RE.match(raw)
            if not option:
                raise DocumentFormatError(no, f"expected 'Key: value' header line, got {raw!r}")
            doc.header.append((option.group(1), option.group(2).strip(), no))
            continue
        if in_options:
            if not raw.strip():
                in_options = False
                continue
            option = _OPTION_RE.match(raw)
            if option:
                section.options[option.group(1)] = option.group(2).strip()
                continue
            in_options = False
        section.body.append(raw)
    for section in doc.sections:
        while section.body and not section.body[-1].strip():
            section.body.pop()
    return doc


# --- import ------------------------------------------------------------------


def import_document(text: str, articles: ArticleService, provenance: Provenance) -> EntityId:
    """Create the article described by ``text``; returns its id."""
    doc = _parse_document(text)
    store = articles.store
    title = doc.header_value("Title")
    if not title:
        raise DocumentFormatError(1, "missing Title header")
    field_ref = doc.header_value("Research-Field")
    if not field_ref:
        raise DocumentFormatError(1, "missing Research-Field header")
    field = _resolve_entity(store, field_ref, (EntityKind.RESOURCE,), create=True, provenance=provenance)

    with store.lock():
        article = articles.create_article(
            title, field, provenance, key=doc.header_value("Article-Key")
        )
        for value, no in [(v, n) for k, v, n in doc.header if k == "Statement"]:
            parts = value.split()
            if len(parts) != 2:
                raise DocumentFormatError(no, f"Statement needs '<predicate> <object>', got {value!r}")
            pred = _resolve_entity(store, parts[0], (EntityKind.PREDICATE,), create=True, provenance=provenance)
            obj = _resolve_entity(store, parts[1], (EntityKind.RESOURCE,), create=True, provenance=provenance)
            store.add_statement(article.id, pred, obj, provenance)
        for key, directive_pred in (("Description", vocab.HAS_DESCRIPTION), ("Same-As", vocab.SAME_AS)):
            for value, no in [(v, n) for k, v, n in doc.header if k == key]:
                ref, _, body = value.partition("|")
                if not body:
                    raise DocumentFormatError(no, f"{key} needs '<entity> | <text>'")
                target = _resolve_entity(
                    store, ref.strip(), (EntityKind.PREDICATE, EntityKind.RESOURCE, EntityKind.CLASS),
                    create=False, provenance=provenance,
                )
                if target is None:
                    raise DocumentFormatError(no, f"unknown entity {ref.strip()!r}")
                if not store.get_statements(subject=target, predicate=directive_pred):
                    store.add_statement(
                        target, directive_pred, store.intern_literal(body.strip()), provenance
                    )

        papers_by_title: dict[str, EntityId] = {}
        for value, no in [(v, n) for k, v, n in doc.header if k == "Paper"]:
            paper_id = _import_paper(articles, value, no, provenance)
            papers_by_title[articles.get_paper(paper_id).title] = paper_id

        comparisons_by_heading: dict[str, EntityId] = {}
        for position, section in enumerate(doc.sections):
            kind = section.options.get("Kind", "text")
            if kind == "text":
                body = NaturalText(
                    deo_type=section.options.get("Deo", "Background"),
                    markdown="\n".join(section.body),
                )
            elif kind == "comparison":
                comparison = _import_comparison(articles, section, papers_by_title, provenance)
                comparisons_by_heading[section.heading] = comparison
                body = ComparisonRef(comparison_id=comparison)
            elif kind == "visualization":
                body = VisualizationRef(
                    visualization_id=_import_visualization(
                        articles, section, comparisons_by_heading, provenance
                    )
                )
            elif kind == "ontology-table":
                body = OntologyTable(entity_ids=_entity_list(store, section, provenance))
            elif kind == "entity-table":
                body = EntityTable(
                    table_kind=section.options.get("Table-Kind", "Resources"),
                    entity_ids=_entity_list(store, section, provenance),
                )
            else:
                raise DocumentFormatError(section.line, f"unknown section kind {kind!r}")
            articles.add_section(article.id, position, body, section.heading, provenance)
    return article.id


def _resolve_entity(store, ref, kinds, create, provenance) -> EntityId | None:
    for kind in kinds:
        candidate = EntityId(kind, ref) if not re.search(r"\s", ref) else None
        if candidate and store.has_entity(candidate):
            return candidate
    for kind in kinds:
        hit = store.find_by_label(kind, ref)
        if hit is not None:
            return hit
    if not create:
        return None
    kind = kinds[0]
    if " " not in ref and re.match(r"^[RPC]\d+$", ref):
        return store.create_entity(kind, label=ref, key=ref, provenance=provenance)
    return store.create_entity(kind, label=ref, provenance=provenance)


def _import_paper(articles: ArticleService, value: str, no: int, provenance) -> EntityId:
    parts = [p.strip() for p in value.split("|")]
    if len(parts) != 4:
        raise DocumentFormatError(no, "Paper needs '<key|-> | <title> | <authors> | <date>'")
    key, title, authors_text, date = parts
    key = None if key in ("", "-") else key
    store = articles.store
    if key is not None:
        candidate = EntityId(EntityKind.RESOURCE, key)
        if store.has_entity(candidate) and vocab.CLASS_PAPER in store.classes_of(candidate):
            return candidate
    authors = [a.strip() for a in authors_text.split(";") if a.strip()]
    return articles.create_paper(title, authors, date, provenance, key=key).id


def _import_comparison(articles: ArticleService, section: _Section, papers_by_title, provenance) -> EntityId:
    store = articles.store
    reader = csv.reader(io.StringIO("\n".join(section.body)))
    table = [row for row in reader if row]
    if not table or len(table[0]) < 2:
        raise DocumentFormatError(section.line, "comparison body must be a CSV block with properties")
    property_labels = [c.strip() for c in table[0][1:]]
    properties = []
    for label in property_labels:
        prop = _resolve_entity(store, label, (EntityKind.PREDICATE,), create=True, provenance=provenance)
        properties.append(prop)
    pairs: list[tuple[EntityId, EntityId]] = []
    cells: dict[tuple[EntityId, EntityId], list[EntityId]] = {}
    for row in table[1:]:
        title = row[0].strip()
        paper = papers_by_title.get(title)
        if paper is None:
            paper = store.find_by_label(EntityKind.RESOURCE, title)
        if paper is None or vocab.CLASS_PAPER not in store.classes_of(paper):
            raise DocumentFormatError(section.line, f"comparison row names unknown paper {title!r}")
        contributions = articles.get_paper(paper).contributions
        contribution = contributions[0]
        pairs.append((paper, contribution))
        for prop, cell in zip(properties, row[1:]):
            values = _parse_cell_values(store, cell, provenance)
            if values:
                cells[(contribution, prop)] = values
    comparison = articles.create_comparison(
        pairs, properties, cells, provenance, label=section.options.get("Label", section.heading)
    )
    return comparison.id


def _parse_cell_values(store, cell: str, provenance) -> list[EntityId]:
    values = []
    for token in (t.strip() for t in cell.split("|")):
        if not token:
            continue
        typed = _TYPED_VALUE_RE.match(token)
        if typed:
            values.append(store.intern_literal(typed.group(1), typed.group(2)))
            continue
        quoted = _QUOTED_VALUE_RE.match(token)
        if quoted:
            values.append(store.intern_literal(quoted.group(1)))
            continue
        if _INT_RE.match(token):
            values.append(store.intern_literal(token, "xsd:integer"))
            continue
        if _DECIMAL_RE.match(token):
            values.append(store.intern_literal(token, "xsd:decimal"))
            continue
        existing = store.find_by_label(EntityKind.RESOURCE, token)
        if existing is None:
            existing = store.create_entity(EntityKind.RESOURCE, label=token, provenance=provenance)
        values.append(existing)
    return values


def _import_visualization(articles: ArticleService, section: _Section, comparisons_by_heading, provenance) -> EntityId:
    store = articles.store
    ref = section.options.get("Comparison", "")
    comparison = comparisons_by_heading.get(ref)
    if comparison is None and ref:
        candidate = EntityId(EntityKind.RESOURCE, ref)
        if store.has_entity(candidate):
            comparison = candidate
    if comparison is None:
        raise DocumentFormatError(section.line, f"visualization references unknown comparison {ref!r}")
    chart = section.options.get("Chart", "Table")
    series = None
    series_ref = section.options.get("Series")
    if series_ref:
        series = _resolve_entity(store, series_ref, (EntityKind.PREDICATE,), create=False, provenance=provenance)
        if series is None:
            raise DocumentFormatError(section.line, f"unknown series property {series_ref!r}")
    viz = articles.create_visualization(
        comparison, chart, series, section.options.get("Label", section.heading), provenance
    )
    return viz.id


def _entity_list(store, section: _Section, provenance) -> tuple[EntityId, ...]:
    spec = section.options.get("Entities", "auto")
    if spec.strip().lower() == "auto":
        return ()
    out = []
    for token in (t.strip() for t in spec.split(";")):
        if not token:
            continue
        eid = _resolve_entity(
            store, token, (EntityKind.PREDICATE, EntityKind.RESOURCE, EntityKind.CLASS),
            create=False, provenance=provenance,
        )
        if eid is None:
            raise DocumentFormatError(section.line, f"unknown entity {token!r}")
        out.append(eid)
    return tuple(out)


# --- export ---------------------------------------------------------------------


def export_document(article_id: EntityId, articles: ArticleService) -> str:
    """Head-version export in the same structured text format."""
    store = articles.store
    article = articles.get_article(article_id)
    lines = [FORMAT_LINE, f"Title: {article.title}", f"Article-Key: {article.id.key}"]
    if article.research_field is not None:
        lines.append(f"Research-Field: {article.research_field.key}")
    skip = set(vocab.STRUCTURAL_PREDICATES) | {vocab.P30}
    for stmt in store.get_statements(subject=article.id):
        if stmt.predicate in skip or stmt.object.kind is EntityKind.LITERAL:
            continue
        if stmt.predicate == vocab.TYPE_PREDICATE:
            continue
        lines.append(f"Statement: {stmt.predicate.key} {stmt.object.key}")

    used_properties, used_resources = articles.collect_used_entities(article_id)
    for entity in list(used_properties) + list(used_resources):
        _, description, external = articles.describe_entity(entity.id)
        if description:
            lines.append(f"Description: {entity.id.key} | {description}")
        if external:
            lines.append(f"Same-As: {entity.id.key} | {external}")

    papers_in_order: list[EntityId] = []
    for section in article.sections:
        if section.kind == "comparison" and section.comparison_id is not None:
            comparison = articles.get_comparison(section.comparison_id)
            for paper, _ in comparison.columns:
                if paper not in papers_in_order:
                    papers_in_order.append(paper)
    for section in article.sections:
        if section.kind != "text":
            continue
        for key in mdcite.extract_citations(mdcite.parse(section.markdown or "")):
            candidate = EntityId(EntityKind.RESOURCE, key)
            if (
                store.has_entity(candidate)
                and vocab.CLASS_PAPER in store.classes_of(candidate)
                and candidate not in papers_in_order
            ):
                papers_in_order.append(candidate)
    for paper_id in papers_in_order:
        paper = articles.get_paper(paper_id)
        authors = "; ".join(paper.authors)
        lines.append(f"Paper: {paper.id.key} | {paper.title} | {authors} | {paper.publication_date}")

    for section in article.sections:
        lines.append("")
        lines.append(f"== {section.heading}")
        if section.kind == "text":
            lines.append("Kind: text")
            if section.deo_type:
                lines.append(f"Deo: {section.deo_type}")
            lines.append("")
            if section.markdown:
                lines.append(section.markdown)
        elif section.kind == "comparison" and section.comparison_id is not None:
            comparison = articles.get_comparison(section.comparison_id)
            lines.append("Kind: comparison")
            if comparison.label != section.heading:
                lines.append(f"Label: {comparison.label}")
            lines.append("")
            lines.append(_comparison_csv(articles, comparison))
        elif section.kind == "visualization" and section.visualization_id is not None:
            viz = articles.get_visualization(section.visualization_id)
            lines.append("Kind: visualization")
            heading = _heading_of_comparison(article, viz.comparison_id)
            lines.append(f"Comparison: {heading or viz.comparison_id.key}")
            lines.append(f"Chart: {viz.chart_kind}")
            if viz.series_property is not None:
                lines.append(f"Series: {viz.series_property.key}")
            lines.append(f"Label: {viz.label}")
        elif section.kind == "ontology-table":
            lines.append("Kind: ontology-table")
            lines.append(_entities_line(section.entity_ids))
        elif section.kind == "entity-table":
            lines.append("Kind: entity-table")
            lines.append(f"Table-Kind: {section.table_kind or 'Resources'}")
            lines.append(_entities_line(section.entity_ids))
    return "\n".join(lines).rstrip("\n") + "\n"


def _entities_line(entity_ids) -> str:
    if not entity_ids:
        return "Entities: auto"
    return "Entities: " + "; ".join(eid.key for eid in entity_ids)


def _heading_of_comparison(article, comparison_id) -> str | None:
    for section in article.sections:
        if section.kind == "comparison" and section.comparison_id == comparison_id:
            return section.heading
    return None


def _comparison_csv(articles: ArticleService, comparison) -> str:
    store = articles.store
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["Paper"] + [store.get_entity(p).label for p in comparison.rows])
    for paper, contrib in comparison.columns:
        row = [store.get_entity(paper).label]
        for prop in comparison.rows:
            values = comparison.cells.get((contrib, prop), [])
            row.append(" | ".join(_cell_text(store, v) for v in values))
        writer.writerow(row)
    return buf.getvalue().rstrip("\n")


def _cell_text(store, value: EntityId) -> str:
    entity = store.get_entity(value)
    if entity.kind is not EntityKind.LITERAL:
        return entity.label or entity.id.key
    text = entity.literal_value or ""
    if entity.datatype in ("xsd:integer", "xsd:decimal"):
        return text
    if entity.datatype is None:
        return f'"{text}"'
    return f'"{text}"^^{entity.datatype}'
