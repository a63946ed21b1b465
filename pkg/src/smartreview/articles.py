"""The review document model: articles, typed sections, papers,
comparisons and visualizations, all materialized as graph statements and
read back from any graph view (head store or frozen snapshot)."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import vocab
from .errors import (
    DanglingReference,
    DuplicateKey,
    DuplicateProperty,
    InvalidPosition,
    UndeclaredRowOrColumn,
    UnknownArticle,
    UnknownComparison,
    UnknownDeoType,
    UnknownEntity,
    UnknownSection,
)
from .model import Entity, EntityId, EntityKind, Provenance
from .store import GraphStore

# --- section bodies --------------------------------------------------------


@dataclass(frozen=True)
class NaturalText:
    deo_type: str
    markdown: str


@dataclass(frozen=True)
class ComparisonRef:
    comparison_id: EntityId


@dataclass(frozen=True)
class VisualizationRef:
    visualization_id: EntityId


@dataclass(frozen=True)
class OntologyTable:
    entity_ids: tuple[EntityId, ...] = ()


@dataclass(frozen=True)
class EntityTable:
    table_kind: str  # Resources | Properties
    entity_ids: tuple[EntityId, ...] = ()


SectionBody = NaturalText | ComparisonRef | VisualizationRef | OntologyTable | EntityTable

# --- read-back views ---------------------------------------------------------


@dataclass
class SectionView:
    id: EntityId
    heading: str
    kind: str
    position: int
    deo_type: str | None = None
    markdown: str | None = None
    comparison_id: EntityId | None = None
    visualization_id: EntityId | None = None
    table_kind: str | None = None
    entity_ids: list[EntityId] = field(default_factory=list)


@dataclass
class ArticleView:
    id: EntityId
    title: str
    research_field: EntityId | None
    contribution: EntityId
    sections: list[SectionView]


@dataclass
class PaperView:
    id: EntityId
    title: str
    authors: list[str]
    publication_date: str
    contributions: list[EntityId]


@dataclass
class ComparisonView:
    id: EntityId
    label: str
    columns: list[tuple[EntityId, EntityId]]  # (paper, contribution), ordered
    rows: list[EntityId]  # property ids, ordered
    cells: dict[tuple[EntityId, EntityId], list[EntityId]]


@dataclass
class VisualizationView:
    id: EntityId
    comparison_id: EntityId
    chart_kind: str
    series_property: EntityId | None
    label: str


class ArticleService:
    """Stateless operations over a graph store; every mutation is one
    serialized statement batch under the store's writer lock."""

    def __init__(self, store: GraphStore):
        self.store = store
        self._deo_names = set(vocab.deo_class_names())

    # --- articles ----------------------------------------------------------

    def create_article(
        self,
        title: str,
        research_field: EntityId,
        provenance: Provenance,
        key: str | None = None,
    ) -> ArticleView:
        store = self.store
        if not store.has_entity(research_field):
            raise UnknownEntity(f"unknown research field {research_field}")
        with store.lock():
            article = self._adopt_or_create_resource(key, title, provenance)
            store.add_statement(article, vocab.TYPE_PREDICATE, vocab.CLASS_SMARTREVIEW, provenance)
            store.add_statement(article, vocab.HAS_TITLE, store.intern_literal(title), provenance)
            store.add_statement(article, vocab.P30, research_field, provenance)
            contribution = store.create_entity(
                EntityKind.RESOURCE,
                label="Contribution 1",
                classes=[vocab.CLASS_CONTRIBUTION],
                provenance=provenance,
            )
            store.add_statement(article, vocab.P31, contribution, provenance)
        return self.get_article(article)

    def _adopt_or_create_resource(self, key: str | None, label: str, provenance: Provenance) -> EntityId:
        store = self.store
        if key is None:
            return store.create_entity(EntityKind.RESOURCE, label=label, provenance=provenance)
        candidate = EntityId(EntityKind.RESOURCE, key)
        if store.has_entity(candidate):
            # reserved bare resources (no type yet) may be adopted
            if store.classes_of(candidate):
                raise DuplicateKey(f"resource {key} is already in use")
            store.update_label(candidate, label)
            return candidate
        return store.create_entity(EntityKind.RESOURCE, label=label, key=key, provenance=provenance)

    def list_articles(self, view=None) -> list[ArticleView]:
        view = view or self.store
        stmts = view.get_statements(predicate=vocab.TYPE_PREDICATE, object=vocab.CLASS_SMARTREVIEW)
        return [self.get_article(s.subject, view) for s in stmts]

    def get_article(self, article_id: EntityId, view=None) -> ArticleView:
        view = view or self.store
        self._require_article(article_id, view)
        title = self._literal_of(view, article_id, vocab.HAS_TITLE)
        if title is None:
            title = view.get_entity(article_id).label
        fields = view.get_statements(subject=article_id, predicate=vocab.P30)
        contribution = self._contribution_of(article_id, view)
        sections = [
            self._section_view(sid, pos, view)
            for pos, sid in enumerate(self._ordered_sections(contribution, view))
        ]
        return ArticleView(
            id=article_id,
            title=title,
            research_field=fields[0].object if fields else None,
            contribution=contribution,
            sections=sections,
        )

    def _require_article(self, article_id: EntityId, view) -> None:
        if not view.has_entity(article_id) or vocab.CLASS_SMARTREVIEW not in view.classes_of(article_id):
            raise UnknownArticle(f"unknown article {article_id}")

    def _contribution_of(self, article_id: EntityId, view) -> EntityId:
        links = view.get_statements(subject=article_id, predicate=vocab.P31)
        if not links:
            raise UnknownArticle(f"article {article_id} has no contribution node")
        return links[0].object

    def _ordered_sections(self, contribution: EntityId, view) -> list[EntityId]:
        links = view.get_statements(subject=contribution, predicate=vocab.HAS_SECTION)
        keyed = []
        for stmt in links:
            index_text = self._literal_of(view, stmt.object, vocab.HAS_ORDER_INDEX)
            index = int(index_text) if index_text and index_text.lstrip("-").isdigit() else 1 << 30
            keyed.append((index, stmt.seq, stmt.object))
        keyed.sort(key=lambda t: (t[0], t[1]))
        return [sid for _, _, sid in keyed]

    def _literal_of(self, view, subject: EntityId, pred: EntityId) -> str | None:
        stmts = view.get_statements(subject=subject, predicate=pred)
        if not stmts:
            return None
        obj = view.get_entity(stmts[0].object)
        return obj.literal_value if obj.kind is EntityKind.LITERAL else obj.label

    def _section_view(self, section_id: EntityId, position: int, view) -> SectionView:
        classes = view.classes_of(section_id)
        heading = self._literal_of(view, section_id, vocab.HAS_HEADING) or ""
        kind = "text"
        if vocab.CLASS_COMPARISON_SECTION in classes:
            kind = "comparison"
        elif vocab.CLASS_VISUALIZATION_SECTION in classes:
            kind = "visualization"
        elif vocab.CLASS_ONTOLOGY_TABLE_SECTION in classes:
            kind = "ontology-table"
        elif vocab.CLASS_ENTITY_TABLE_SECTION in classes:
            kind = "entity-table"
        section = SectionView(id=section_id, heading=heading, kind=kind, position=position)
        if kind == "text":
            section.markdown = self._literal_of(view, section_id, vocab.HAS_CONTENT) or ""
            for cls in sorted(classes):
                if view.has_entity(cls) and view.get_entity(cls).external_vocab == "deo":
                    section.deo_type = cls.key
                    break
        elif kind in ("comparison", "visualization"):
            refs = view.get_statements(subject=section_id, predicate=vocab.REFERS_TO)
            if refs:
                target = refs[0].object
                if kind == "comparison":
                    section.comparison_id = target
                else:
                    section.visualization_id = target
        else:
            section.entity_ids = [
                s.object for s in view.get_statements(subject=section_id, predicate=vocab.HAS_TABLE_ENTITY)
            ]
            if kind == "entity-table":
                section.table_kind = self._literal_of(view, section_id, vocab.HAS_TABLE_KIND)
        return section

    # --- sections -----------------------------------------------------------

    def add_section(
        self,
        article_id: EntityId,
        position: int,
        body: SectionBody,
        heading: str,
        provenance: Provenance,
    ) -> SectionView:
        store = self.store
        self._require_article(article_id, store)
        contribution = self._contribution_of(article_id, store)
        current = self._ordered_sections(contribution, store)
        if position < 0 or position > len(current):
            raise InvalidPosition(f"position {position} outside [0, {len(current)}]")
        classes, extra = self._body_statements(body)
        with store.lock():
            section = store.create_entity(
                EntityKind.RESOURCE,
                label=heading or "Untitled section",
                classes=classes,
                provenance=provenance,
            )
            store.add_statement(section, vocab.HAS_HEADING, store.intern_literal(heading), provenance)
            for pred, obj in extra(section):
                store.add_statement(section, pred, obj, provenance)
            store.add_statement(contribution, vocab.HAS_SECTION, section, provenance)
            ordered = current[:position] + [section] + current[position:]
            self._renumber(ordered, provenance)
        view = self.get_article(article_id)
        return view.sections[position]

    def _body_statements(self, body: SectionBody):
        store = self.store
        if isinstance(body, NaturalText):
            if body.deo_type not in self._deo_names:
                raise UnknownDeoType(f"not a discourse type: {body.deo_type!r}")
            deo_class = EntityId(EntityKind.CLASS, body.deo_type)
            return [vocab.CLASS_SECTION, deo_class], lambda s: [
                (vocab.HAS_CONTENT, store.intern_literal(body.markdown))
            ]
        if isinstance(body, ComparisonRef):
            self._require_comparison(body.comparison_id)
            return [vocab.CLASS_SECTION, vocab.CLASS_COMPARISON_SECTION], lambda s: [
                (vocab.REFERS_TO, body.comparison_id)
            ]
        if isinstance(body, VisualizationRef):
            if (
                not store.has_entity(body.visualization_id)
                or vocab.CLASS_VISUALIZATION not in store.classes_of(body.visualization_id)
            ):
                raise DanglingReference(f"unknown visualization {body.visualization_id}")
            return [vocab.CLASS_SECTION, vocab.CLASS_VISUALIZATION_SECTION], lambda s: [
                (vocab.REFERS_TO, body.visualization_id)
            ]
        if isinstance(body, OntologyTable):
            for eid in body.entity_ids:
                if not store.has_entity(eid):
                    raise DanglingReference(f"unknown entity {eid}")
            return [vocab.CLASS_SECTION, vocab.CLASS_ONTOLOGY_TABLE_SECTION], lambda s: [
                (vocab.HAS_TABLE_ENTITY, eid) for eid in body.entity_ids
            ]
        if isinstance(body, EntityTable):
            if body.table_kind not in vocab.TABLE_KINDS:
                raise DanglingReference(f"unknown table kind {body.table_kind!r}")
            for eid in body.entity_ids:
                if not store.has_entity(eid):
                    raise DanglingReference(f"unknown entity {eid}")
            return [vocab.CLASS_SECTION, vocab.CLASS_ENTITY_TABLE_SECTION], lambda s: [
                (vocab.HAS_TABLE_KIND, store.intern_literal(body.table_kind))
            ] + [(vocab.HAS_TABLE_ENTITY, eid) for eid in body.entity_ids]
        raise DanglingReference(f"unsupported section body {body!r}")

    def _renumber(self, ordered: list[EntityId], provenance: Provenance) -> None:
        store = self.store
        for index, section in enumerate(ordered):
            current = store.get_statements(subject=section, predicate=vocab.HAS_ORDER_INDEX)
            value = str(index)
            if current and store.get_entity(current[0].object).literal_value == value:
                continue
            for stmt in current:
                store.remove_statement(stmt.id, provenance)
            store.add_statement(
                section,
                vocab.HAS_ORDER_INDEX,
                store.intern_literal(value, "xsd:integer"),
                provenance,
            )

    def _article_of_section(self, section_id: EntityId) -> tuple[EntityId, EntityId]:
        links = self.store.get_statements(predicate=vocab.HAS_SECTION, object=section_id)
        if not links:
            raise UnknownSection(f"unknown section {section_id}")
        contribution = links[0].subject
        owners = self.store.get_statements(predicate=vocab.P31, object=contribution)
        for stmt in owners:
            if vocab.CLASS_SMARTREVIEW in self.store.classes_of(stmt.subject):
                return stmt.subject, contribution
        raise UnknownSection(f"section {section_id} belongs to no article")

    def update_section(
        self,
        section_id: EntityId,
        provenance: Provenance,
        heading: str | None = None,
        markdown: str | None = None,
        deo_type: str | None = None,
        position: int | None = None,
    ) -> ArticleView:
        store = self.store
        article_id, contribution = self._article_of_section(section_id)
        with store.lock():
            if heading is not None:
                self._replace_literal(section_id, vocab.HAS_HEADING, heading, provenance)
                store.update_label(section_id, heading or "Untitled section")
            if markdown is not None:
                self._replace_literal(section_id, vocab.HAS_CONTENT, markdown, provenance)
            if deo_type is not None:
                if deo_type not in self._deo_names:
                    raise UnknownDeoType(f"not a discourse type: {deo_type!r}")
                for stmt in store.get_statements(subject=section_id, predicate=vocab.TYPE_PREDICATE):
                    if store.get_entity(stmt.object).external_vocab == "deo":
                        store.remove_statement(stmt.id, provenance)
                store.add_statement(
                    section_id, vocab.TYPE_PREDICATE, EntityId(EntityKind.CLASS, deo_type), provenance
                )
            if position is not None:
                ordered = self._ordered_sections(contribution, store)
                if position < 0 or position >= len(ordered):
                    raise InvalidPosition(f"position {position} outside [0, {len(ordered) - 1}]")
                ordered.remove(section_id)
                ordered.insert(position, section_id)
                self._renumber(ordered, provenance)
        return self.get_article(article_id)

    def _replace_literal(self, subject: EntityId, pred: EntityId, value: str, provenance: Provenance) -> None:
        store = self.store
        for stmt in store.get_statements(subject=subject, predicate=pred):
            store.remove_statement(stmt.id, provenance)
        store.add_statement(subject, pred, store.intern_literal(value), provenance)

    def reorder_sections(
        self, article_id: EntityId, ordered_ids: list[EntityId], provenance: Provenance
    ) -> ArticleView:
        store = self.store
        self._require_article(article_id, store)
        contribution = self._contribution_of(article_id, store)
        current = self._ordered_sections(contribution, store)
        if sorted(ordered_ids) != sorted(current):
            raise InvalidPosition("reorder must permute exactly the article's sections")
        with store.lock():
            self._renumber(list(ordered_ids), provenance)
        return self.get_article(article_id)

    def delete_section(self, section_id: EntityId, provenance: Provenance) -> ArticleView:
        store = self.store
        article_id, contribution = self._article_of_section(section_id)
        with store.lock():
            for stmt in store.get_statements(predicate=vocab.HAS_SECTION, object=section_id):
                store.remove_statement(stmt.id, provenance)
            for stmt in store.get_statements(subject=section_id):
                store.remove_statement(stmt.id, provenance)
            remaining = self._ordered_sections(contribution, store)
            self._renumber(remaining, provenance)
        return self.get_article(article_id)

    # --- papers ----------------------------------------------------------------

    def create_paper(
        self,
        title: str,
        authors: list[str],
        publication_date: str,
        provenance: Provenance,
        key: str | None = None,
    ) -> PaperView:
        store = self.store
        with store.lock():
            paper = store.create_entity(
                EntityKind.RESOURCE,
                label=title,
                classes=[vocab.CLASS_PAPER],
                key=key,
                provenance=provenance,
            )
            store.add_statement(paper, vocab.HAS_TITLE, store.intern_literal(title), provenance)
            for author in authors:
                store.add_statement(paper, vocab.HAS_AUTHOR, store.intern_literal(author), provenance)
            if publication_date:
                store.add_statement(
                    paper, vocab.HAS_PUBLICATION_DATE, store.intern_literal(publication_date), provenance
                )
            contribution = store.create_entity(
                EntityKind.RESOURCE,
                label="Contribution 1",
                classes=[vocab.CLASS_CONTRIBUTION],
                provenance=provenance,
            )
            store.add_statement(paper, vocab.P31, contribution, provenance)
        return self.get_paper(paper)

    def get_paper(self, paper_id: EntityId, view=None) -> PaperView:
        view = view or self.store
        if not view.has_entity(paper_id):
            raise UnknownEntity(f"unknown paper {paper_id}")
        authors = [
            view.get_entity(s.object).literal_value or ""
            for s in view.get_statements(subject=paper_id, predicate=vocab.HAS_AUTHOR)
        ]
        return PaperView(
            id=paper_id,
            title=self._literal_of(view, paper_id, vocab.HAS_TITLE) or view.get_entity(paper_id).label,
            authors=authors,
            publication_date=self._literal_of(view, paper_id, vocab.HAS_PUBLICATION_DATE) or "",
            contributions=[s.object for s in view.get_statements(subject=paper_id, predicate=vocab.P31)],
        )

    # --- comparisons --------------------------------------------------------------

    def _require_comparison(self, comparison_id: EntityId, view=None) -> None:
        view = view or self.store
        if not view.has_entity(comparison_id) or vocab.CLASS_COMPARISON not in view.classes_of(comparison_id):
            raise DanglingReference(f"unknown comparison {comparison_id}")

    def create_comparison(
        self,
        paper_contrib_pairs: list[tuple[EntityId, EntityId]],
        properties: list[EntityId],
        cells: dict[tuple[EntityId, EntityId], list[EntityId]],
        provenance: Provenance,
        label: str = "Comparison",
    ) -> ComparisonView:
        store = self.store
        for paper, contrib in paper_contrib_pairs:
            for eid in (paper, contrib):
                if not store.has_entity(eid):
                    raise DanglingReference(f"unknown entity {eid}")
        seen: set[EntityId] = set()
        for prop in properties:
            if prop in seen:
                raise DuplicateProperty(f"property {prop} declared twice")
            seen.add(prop)
            if not store.has_entity(prop) or prop.kind is not EntityKind.PREDICATE:
                raise DanglingReference(f"unknown property {prop}")
        declared_contribs = {contrib for _, contrib in paper_contrib_pairs}
        for (contrib, prop), values in cells.items():
            if contrib not in declared_contribs or prop not in seen:
                raise DanglingReference(f"cell ({contrib}, {prop}) is not declared")
            for value in values:
                if not store.has_entity(value):
                    raise DanglingReference(f"unknown cell value {value}")
        with store.lock():
            comparison = store.create_entity(
                EntityKind.RESOURCE,
                label=label,
                classes=[vocab.CLASS_COMPARISON],
                provenance=provenance,
            )
            for index, (paper, contrib) in enumerate(paper_contrib_pairs):
                column = store.create_entity(
                    EntityKind.RESOURCE,
                    label=store.get_entity(paper).label,
                    classes=[vocab.CLASS_COMPARISON_COLUMN],
                    provenance=provenance,
                )
                store.add_statement(comparison, vocab.HAS_COLUMN, column, provenance)
                store.add_statement(
                    column, vocab.HAS_ORDER_INDEX, store.intern_literal(str(index), "xsd:integer"), provenance
                )
                store.add_statement(column, vocab.COLUMN_PAPER, paper, provenance)
                store.add_statement(column, vocab.COLUMN_CONTRIBUTION, contrib, provenance)
                if not store.get_statements(subject=paper, predicate=vocab.P31, object=contrib):
                    store.add_statement(paper, vocab.P31, contrib, provenance)
            for index, prop in enumerate(properties):
                row = store.create_entity(
                    EntityKind.RESOURCE,
                    label=store.get_entity(prop).label,
                    classes=[vocab.CLASS_COMPARISON_ROW],
                    provenance=provenance,
                )
                store.add_statement(comparison, vocab.HAS_ROW, row, provenance)
                store.add_statement(
                    row, vocab.HAS_ORDER_INDEX, store.intern_literal(str(index), "xsd:integer"), provenance
                )
                store.add_statement(row, vocab.ROW_PROPERTY, prop, provenance)
            for (contrib, prop), values in cells.items():
                for value in values:
                    store.add_statement(contrib, prop, value, provenance)
        return self.get_comparison(comparison)

    def get_comparison(self, comparison_id: EntityId, view=None) -> ComparisonView:
        view = view or self.store
        if not view.has_entity(comparison_id) or vocab.CLASS_COMPARISON not in view.classes_of(comparison_id):
            raise UnknownComparison(f"unknown comparison {comparison_id}")
        columns: list[tuple[int, int, EntityId, EntityId]] = []
        for stmt in view.get_statements(subject=comparison_id, predicate=vocab.HAS_COLUMN):
            column = stmt.object
            index_text = self._literal_of(view, column, vocab.HAS_ORDER_INDEX)
            paper_links = view.get_statements(subject=column, predicate=vocab.COLUMN_PAPER)
            contrib_links = view.get_statements(subject=column, predicate=vocab.COLUMN_CONTRIBUTION)
            if not paper_links or not contrib_links:
                continue
            columns.append(
                (int(index_text or 0), stmt.seq, paper_links[0].object, contrib_links[0].object)
            )
        columns.sort(key=lambda t: (t[0], t[1]))
        rows: list[tuple[int, int, EntityId]] = []
        for stmt in view.get_statements(subject=comparison_id, predicate=vocab.HAS_ROW):
            row = stmt.object
            index_text = self._literal_of(view, row, vocab.HAS_ORDER_INDEX)
            prop_links = view.get_statements(subject=row, predicate=vocab.ROW_PROPERTY)
            if not prop_links:
                continue
            rows.append((int(index_text or 0), stmt.seq, prop_links[0].object))
        rows.sort(key=lambda t: (t[0], t[1]))
        ordered_rows = [prop for _, _, prop in rows]
        cells: dict[tuple[EntityId, EntityId], list[EntityId]] = {}
        for _, _, paper, contrib in columns:
            for prop in ordered_rows:
                values = [s.object for s in view.get_statements(subject=contrib, predicate=prop)]
                cells[(contrib, prop)] = values
        return ComparisonView(
            id=comparison_id,
            label=view.get_entity(comparison_id).label,
            columns=[(paper, contrib) for _, _, paper, contrib in columns],
            rows=ordered_rows,
            cells=cells,
        )

    def set_cell(
        self,
        comparison_id: EntityId,
        contribution_id: EntityId,
        property_id: EntityId,
        values: list[EntityId],
        provenance: Provenance,
    ) -> ComparisonView:
        store = self.store
        if not store.has_entity(comparison_id) or vocab.CLASS_COMPARISON not in store.classes_of(comparison_id):
            raise UnknownComparison(f"unknown comparison {comparison_id}")
        current = self.get_comparison(comparison_id)
        declared_contribs = {contrib for _, contrib in current.columns}
        if contribution_id not in declared_contribs or property_id not in current.rows:
            raise UndeclaredRowOrColumn(
                f"cell ({contribution_id}, {property_id}) is not declared in {comparison_id}"
            )
        for value in values:
            if not store.has_entity(value):
                raise DanglingReference(f"unknown cell value {value}")
        with store.lock():
            for stmt in store.get_statements(subject=contribution_id, predicate=property_id):
                store.remove_statement(stmt.id, provenance)
            for value in values:
                store.add_statement(contribution_id, property_id, value, provenance)
        return self.get_comparison(comparison_id)

    # --- visualizations -------------------------------------------------------------

    def create_visualization(
        self,
        comparison_id: EntityId,
        chart_kind: str,
        series_property: EntityId | None,
        label: str,
        provenance: Provenance,
    ) -> VisualizationView:
        store = self.store
        self._require_comparison(comparison_id)
        if chart_kind not in vocab.CHART_KINDS:
            raise DanglingReference(f"unknown chart kind {chart_kind!r}")
        if chart_kind != "Table":
            comparison = self.get_comparison(comparison_id)
            if series_property is None or series_property not in comparison.rows:
                raise DanglingReference("series property must be a row of the comparison")
        with store.lock():
            viz = store.create_entity(
                EntityKind.RESOURCE,
                label=label or "Visualization",
                classes=[vocab.CLASS_VISUALIZATION],
                provenance=provenance,
            )
            store.add_statement(viz, vocab.OF_COMPARISON, comparison_id, provenance)
            store.add_statement(viz, vocab.HAS_CHART_KIND, store.intern_literal(chart_kind), provenance)
            if series_property is not None:
                store.add_statement(viz, vocab.HAS_SERIES_PROPERTY, series_property, provenance)
            store.add_statement(viz, vocab.HAS_LABEL, store.intern_literal(label), provenance)
        return self.get_visualization(viz)

    def get_visualization(self, viz_id: EntityId, view=None) -> VisualizationView:
        view = view or self.store
        if not view.has_entity(viz_id) or vocab.CLASS_VISUALIZATION not in view.classes_of(viz_id):
            raise UnknownEntity(f"unknown visualization {viz_id}")
        comparisons = view.get_statements(subject=viz_id, predicate=vocab.OF_COMPARISON)
        series = view.get_statements(subject=viz_id, predicate=vocab.HAS_SERIES_PROPERTY)
        return VisualizationView(
            id=viz_id,
            comparison_id=comparisons[0].object if comparisons else viz_id,
            chart_kind=self._literal_of(view, viz_id, vocab.HAS_CHART_KIND) or "Table",
            series_property=series[0].object if series else None,
            label=self._literal_of(view, viz_id, vocab.HAS_LABEL) or "",
        )

    # --- derived tables ----------------------------------------------------------------

    def build_ontology_table(
        self, comparison_ids: list[EntityId], view=None
    ) -> list[tuple[Entity, str, str | None]]:
        """One row per distinct property/resource used in the comparisons'
        cells and rows: (entity, description, external uri), label order."""
        view = view or self.store
        used: set[EntityId] = set()
        for comparison_id in comparison_ids:
            if not view.has_entity(comparison_id) or vocab.CLASS_COMPARISON not in view.classes_of(comparison_id):
                raise UnknownComparison(f"unknown comparison {comparison_id}")
            comparison = self.get_comparison(comparison_id, view)
            used.update(comparison.rows)
            for values in comparison.cells.values():
                used.update(v for v in values if v.kind is EntityKind.RESOURCE)
        rows = [self.describe_entity(eid, view) for eid in used]
        rows.sort(key=lambda r: (r[0].label, r[0].id.key))
        return rows

    def describe_entity(self, entity_id: EntityId, view=None) -> tuple[Entity, str, str | None]:
        view = view or self.store
        entity = view.get_entity(entity_id)
        description = self._literal_of(view, entity_id, vocab.HAS_DESCRIPTION) or ""
        external = self._literal_of(view, entity_id, vocab.SAME_AS)
        return entity, description, external

    def collect_used_entities(self, article_id: EntityId, view=None) -> tuple[list[Entity], list[Entity]]:
        """Distinct non-structural predicates and object resources in the
        article's subgraph, each list in deterministic label order."""
        view = view or self.store
        self._require_article(article_id, view)
        statements = self._subgraph(article_id, view)
        properties: set[EntityId] = set()
        resources: set[EntityId] = set()
        for stmt in statements:
            if stmt.predicate in vocab.STRUCTURAL_PREDICATES:
                continue
            properties.add(stmt.predicate)
            if stmt.object.kind is EntityKind.RESOURCE:
                resources.add(stmt.object)
        def ordered(ids: set[EntityId]) -> list[Entity]:
            entities = [view.get_entity(eid) for eid in ids]
            entities.sort(key=lambda e: (e.label, e.id.key))
            return entities
        return ordered(properties), ordered(resources)

    def _subgraph(self, article_id: EntityId, view):
        if view is self.store:
            return self.store.traverse_subgraph(article_id)
        return view.get_statements()
