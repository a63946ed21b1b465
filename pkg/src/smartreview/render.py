"""Accessible HTML rendering of article heads and published snapshots:
semantic sectioning, strict heading hierarchy, comparison and ontology
tables, numbered references and auto-generated acknowledgements."""

from __future__ import annotations

import html
import json
import re
from dataclasses import dataclass

from . import mdcite, vocab
from .articles import ArticleService, ArticleView, SectionView
from .errors import UnknownArticle, UnknownTarget
from .model import EntityId, EntityKind
from .store import GraphStore
from .versioning import VersionManager

WORDS_PER_MINUTE = 250

_STYLE = """
:root { color-scheme: light dark; }
body { font-family: Georgia, 'Times New Roman', serif; line-height: 1.6;
       max-width: 46rem; margin: 0 auto; padding: 0 1rem; }
nav[aria-label="Contents"] { border: 1px solid #8885; padding: 0.5rem 1rem; margin: 1rem 0; }
nav[aria-label="Contents"] ul { margin: 0.2rem 0; padding-left: 1.2rem; }
table { border-collapse: collapse; width: 100%; overflow-x: auto; display: block; }
th, td { border: 1px solid #8886; padding: 0.3rem 0.5rem; text-align: left; vertical-align: top; }
thead th { background: #8882; }
figure { margin: 1rem 0; }
code { font-family: ui-monospace, monospace; background: #8882; padding: 0 0.2rem; }
pre { background: #8882; padding: 0.6rem; overflow-x: auto; }
blockquote { border-left: 3px solid #888; margin-left: 0; padding-left: 1rem; }
header .meta { color: #555; font-size: 0.9rem; }
@media (max-width: 40rem) { body { padding: 0 0.5rem; } }
""".strip()


@dataclass
class RenderedArticle:
    html: str
    outline: list[tuple[str, str]]
    reading_time_minutes: int
    contributors: list[str]


class Renderer:
    def __init__(self, store: GraphStore, articles: ArticleService, versions: VersionManager):
        self.store = store
        self.articles = articles
        self.versions = versions

    # --- public operations ----------------------------------------------------

    def render_article(self, article_id: EntityId) -> RenderedArticle:
        try:
            article = self.articles.get_article(article_id)
        except UnknownArticle:
            raise UnknownTarget(f"unknown article {article_id}") from None
        contributors = self.acknowledgements(article_id)
        return self._render(article, self.store, contributors, version_note=None)

    def render_version(self, article_id: EntityId, version_id: int) -> RenderedArticle:
        version = self.versions.get_version(article_id, version_id)
        view = version.view()
        article = self.articles.get_article(article_id, view)
        contributors = _contributors_of(version.statements)
        ts = version.timestamp.strftime("%Y-%m-%d")
        note = f"Version {version.version_id} ({ts}): {version.description}"
        return self._render(article, view, contributors, version_note=note)

    def acknowledgements(self, article_id: EntityId, version_id: int | None = None) -> list[str]:
        """Everyone involved in writing the article, ordered by first
        contribution; derived purely from subgraph provenance."""
        if version_id is not None:
            version = self.versions.get_version(article_id, version_id)
            return _contributors_of(version.statements)
        if not self.store.has_entity(article_id) or vocab.CLASS_SMARTREVIEW not in self.store.classes_of(article_id):
            raise UnknownTarget(f"unknown article {article_id}")
        return _contributors_of(self.store.traverse_subgraph(article_id))

    def reading_time(self, article_id: EntityId, view=None) -> int:
        try:
            article = self.articles.get_article(article_id, view)
        except UnknownArticle:
            raise UnknownTarget(f"unknown article {article_id}") from None
        total = sum(
            mdcite.count_words(mdcite.parse(s.markdown or ""))
            for s in article.sections
            if s.kind == "text"
        )
        return mdcite.reading_minutes(total, WORDS_PER_MINUTE)

    # --- document assembly ------------------------------------------------------

    def _render(self, article: ArticleView, view, contributors: list[str], version_note: str | None) -> RenderedArticle:
        numbering, references = self._citation_index(article, view)

        def resolver(key: str):
            entry = numbering.get(key)
            if entry is None:
                return None
            return entry

        outline: list[tuple[str, str]] = []
        body_parts: list[str] = []
        for section in article.sections:
            anchor = f"section-{section.id.key}"
            heading = section.heading or "Untitled section"
            outline.append((heading, anchor))
            body_parts.append(self._section_html(article, section, view, anchor, resolver))
        outline.append(("References", "references"))
        outline.append(("Acknowledgements", "acknowledgements"))

        reading = self._reading_time_for(article)
        field_label = ""
        if article.research_field is not None and view.has_entity(article.research_field):
            field_label = view.get_entity(article.research_field).label

        nav_items = "".join(
            f'<li><a href="#{anchor}">{html.escape(label)}</a></li>' for label, anchor in outline
        )
        refs_html = "".join(
            f'<li id="ref-{html.escape(key, quote=True)}">{html.escape(text)}</li>'
            for key, text in references
        )
        contributors_html = "".join(f"<li>{html.escape(u)}</li>" for u in contributors)
        meta_bits = [f"Research field: {html.escape(field_label)}" if field_label else ""]
        meta_bits.append(f"Reading time: {reading} min")
        if version_note:
            meta_bits.append(html.escape(version_note))
        meta_line = " · ".join(bit for bit in meta_bits if bit)

        metadata = {
            "title": article.title,
            "article": article.id.key,
            "researchField": article.research_field.key if article.research_field else None,
            "readingTimeMinutes": reading,
            "contributors": contributors,
            "sections": [
                {"key": s.id.key, "heading": s.heading, "kind": s.kind} for s in article.sections
            ],
        }

        doc = f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8" />
<meta name="viewport" content="width=device-width, initial-scale=1" />
<title>{html.escape(article.title)}</title>
<style>
{_STYLE}
</style>
<script type="application/json" id="article-metadata">{_json_for_html(metadata)}</script>
</head>
<body>
<header>
<h1>{html.escape(article.title)}</h1>
<p class="meta">{meta_line}</p>
</header>
<nav aria-label="Contents">
<ul>{nav_items}</ul>
</nav>
<main>
{chr(10).join(body_parts)}
<section id="references" aria-label="References">
<h2>References</h2>
<ol class="references">{refs_html}</ol>
</section>
<section id="acknowledgements" aria-label="Acknowledgements">
<h2>Acknowledgements</h2>
<p>This article was written by the following contributors.</p>
<ul class="contributors">{contributors_html}</ul>
</section>
</main>
</body>
</html>
"""
        doc = _normalize_heading_levels(doc)
        return RenderedArticle(
            html=doc,
            outline=outline,
            reading_time_minutes=reading,
            contributors=contributors,
        )

    def _reading_time_for(self, article: ArticleView) -> int:
        total = sum(
            mdcite.count_words(mdcite.parse(s.markdown or ""))
            for s in article.sections
            if s.kind == "text"
        )
        return mdcite.reading_minutes(total, WORDS_PER_MINUTE)

    def _citation_index(self, article: ArticleView, view):
        """Global first-appearance numbering across sections in order."""
        keys: list[str] = []
        seen: set[str] = set()
        for section in article.sections:
            if section.kind != "text":
                continue
            for key in mdcite.extract_citations(mdcite.parse(section.markdown or "")):
                if key not in seen:
                    seen.add(key)
                    keys.append(key)
        numbering: dict[str, tuple[int, object]] = {}
        references: list[tuple[str, str]] = []
        number = 0
        for key in keys:
            paper_id = EntityId(EntityKind.RESOURCE, key)
            if not view.has_entity(paper_id) or vocab.CLASS_PAPER not in _classes(view, paper_id):
                continue
            paper = self.articles.get_paper(paper_id, view)
            number += 1
            numbering[key] = (number, paper)
            line = ". ".join(
                part
                for part in (", ".join(paper.authors), paper.title, paper.publication_date)
                if part
            )
            references.append((key, f"{line}."))
        return numbering, references

    # --- section rendering ----------------------------------------------------------

    def _section_html(self, article: ArticleView, section: SectionView, view, anchor: str, resolver) -> str:
        heading = html.escape(section.heading or "Untitled section")
        inner = ""
        if section.kind == "text":
            ast = mdcite.parse(section.markdown or "")
            inner = mdcite.emit_html(ast, resolver, heading_offset=1)
        elif section.kind == "comparison" and section.comparison_id is not None:
            inner = self._comparison_table(section.comparison_id, view, section.heading, "comparison")
        elif section.kind == "visualization" and section.visualization_id is not None:
            inner = self._visualization_figure(section.visualization_id, view)
        elif section.kind == "ontology-table":
            inner = self._ontology_table(article, section, view)
        elif section.kind == "entity-table":
            inner = self._entity_table(article, section, view)
        return f'<section id="{anchor}">\n<h2>{heading}</h2>\n{inner}\n</section>'

    def _comparison_table(self, comparison_id: EntityId, view, caption: str, css_class: str) -> str:
        comparison = self.articles.get_comparison(comparison_id, view)
        head_cells = "".join(
            f'<th scope="col">{html.escape(view.get_entity(paper).label)}</th>'
            for paper, _ in comparison.columns
        )
        rows_html = []
        for prop in comparison.rows:
            label = html.escape(view.get_entity(prop).label)
            cells = []
            for _, contrib in comparison.columns:
                values = comparison.cells.get((contrib, prop), [])
                cells.append(f"<td>{html.escape(self._values_text(values, view))}</td>")
            rows_html.append(f'<tr><th scope="row">{label}</th>{"".join(cells)}</tr>')
        return (
            f'<table class="{css_class}">'
            f"<caption>{html.escape(caption)}</caption>"
            f'<thead><tr><th scope="col">Property</th>{head_cells}</tr></thead>'
            f'<tbody>{"".join(rows_html)}</tbody></table>'
        )

    def _values_text(self, values: list[EntityId], view) -> str:
        parts = []
        for value in values:
            entity = view.get_entity(value)
            if entity.kind is EntityKind.LITERAL:
                parts.append(entity.literal_value or "")
            else:
                parts.append(entity.label)
        return "; ".join(parts)

    def _visualization_figure(self, viz_id: EntityId, view) -> str:
        viz = self.articles.get_visualization(viz_id, view)
        comparison = self.articles.get_comparison(viz.comparison_id, view)
        label = viz.label or "Visualization"
        if viz.chart_kind == "Table" or viz.series_property is None:
            table = self._comparison_table(viz.comparison_id, view, label, "visualization-data")
            series = []
        else:
            prop = viz.series_property
            rows = []
            series = []
            for paper, contrib in comparison.columns:
                value = self._values_text(comparison.cells.get((contrib, prop), []), view)
                series.append({"paper": view.get_entity(paper).label, "value": value})
                rows.append(
                    f'<tr><th scope="row">{html.escape(view.get_entity(paper).label)}</th>'
                    f"<td>{html.escape(value)}</td></tr>"
                )
            prop_label = html.escape(view.get_entity(prop).label)
            table = (
                '<table class="visualization-data">'
                f"<caption>{html.escape(label)}</caption>"
                f'<thead><tr><th scope="col">Paper</th><th scope="col">{prop_label}</th></tr></thead>'
                f'<tbody>{"".join(rows)}</tbody></table>'
            )
        spec = {
            "chartKind": viz.chart_kind,
            "comparison": viz.comparison_id.key,
            "seriesProperty": viz.series_property.key if viz.series_property else None,
            "label": label,
            "series": series,
        }
        return (
            f'<figure class="visualization" role="img" aria-label="{html.escape(label, quote=True)}">'
            f"<figcaption>{html.escape(label)}</figcaption>"
            f"{table}"
            f'<script type="application/json" class="visualization-spec">{_json_for_html(spec)}</script>'
            f"</figure>"
        )

    def _ontology_table(self, article: ArticleView, section: SectionView, view) -> str:
        if section.entity_ids:
            rows = [self.articles.describe_entity(eid, view) for eid in section.entity_ids]
            rows.sort(key=lambda r: (r[0].label, r[0].id.key))
        else:
            comparison_ids = [
                s.comparison_id for s in article.sections if s.kind == "comparison" and s.comparison_id
            ]
            rows = self.articles.build_ontology_table(comparison_ids, view)
        body = []
        for entity, description, external in rows:
            uri_cell = (
                f'<a href="{html.escape(external, quote=True)}">{html.escape(external)}</a>'
                if external
                else ""
            )
            body.append(
                f'<tr><th scope="row">{html.escape(entity.label)}</th>'
                f"<td>{html.escape(description)}</td><td>{uri_cell}</td></tr>"
            )
        return (
            '<table class="ontology-table">'
            "<thead><tr>"
            '<th scope="col">Term</th><th scope="col">Description</th><th scope="col">Ontology link</th>'
            "</tr></thead>"
            f'<tbody>{"".join(body)}</tbody></table>'
        )

    def _entity_table(self, article: ArticleView, section: SectionView, view) -> str:
        kind = section.table_kind or "Resources"
        if section.entity_ids:
            entities = [view.get_entity(eid) for eid in section.entity_ids]
            entities.sort(key=lambda e: (e.label, e.id.key))
        else:
            properties, resources = self.articles.collect_used_entities(article.id, view)
            entities = properties if kind == "Properties" else resources
        body = []
        for entity in entities:
            _, description, _ = self.articles.describe_entity(entity.id, view)
            body.append(
                f'<tr><th scope="row">{html.escape(entity.label)}</th>'
                f"<td>{html.escape(entity.id.key)}</td><td>{html.escape(description)}</td></tr>"
            )
        return (
            f'<table class="entity-table" data-kind="{html.escape(kind, quote=True)}">'
            "<thead><tr>"
            f'<th scope="col">{html.escape(kind[:-1])}</th><th scope="col">Identifier</th>'
            '<th scope="col">Description</th>'
            "</tr></thead>"
            f'<tbody>{"".join(body)}</tbody></table>'
        )


# --- helpers -----------------------------------------------------------------------


def _classes(view, entity_id: EntityId) -> set[EntityId]:
    return {
        s.object for s in view.get_statements(subject=entity_id, predicate=vocab.TYPE_PREDICATE)
    }


def _contributors_of(statements) -> list[str]:
    first_seen: dict[str, object] = {}
    for stmt in statements:
        user = stmt.provenance.user_id
        ts = stmt.provenance.timestamp
        if user not in first_seen or ts < first_seen[user]:
            first_seen[user] = ts
    return [u for u, _ in sorted(first_seen.items(), key=lambda kv: (kv[1], kv[0]))]


def _json_for_html(payload) -> str:
    text = json.dumps(payload, ensure_ascii=False)
    return text.replace("&", "\\u0026").replace("<", "\\u003c").replace(">", "\\u003e")


_HEADING_RE = re.compile(r"<h([1-6])((?:[^>])*)>(.*?)</h\1>", re.DOTALL)


def _normalize_heading_levels(doc: str) -> str:
    """Rewrite heading tags so levels never skip downward: each heading is
    at most one level deeper than the previous one, siblings stay equal."""
    mapping: dict[int, int] = {}
    state = {"prev_in": 0, "prev_out": 0}

    def rewrite(match: re.Match) -> str:
        level_in = int(match.group(1))
        if state["prev_in"] == 0:
            out = 1 if level_in == 1 else min(level_in, 2)
        elif level_in > state["prev_in"]:
            out = state["prev_out"] + 1
        elif level_in == state["prev_in"]:
            out = state["prev_out"]
        else:
            out = mapping.get(level_in, min(level_in, state["prev_out"]))
        out = max(1, min(out, 6))
        mapping[level_in] = out
        for deeper in [k for k in mapping if k > level_in]:
            del mapping[deeper]
        state["prev_in"], state["prev_out"] = level_in, out
        return f"<h{out}{match.group(2)}>{match.group(3)}</h{out}>"

    return _HEADING_RE.sub(rewrite, doc)
