"""Seeding of the shipped example review from its document file."""

from __future__ import annotations

from importlib import resources as importlib_resources

from . import docformat, vocab
from .articles import ArticleService
from .model import EntityId, EntityKind, Provenance, utc_now

FIXTURE_ARTICLE_KEY = "R135360"
FIXTURE_FILE = "fixture_scholarly_knowledge_graphs.txt"


def fixture_text() -> str:
    return (
        importlib_resources.files("smartreview.data").joinpath(FIXTURE_FILE).read_text("utf-8")
    )


def query_text(name: str) -> str:
    return (
        importlib_resources.files("smartreview.data.queries").joinpath(f"{name}.rq").read_text("utf-8")
    )


QUERY_NAMES = (
    "reviews_by_research_field",
    "papers_by_research_problem",
    "introduction_sections",
    "papers_with_rdf_support",
)


def seed_fixture(articles: ArticleService, user: str = "system") -> tuple[EntityId, bool]:
    """Load the example review; a second run is a no-op. Returns
    (article id, whether anything was created)."""
    store = articles.store
    article_id = EntityId(EntityKind.RESOURCE, FIXTURE_ARTICLE_KEY)
    if store.has_entity(article_id) and vocab.CLASS_SMARTREVIEW in store.classes_of(article_id):
        return article_id, False
    provenance = Provenance(user_id=user, timestamp=utc_now())
    store.register_principal(user)
    imported = docformat.import_document(fixture_text(), articles, provenance)
    return imported, True
