"""Publish-time snapshots, version listing and diffs.

Only the head version of an article is ever mutable; publishing freezes a
value copy of the article subgraph (statements plus the entities they
mention) so later edits, label changes or removals cannot reach it.
"""

from __future__ import annotations

import copy
import difflib
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from . import rdfio, vocab
from .articles import ArticleService
from .errors import EmptyArticle, UnknownArticle, UnknownVersion
from .model import Entity, EntityId, EntityKind, Provenance, Statement
from .store import GraphStore


@dataclass(frozen=True)
class PublishedVersion:
    article_id: EntityId
    version_id: int
    timestamp: datetime
    description: str
    statements: frozenset[Statement]
    entities: dict[EntityId, Entity] = field(compare=False, repr=False)

    def view(self) -> "SnapshotView":
        return SnapshotView(self)


class SnapshotView:
    """Read-only graph view over one frozen version; interchangeable with
    the live store for rendering, export and queries."""

    def __init__(self, version: PublishedVersion):
        self._version = version
        self._statements = sorted(version.statements, key=lambda s: s.seq)

    def get_statements(self, subject=None, predicate=None, object=None):
        out = []
        for stmt in self._statements:
            if subject is not None and stmt.subject != subject:
                continue
            if predicate is not None and stmt.predicate != predicate:
                continue
            if object is not None and stmt.object != object:
                continue
            out.append(stmt)
        return out

    def get_entity(self, entity_id: EntityId) -> Entity:
        try:
            return self._version.entities[entity_id]
        except KeyError:
            from .errors import UnknownEntity

            raise UnknownEntity(f"entity {entity_id} is not part of this snapshot") from None

    def has_entity(self, entity_id: EntityId) -> bool:
        return entity_id in self._version.entities

    def classes_of(self, entity_id: EntityId) -> set[EntityId]:
        return {
            s.object
            for s in self.get_statements(subject=entity_id, predicate=vocab.TYPE_PREDICATE)
        }


@dataclass
class VersionDiff:
    added: list[Statement]
    removed: list[Statement]
    text_diffs: dict[str, list[str]]

    @property
    def empty(self) -> bool:
        return not self.added and not self.removed and not self.text_diffs


def content_key(stmt: Statement, view) -> tuple:
    """Statement value identity: ids and provenance do not count, literal
    objects compare by (value, datatype)."""
    if stmt.object.kind is EntityKind.LITERAL:
        entity = view.get_entity(stmt.object)
        obj_key = ("lit", entity.literal_value or "", entity.datatype or "")
    else:
        obj_key = ("ent", str(stmt.object), "")
    return (str(stmt.subject), str(stmt.predicate), obj_key)


class VersionManager:
    def __init__(
        self,
        store: GraphStore,
        articles: ArticleService,
        data_dir: str | Path | None = None,
        mapping: rdfio.UriMapping | None = None,
    ):
        self.store = store
        self.articles = articles
        self.mapping = mapping or rdfio.UriMapping()
        self._versions: dict[EntityId, list[PublishedVersion]] = {}
        self._dir = Path(data_dir) / "versions" if data_dir is not None else None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load()

    # --- publishing -----------------------------------------------------------

    def publish(self, article_id: EntityId, description: str, provenance: Provenance) -> PublishedVersion:
        store = self.store
        with store.lock():
            if not store.has_entity(article_id) or vocab.CLASS_SMARTREVIEW not in store.classes_of(article_id):
                raise UnknownArticle(f"unknown article {article_id}")
            article = self.articles.get_article(article_id)
            if not article.sections:
                raise EmptyArticle(f"article {article_id} has no sections to publish")
            statements = frozenset(store.traverse_subgraph(article_id))
            entities: dict[EntityId, Entity] = {}
            for stmt in statements:
                for eid in (stmt.subject, stmt.predicate, stmt.object):
                    if eid not in entities:
                        entities[eid] = copy.deepcopy(store.get_entity(eid))
            existing = self._versions.setdefault(article_id, [])
            version = PublishedVersion(
                article_id=article_id,
                version_id=existing[-1].version_id + 1 if existing else 1,
                timestamp=provenance.timestamp,
                description=description,
                statements=statements,
                entities=entities,
            )
            existing.append(version)
            self._persist(version)
            return version

    def list_versions(self, article_id: EntityId) -> list[tuple[int, datetime, str, int]]:
        if not self.store.has_entity(article_id) or vocab.CLASS_SMARTREVIEW not in self.store.classes_of(article_id):
            raise UnknownArticle(f"unknown article {article_id}")
        out = []
        for version in self._versions.get(article_id, []):
            editors = {s.provenance.user_id for s in version.statements}
            out.append((version.version_id, version.timestamp, version.description, len(editors)))
        return out

    def get_version(self, article_id: EntityId, version_id: int) -> PublishedVersion:
        for version in self._versions.get(article_id, []):
            if version.version_id == version_id:
                return version
        raise UnknownVersion(f"article {article_id} has no version {version_id}")

    # --- diffing ----------------------------------------------------------------

    def diff(self, article_id: EntityId, from_version: int, to_version: int | None = None) -> VersionDiff:
        """Statement and prose differences between two versions; ``None``
        as the target means the live head."""
        from_v = self.get_version(article_id, from_version)
        from_view = from_v.view()
        from_stmts = list(from_v.statements)
        if to_version is None:
            to_view = self.store
            to_stmts = list(self.store.traverse_subgraph(article_id))
        else:
            to_v = self.get_version(article_id, to_version)
            to_view = to_v.view()
            to_stmts = list(to_v.statements)

        from_keys = {content_key(s, from_view): s for s in from_stmts}
        to_keys = {content_key(s, to_view): s for s in to_stmts}
        added = [to_keys[k] for k in sorted(to_keys.keys() - from_keys.keys())]
        removed = [from_keys[k] for k in sorted(from_keys.keys() - to_keys.keys())]

        text_diffs: dict[str, list[str]] = {}
        from_sections = self._text_sections(article_id, from_view)
        to_sections = self._text_sections(article_id, to_view)
        for section_id in sorted(from_sections.keys() & to_sections.keys()):
            before, after = from_sections[section_id], to_sections[section_id]
            if before == after:
                continue
            hunks = list(
                difflib.unified_diff(
                    before.splitlines(), after.splitlines(), lineterm="", n=2
                )
            )[2:]  # drop the ---/+++ file header, section ids carry identity
            text_diffs[section_id] = hunks
        return VersionDiff(added=added, removed=removed, text_diffs=text_diffs)

    def _text_sections(self, article_id: EntityId, view) -> dict[str, str]:
        try:
            article = self.articles.get_article(article_id, view)
        except UnknownArticle:
            return {}
        return {
            s.id.key: s.markdown or ""
            for s in article.sections
            if s.kind == "text"
        }

    # --- persistence ---------------------------------------------------------------

    def _persist(self, version: PublishedVersion) -> None:
        if self._dir is None:
            return
        article_dir = self._dir / version.article_id.key
        article_dir.mkdir(parents=True, exist_ok=True)
        view = version.view()
        nt = rdfio.export_ntriples(sorted(version.statements, key=lambda s: s.seq), view, self.mapping)
        (article_dir / f"v{version.version_id}.nt").write_text(nt, encoding="utf-8")
        meta = {
            "articleKey": version.article_id.key,
            "versionId": version.version_id,
            "timestamp": Provenance(user_id="system", timestamp=version.timestamp).isoformat(),
            "description": version.description,
            "statements": [
                {
                    "id": s.id,
                    "seq": s.seq,
                    "subject": str(s.subject),
                    "predicate": str(s.predicate),
                    "object": str(s.object),
                    "userId": s.provenance.user_id,
                    "at": s.provenance.isoformat(),
                }
                for s in sorted(version.statements, key=lambda s: s.seq)
            ],
            "entities": [
                {
                    "id": str(e.id),
                    "label": e.label,
                    "value": e.literal_value,
                    "datatype": e.datatype,
                    "shared": e.shared_vocabulary,
                    "vocab": e.external_vocab,
                }
                for e in sorted(version.entities.values(), key=lambda e: str(e.id))
            ],
        }
        (article_dir / f"v{version.version_id}.json").write_text(
            json.dumps(meta, ensure_ascii=False, indent=1), encoding="utf-8"
        )

    def _load(self) -> None:
        assert self._dir is not None
        for meta_path in sorted(self._dir.glob("*/v*.json")):
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            article_id = EntityId(EntityKind.RESOURCE, meta["articleKey"])
            entities = {}
            for record in meta["entities"]:
                eid = EntityId.parse(record["id"])
                entities[eid] = Entity(
                    id=eid,
                    label=record.get("label", ""),
                    literal_value=record.get("value"),
                    datatype=record.get("datatype"),
                    shared_vocabulary=record.get("shared", False),
                    external_vocab=record.get("vocab"),
                )
            statements = set()
            for record in meta["statements"]:
                statements.add(
                    Statement(
                        id=record["id"],
                        seq=record["seq"],
                        subject=EntityId.parse(record["subject"]),
                        predicate=EntityId.parse(record["predicate"]),
                        object=EntityId.parse(record["object"]),
                        provenance=Provenance(
                            user_id=record["userId"],
                            timestamp=Provenance.parse_timestamp(record["at"]),
                        ),
                    )
                )
            version = PublishedVersion(
                article_id=article_id,
                version_id=meta["versionId"],
                timestamp=Provenance.parse_timestamp(meta["timestamp"]),
                description=meta["description"],
                statements=frozenset(statements),
                entities=entities,
            )
            self._versions.setdefault(article_id, []).append(version)
        for versions in self._versions.values():
            versions.sort(key=lambda v: v.version_id)
