"""Embedded statement store: every entity and every provenance-stamped
statement lives here, guarded by a single-writer lock and persisted as an
append-only event log."""

from __future__ import annotations

import json
import re
import threading
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator

from . import vocab
from .errors import (
    DuplicateKey,
    InvalidKind,
    InvalidSubjectKind,
    UnknownEntity,
    UnknownPrincipal,
    UnknownStatement,
)
from .model import Entity, EntityId, EntityKind, Provenance, Statement, Tombstone

_KIND_PREFIX = {
    EntityKind.RESOURCE: "R",
    EntityKind.PREDICATE: "P",
    EntityKind.CLASS: "C",
    EntityKind.LITERAL: "L",
}

_AUTO_KEY_START = 100000
_NUMERIC_KEY_RE = re.compile(r"^[RPCL](\d+)$")
_STMT_ID_RE = re.compile(r"^S(\d+)$")

# Principals that exist in every store so system-level writes (vocabulary
# loading, RDF import) always carry resolvable provenance.
BUILTIN_PRINCIPALS = ("system", "import")


class GraphStore:
    """Single source of truth for entities and statements.

    All mutations are serialized through one re-entrant writer lock; reads
    see a consistent head graph. When ``data_dir`` is given, entity
    definitions and statement events are appended to disk and replayed on
    startup.
    """

    def __init__(self, data_dir: str | Path | None = None):
        self._entities: dict[EntityId, Entity] = {}
        self._statements: dict[str, Statement] = {}
        self._by_subject: dict[EntityId, list[str]] = defaultdict(list)
        self._by_predicate: dict[EntityId, list[str]] = defaultdict(list)
        self._by_object: dict[EntityId, list[str]] = defaultdict(list)
        self._literal_index: dict[tuple[str, str | None], EntityId] = {}
        self._tombstones: list[Tombstone] = []
        self._principals: set[str] = set(BUILTIN_PRINCIPALS)
        self._counters: dict[EntityKind, int] = {k: _AUTO_KEY_START for k in EntityKind}
        self._stmt_seq = _AUTO_KEY_START
        self._event_count = 0
        self._lock = threading.RLock()

        self._data_dir = Path(data_dir) if data_dir is not None else None
        self._entities_path = self._data_dir / "entities.jsonl" if self._data_dir else None
        self._log_path = self._data_dir / "statements.log" if self._data_dir else None

        self._replaying = True
        self._load_vocabulary()
        if self._data_dir is not None:
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._replay()
        self._replaying = False

    # --- locking ----------------------------------------------------------

    def lock(self):
        """Writer lock; versioning takes it to get an atomic snapshot cut."""
        return self._lock

    # --- principals --------------------------------------------------------

    def register_principal(self, user_id: str) -> None:
        with self._lock:
            self._principals.add(user_id)

    def principal_registered(self, user_id: str) -> bool:
        return user_id in self._principals

    # --- entities ----------------------------------------------------------

    def create_entity(
        self,
        kind: EntityKind,
        label: str = "",
        classes: Iterable[EntityId] | None = None,
        literal_value: str | None = None,
        datatype: str | None = None,
        key: str | None = None,
        provenance: Provenance | None = None,
        shared_vocabulary: bool = False,
        external_vocab: str | None = None,
    ) -> EntityId:
        kind = EntityKind(kind)
        class_list = list(classes) if classes else []
        if kind is EntityKind.LITERAL:
            if literal_value is None:
                raise InvalidKind("a literal entity requires a literal value")
            if class_list:
                raise InvalidKind("literals cannot carry classes")
        else:
            if literal_value is not None or datatype is not None:
                raise InvalidKind(f"literal fields are not allowed on kind {kind.value}")
            if not label:
                raise InvalidKind(f"a {kind.value} entity requires a non-empty label")
        if class_list and kind is not EntityKind.RESOURCE:
            raise InvalidKind("class membership applies to resources only")
        for cls in class_list:
            if cls.kind is not EntityKind.CLASS:
                raise InvalidKind(f"class membership must reference Class entities, got {cls}")
            if cls not in self._entities:
                raise UnknownEntity(f"unknown class {cls}")

        with self._lock:
            if key is not None:
                entity_id = EntityId(kind, key)
                if entity_id in self._entities:
                    raise DuplicateKey(f"key already taken: {entity_id}")
            else:
                entity_id = EntityId(kind, self._next_key(kind))
            entity = Entity(
                id=entity_id,
                label=label,
                literal_value=literal_value,
                datatype=datatype,
                shared_vocabulary=shared_vocabulary,
                external_vocab=external_vocab,
            )
            self._entities[entity_id] = entity
            if kind is EntityKind.LITERAL:
                self._literal_index.setdefault(entity.literal_key(), entity_id)
            self._persist_entity(entity)
            for cls in class_list:
                self.add_statement(entity_id, vocab.TYPE_PREDICATE, cls, provenance or _system_provenance())
            return entity_id

    def intern_literal(self, value: str, datatype: str | None = None) -> EntityId:
        """Return the literal entity with this value identity, creating it
        on first use. Interned literals keep diffs and dumps canonical."""
        with self._lock:
            existing = self._literal_index.get((value, datatype))
            if existing is not None:
                return existing
            return self.create_entity(EntityKind.LITERAL, literal_value=value, datatype=datatype)

    def get_entity(self, entity_id: EntityId) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"unknown entity {entity_id}") from None

    def has_entity(self, entity_id: EntityId) -> bool:
        return entity_id in self._entities

    def entities(self) -> Iterator[Entity]:
        return iter(list(self._entities.values()))

    def classes_of(self, entity_id: EntityId) -> set[EntityId]:
        return {s.object for s in self.get_statements(subject=entity_id, predicate=vocab.TYPE_PREDICATE)}

    def find_by_label(self, kind: EntityKind, label: str) -> EntityId | None:
        """First entity of ``kind`` with exactly this label, by key order."""
        hits = [e.id for e in self._entities.values() if e.kind is kind and e.label == label]
        return min(hits) if hits else None

    def update_label(self, entity_id: EntityId, label: str) -> None:
        with self._lock:
            entity = self.get_entity(entity_id)
            entity.label = label
            self._persist_entity(entity)

    # --- statements ---------------------------------------------------------

    def add_statement(
        self,
        subject: EntityId,
        predicate: EntityId,
        obj: EntityId,
        provenance: Provenance,
    ) -> Statement:
        for eid in (subject, predicate, obj):
            if eid not in self._entities:
                raise UnknownEntity(f"unknown entity {eid}")
        if subject.kind is EntityKind.LITERAL:
            raise InvalidSubjectKind(f"statement subject cannot be a literal: {subject}")
        if predicate.kind is not EntityKind.PREDICATE:
            raise InvalidKind(f"statement predicate must be a Predicate entity: {predicate}")
        if predicate == vocab.TYPE_PREDICATE and obj.kind is not EntityKind.CLASS:
            raise InvalidKind("type statements must point at a Class entity")
        if not self.principal_registered(provenance.user_id):
            raise UnknownPrincipal(f"unregistered user: {provenance.user_id}")
        with self._lock:
            seq = self._stmt_seq
            self._stmt_seq += 1
            stmt = Statement(
                id=f"S{seq}",
                seq=seq,
                subject=subject,
                predicate=predicate,
                object=obj,
                provenance=provenance,
            )
            self._index_statement(stmt)
            self._persist_event("add", stmt, provenance)
            return stmt

    def remove_statement(self, statement_id: str, provenance: Provenance) -> Statement:
        if not self.principal_registered(provenance.user_id):
            raise UnknownPrincipal(f"unregistered user: {provenance.user_id}")
        with self._lock:
            stmt = self._statements.get(statement_id)
            if stmt is None:
                raise UnknownStatement(f"unknown statement {statement_id}")
            self._unindex_statement(stmt)
            self._tombstones.append(Tombstone(statement=stmt, removed_by=provenance))
            self._persist_event("remove", stmt, provenance)
            return stmt

    def get_statement(self, statement_id: str) -> Statement:
        stmt = self._statements.get(statement_id)
        if stmt is None:
            raise UnknownStatement(f"unknown statement {statement_id}")
        return stmt

    def get_statements(
        self,
        subject: EntityId | None = None,
        predicate: EntityId | None = None,
        object: EntityId | None = None,
    ) -> list[Statement]:
        candidate_ids: Iterable[str]
        if subject is not None:
            candidate_ids = self._by_subject.get(subject, [])
        elif predicate is not None:
            candidate_ids = self._by_predicate.get(predicate, [])
        elif object is not None:
            candidate_ids = self._by_object.get(object, [])
        else:
            candidate_ids = list(self._statements.keys())
        out = []
        for sid in candidate_ids:
            stmt = self._statements.get(sid)
            if stmt is None:
                continue
            if subject is not None and stmt.subject != subject:
                continue
            if predicate is not None and stmt.predicate != predicate:
                continue
            if object is not None and stmt.object != object:
                continue
            out.append(stmt)
        out.sort(key=lambda s: s.seq)
        return out

    def head_statements(self) -> list[Statement]:
        return self.get_statements()

    def tombstones(self) -> list[Tombstone]:
        return list(self._tombstones)

    @property
    def log_length(self) -> int:
        """Number of add/remove events recorded (grows on every mutation)."""
        return self._event_count

    # --- traversal -----------------------------------------------------------

    def traverse_subgraph(self, root: EntityId) -> set[Statement]:
        """Breadth-first closure over outgoing statements starting at root.

        Predicate and Class nodes and shared-vocabulary entities are
        referenced but never expanded, so articles do not absorb the
        common vocabulary or each other's metadata.
        """
        if root not in self._entities:
            raise UnknownEntity(f"unknown entity {root}")
        seen_nodes: set[EntityId] = {root}
        result: set[Statement] = set()
        frontier = [root]
        while frontier:
            node = frontier.pop(0)
            for stmt in self.get_statements(subject=node):
                result.add(stmt)
                target = stmt.object
                if target in seen_nodes:
                    continue
                seen_nodes.add(target)
                if target.kind in (EntityKind.PREDICATE, EntityKind.CLASS, EntityKind.LITERAL):
                    continue
                entity = self._entities.get(target)
                if entity is not None and entity.shared_vocabulary:
                    continue
                frontier.append(target)
        return result

    # --- suggestions -----------------------------------------------------------

    def suggest_entities(self, kind: EntityKind, label_query: str, limit: int = 10) -> list[Entity]:
        """Case-insensitive label search ranked exact > prefix > substring."""
        kind = EntityKind(kind)
        if not label_query:
            raise ValueError("label query must be non-empty")
        needle = label_query.lower()
        ranked: list[tuple[int, str, Entity]] = []
        for entity in self._entities.values():
            if entity.kind is not kind:
                continue
            hay = entity.label.lower()
            if hay == needle:
                rank = 0
            elif hay.startswith(needle):
                rank = 1
            elif needle in hay:
                rank = 2
            else:
                continue
            ranked.append((rank, entity.id.key, entity))
        ranked.sort(key=lambda t: (t[0], t[1]))
        return [e for _, _, e in ranked[:limit]]

    # --- persistence -----------------------------------------------------------

    def _persist_entity(self, entity: Entity) -> None:
        if self._entities_path is None or self._replaying:
            return
        record = {
            "kind": entity.kind.value,
            "key": entity.id.key,
            "label": entity.label,
        }
        if entity.literal_value is not None:
            record["value"] = entity.literal_value
        if entity.datatype is not None:
            record["datatype"] = entity.datatype
        if entity.shared_vocabulary:
            record["shared"] = True
        if entity.external_vocab is not None:
            record["vocab"] = entity.external_vocab
        with self._entities_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _persist_event(self, event: str, stmt: Statement, provenance: Provenance) -> None:
        self._event_count += 1
        if self._log_path is None or self._replaying:
            return
        datatype = None
        if stmt.object.kind is EntityKind.LITERAL:
            datatype = self._entities[stmt.object].datatype
        with self._log_path.open("a", encoding="utf-8") as fh:
            fh.write(format_log_line(event, stmt, provenance, datatype) + "\n")

    def _replay(self) -> None:
        assert self._entities_path is not None and self._log_path is not None
        if self._entities_path.exists():
            for line in self._entities_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                entity_id = EntityId(EntityKind(record["kind"]), record["key"])
                existing = self._entities.get(entity_id)
                if existing is not None:
                    # append-only file: a later record refreshes the label
                    existing.label = record.get("label", existing.label)
                    continue
                entity = Entity(
                    id=entity_id,
                    label=record.get("label", ""),
                    literal_value=record.get("value"),
                    datatype=record.get("datatype"),
                    shared_vocabulary=record.get("shared", False),
                    external_vocab=record.get("vocab"),
                )
                self._entities[entity_id] = entity
                if entity.kind is EntityKind.LITERAL:
                    self._literal_index.setdefault(entity.literal_key(), entity_id)
        if self._log_path.exists():
            for line in self._log_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                event, stmt, provenance = parse_log_line(line, self._entities)
                self._principals.add(provenance.user_id)
                if event == "add":
                    self._index_statement(stmt)
                else:
                    live = self._statements.pop(stmt.id, None)
                    if live is not None:
                        self._drop_from_indexes(live)
                        self._tombstones.append(Tombstone(statement=live, removed_by=provenance))
                self._event_count += 1
        self._recover_counters()

    def _recover_counters(self) -> None:
        for entity_id in self._entities:
            m = _NUMERIC_KEY_RE.match(entity_id.key)
            if m and entity_id.key[0] == _KIND_PREFIX[entity_id.kind]:
                self._counters[entity_id.kind] = max(self._counters[entity_id.kind], int(m.group(1)) + 1)
        top = max(
            (s.seq for s in self._statements.values()),
            default=_AUTO_KEY_START - 1,
        )
        for t in self._tombstones:
            top = max(top, t.statement.seq)
        self._stmt_seq = max(self._stmt_seq, top + 1)

    # --- internals ---------------------------------------------------------------

    def _load_vocabulary(self) -> None:
        for kind, key, label, shared, external in vocab.vocabulary_rows():
            entity_id = EntityId(kind, key)
            if entity_id in self._entities:
                continue
            self._entities[entity_id] = Entity(
                id=entity_id,
                label=label,
                shared_vocabulary=shared,
                external_vocab=external,
            )

    def _next_key(self, kind: EntityKind) -> str:
        prefix = _KIND_PREFIX[kind]
        while True:
            key = f"{prefix}{self._counters[kind]}"
            self._counters[kind] += 1
            if EntityId(kind, key) not in self._entities:
                return key

    def _index_statement(self, stmt: Statement) -> None:
        self._statements[stmt.id] = stmt
        self._by_subject[stmt.subject].append(stmt.id)
        self._by_predicate[stmt.predicate].append(stmt.id)
        self._by_object[stmt.object].append(stmt.id)

    def _unindex_statement(self, stmt: Statement) -> None:
        del self._statements[stmt.id]
        self._drop_from_indexes(stmt)

    def _drop_from_indexes(self, stmt: Statement) -> None:
        for index, key in (
            (self._by_subject, stmt.subject),
            (self._by_predicate, stmt.predicate),
            (self._by_object, stmt.object),
        ):
            bucket = index.get(key)
            if bucket and stmt.id in bucket:
                bucket.remove(stmt.id)


def _system_provenance() -> Provenance:
    from .model import utc_now

    return Provenance(user_id="system", timestamp=utc_now())


def format_log_line(event: str, stmt: Statement, provenance: Provenance, datatype: str | None = None) -> str:
    obj = f"{stmt.object.kind.value}:{stmt.object.key}"
    if datatype is not None:
        obj += f"^^{datatype}"
    return " ".join(
        (
            event,
            stmt.id,
            f"{stmt.subject.kind.value}:{stmt.subject.key}",
            stmt.predicate.key,
            obj,
            provenance.user_id,
            provenance.isoformat(),
        )
    )


def parse_log_line(line: str, entities: dict[EntityId, Entity]) -> tuple[str, Statement, Provenance]:
    parts = line.split(" ")
    if len(parts) != 7:
        raise ValueError(f"malformed log line: {line!r}")
    event, stmt_id, subj_text, pred_key, obj_text, user_id, ts_text = parts
    if event not in ("add", "remove"):
        raise ValueError(f"unknown event {event!r}")
    m = _STMT_ID_RE.match(stmt_id)
    if not m:
        raise ValueError(f"malformed statement id {stmt_id!r}")
    if "^^" in obj_text:
        obj_text, _, _ = obj_text.partition("^^")
    subject = EntityId.parse(subj_text)
    obj = EntityId.parse(obj_text)
    provenance = Provenance(user_id=user_id, timestamp=Provenance.parse_timestamp(ts_text))
    for eid in (subject, obj):
        if eid not in entities:
            raise ValueError(f"log references unknown entity {eid}")
    stmt = Statement(
        id=stmt_id,
        seq=int(m.group(1)),
        subject=subject,
        predicate=EntityId(EntityKind.PREDICATE, pred_key),
        object=obj,
        provenance=provenance,
    )
    return event, stmt, provenance
