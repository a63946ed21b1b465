"""Core value types of the scholarly graph: entity ids, entities, statements."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum


class EntityKind(str, Enum):
    RESOURCE = "Resource"
    PREDICATE = "Predicate"
    CLASS = "Class"
    LITERAL = "Literal"


_KEY_RE = re.compile(r"^\S+$")


@dataclass(frozen=True, order=True)
class EntityId:
    """Typed identifier of a graph entity, e.g. (Resource, "R278")."""

    kind: EntityKind
    key: str

    def __post_init__(self):
        if not self.key or not _KEY_RE.match(self.key):
            raise ValueError(f"entity key must be non-empty without whitespace: {self.key!r}")

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.key}"

    @classmethod
    def parse(cls, text: str) -> "EntityId":
        kind, _, key = text.partition(":")
        return cls(EntityKind(kind), key)


def resource(key: str) -> EntityId:
    return EntityId(EntityKind.RESOURCE, key)


def predicate(key: str) -> EntityId:
    return EntityId(EntityKind.PREDICATE, key)


def class_id(key: str) -> EntityId:
    return EntityId(EntityKind.CLASS, key)


def literal_id(key: str) -> EntityId:
    return EntityId(EntityKind.LITERAL, key)


@dataclass
class Entity:
    """A stored graph node. Literals carry a value and an optional datatype
    (None means a plain string literal, distinct from xsd:string)."""

    id: EntityId
    label: str = ""
    literal_value: str | None = None
    datatype: str | None = None
    # Vocabulary bookkeeping: entities flagged shared are referenced by
    # articles but never treated as part of an article's own subgraph.
    shared_vocabulary: bool = False
    # For classes that belong to an external SPAR ontology: "deo", "doco"
    # or "fabio". None means the class lives in the internal namespace.
    external_vocab: str | None = None

    @property
    def kind(self) -> EntityKind:
        return self.id.kind

    def literal_key(self) -> tuple[str, str | None]:
        """Value identity of a literal: (value, datatype)."""
        if self.kind is not EntityKind.LITERAL:
            raise ValueError("literal_key on non-literal entity")
        return (self.literal_value or "", self.datatype)


@dataclass(frozen=True)
class Provenance:
    """Who asserted a statement and when (UTC, millisecond precision)."""

    user_id: str
    timestamp: datetime

    def __post_init__(self):
        if not self.user_id or any(c.isspace() for c in self.user_id):
            raise ValueError(f"user id must be non-empty without whitespace: {self.user_id!r}")
        ts = self.timestamp
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
        # clamp to millisecond precision so log round trips are exact
        ts = ts.astimezone(timezone.utc)
        ts = ts.replace(microsecond=(ts.microsecond // 1000) * 1000)
        object.__setattr__(self, "timestamp", ts)

    def isoformat(self) -> str:
        return self.timestamp.strftime("%Y-%m-%dT%H:%M:%S.") + f"{self.timestamp.microsecond // 1000:03d}Z"

    @classmethod
    def parse_timestamp(cls, text: str) -> datetime:
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        return datetime.fromisoformat(text)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Statement:
    """A provenance-stamped edge of the graph.

    ``seq`` is the store-assigned monotonic sequence number; ``id`` is the
    stable external identifier derived from it.
    """

    id: str
    seq: int
    subject: EntityId
    predicate: EntityId
    object: EntityId
    provenance: Provenance

    def triple(self) -> tuple[EntityId, EntityId, EntityId]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class Tombstone:
    """Removal record kept forever so version diffs can replay history."""

    statement: Statement
    removed_by: Provenance


@dataclass
class Account:
    user_id: str
    display_name: str
    token_sha256: str = field(repr=False, default="")
