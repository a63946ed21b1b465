"""SmartReview: community-editable living review articles on a
provenance-bearing scholarly knowledge graph."""

from .model import Entity, EntityId, EntityKind, Provenance, Statement, utc_now
from .platform import Accounts, Platform
from .store import GraphStore

__all__ = [
    "Accounts",
    "Entity",
    "EntityId",
    "EntityKind",
    "GraphStore",
    "Platform",
    "Provenance",
    "Statement",
    "utc_now",
]

__version__ = "0.1.0"
