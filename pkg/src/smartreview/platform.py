"""Wiring: one object owning the store and every service over it."""

from __future__ import annotations

import hashlib
import json
import secrets
from pathlib import Path

from . import rdfio
from .articles import ArticleService
from .errors import InvalidName, UnknownScopeTarget, UnknownToken
from .model import Account, EntityId, EntityKind
from .render import Renderer
from .store import GraphStore
from .versioning import VersionManager


class Accounts:
    """Token-based account registry; tokens are returned once and kept
    only as SHA-256 digests."""

    def __init__(self, store: GraphStore, data_dir: str | Path | None = None):
        self.store = store
        self._accounts: dict[str, Account] = {}
        self._counter = 100000
        self._path = Path(data_dir) / "accounts.jsonl" if data_dir is not None else None
        if self._path is not None and self._path.exists():
            for line in self._path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                account = Account(
                    user_id=record["userId"],
                    display_name=record["displayName"],
                    token_sha256=record["tokenSha256"],
                )
                self._accounts[account.user_id] = account
                self.store.register_principal(account.user_id)
                suffix = account.user_id[1:]
                if suffix.isdigit():
                    self._counter = max(self._counter, int(suffix) + 1)

    def register(self, display_name: str) -> tuple[Account, str]:
        if not display_name or not display_name.strip():
            raise InvalidName("display name must be non-empty")
        token = secrets.token_hex(32)  # 256-bit
        user_id = f"U{self._counter}"
        self._counter += 1
        account = Account(
            user_id=user_id,
            display_name=display_name.strip(),
            token_sha256=hashlib.sha256(token.encode()).hexdigest(),
        )
        self._accounts[user_id] = account
        self.store.register_principal(user_id)
        if self._path is not None:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {
                            "userId": account.user_id,
                            "displayName": account.display_name,
                            "tokenSha256": account.token_sha256,
                        }
                    )
                    + "\n"
                )
        return account, token

    def authenticate(self, token: str) -> str:
        digest = hashlib.sha256(token.encode()).hexdigest()
        matched: str | None = None
        for account in self._accounts.values():
            # constant-time comparison against every stored digest
            if secrets.compare_digest(digest, account.token_sha256):
                matched = account.user_id
        if matched is None:
            raise UnknownToken("token does not authenticate any account")
        return matched

    def get(self, user_id: str) -> Account | None:
        return self._accounts.get(user_id)


class Platform:
    """The assembled system: store, article model, versioning, rendering,
    RDF mapping and accounts, sharing one optional data directory."""

    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.store = GraphStore(data_dir)
        self.articles = ArticleService(self.store)
        self.mapping = rdfio.UriMapping()
        self.versions = VersionManager(self.store, self.articles, data_dir, self.mapping)
        self.renderer = Renderer(self.store, self.articles, self.versions)
        self.accounts = Accounts(self.store, data_dir)

    # --- rdf scopes ---------------------------------------------------------

    def export_rdf(
        self,
        article_key: str | None = None,
        version_id: int | None = None,
        turtle: bool = False,
        include_provenance: bool = False,
    ) -> str:
        if article_key is None:
            view = self.store
            statements = self.store.head_statements()
        else:
            article_id = EntityId(EntityKind.RESOURCE, article_key)
            if version_id is not None:
                from .errors import UnknownVersion

                try:
                    version = self.versions.get_version(article_id, version_id)
                except UnknownVersion as exc:
                    raise UnknownScopeTarget(str(exc)) from exc
                view = version.view()
                statements = sorted(version.statements, key=lambda s: s.seq)
            else:
                from . import vocab
                from .errors import UnknownEntity

                if (
                    not self.store.has_entity(article_id)
                    or vocab.CLASS_SMARTREVIEW not in self.store.classes_of(article_id)
                ):
                    raise UnknownScopeTarget(f"unknown article {article_key}")
                view = self.store
                statements = sorted(self.store.traverse_subgraph(article_id), key=lambda s: s.seq)
        if turtle:
            return rdfio.export_turtle(statements, view, self.mapping)
        return rdfio.export_ntriples(statements, view, self.mapping, include_provenance)

    def import_rdf(self, document: str) -> int:
        return rdfio.import_ntriples(document, self.store, self.mapping)
