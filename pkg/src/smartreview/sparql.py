"""Parser and executor for the SPARQL fragment the platform supports:
PREFIX declarations, SELECT [DISTINCT] over basic graph patterns with
``;``/``,`` abbreviations, ``a`` sugar, prefixed names and typed string
literals. Everything else fails loudly with a named error."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Union

from . import vocab
from .errors import QuerySyntaxError, UnknownPrefix, UnsupportedFeature
from .model import EntityId, EntityKind

# --- query model ------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class PrefixedName:
    prefix: str
    local: str

    def __str__(self) -> str:
        return f"{self.prefix}:{self.local}"


@dataclass(frozen=True)
class LiteralTerm:
    value: str
    datatype: PrefixedName | None = None


Term = Union[Variable, PrefixedName, LiteralTerm]


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term


@dataclass
class QueryPlan:
    prefixes: dict[str, str] = field(default_factory=dict)
    projection: list[str] = field(default_factory=list)
    distinct: bool = False
    patterns: list[TriplePattern] = field(default_factory=list)


@dataclass
class SolutionTable:
    header: list[str]
    rows: list[dict[str, EntityId]]


# Features recognized and refused by name.
_UNSUPPORTED_KEYWORDS = {
    "OPTIONAL",
    "FILTER",
    "UNION",
    "LIMIT",
    "OFFSET",
    "ORDER",
    "GROUP",
    "HAVING",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "GRAPH",
    "SERVICE",
    "MINUS",
    "BIND",
    "VALUES",
    "FROM",
    "REDUCED",
    "EXISTS",
    "NOT",
}

# Prefixes understood without declaration; they resolve structurally onto
# the three entity kinds plus the RDF/XSD namespaces.
BUILTIN_PREFIXES = ("orkgr", "orkgp", "orkgc", "xsd", "rdf", "rdfs")


# --- lexer -------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # word | pname | var | string | iri | punct | eof
    text: str
    pos: int


_TOKEN_RES = [
    ("ws", re.compile(r"[ \t\r\n]+")),
    ("comment", re.compile(r"#[^\n]*")),
    ("var", re.compile(r"\?[A-Za-z_][A-Za-z0-9_]*")),
    # a local name may contain dots but never ends with one (the dot
    # closes the triple instead)
    ("pname", re.compile(r"[A-Za-z][A-Za-z0-9_\-]*:[A-Za-z0-9](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?")),
    ("pnamens", re.compile(r"[A-Za-z][A-Za-z0-9_\-]*:")),
    ("string", re.compile(r'"(?:[^"\\]|\\.)*"')),
    ("iri", re.compile(r"<[^>\s]*>")),
    ("dtype", re.compile(r"\^\^")),
    ("punct", re.compile(r"[{};,.*]")),
    ("word", re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")),
]


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        for kind, rx in _TOKEN_RES:
            m = rx.match(text, pos)
            if m:
                if kind not in ("ws", "comment"):
                    tokens.append(_Token(kind, m.group(0), pos))
                pos = m.end()
                break
        else:
            raise QuerySyntaxError(pos, f"unexpected character {text[pos]!r}")
    tokens.append(_Token("eof", "", n))
    return tokens


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_word(self, word: str) -> _Token:
        tok = self.next()
        if tok.kind != "word" or tok.text.upper() != word:
            raise QuerySyntaxError(tok.pos, f"expected {word}, found {tok.text!r}")
        return tok

    def fail_if_unsupported(self, tok: _Token) -> None:
        if tok.kind == "word" and tok.text.upper() in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.text.upper())
        if tok.kind == "iri":
            raise UnsupportedFeature("IRI term")

    def parse(self) -> QueryPlan:
        plan = QueryPlan()
        while self.peek().kind == "word" and self.peek().text.upper() == "PREFIX":
            self.next()
            ns = self.next()
            if ns.kind != "pnamens":
                raise QuerySyntaxError(ns.pos, f"expected prefix name, found {ns.text!r}")
            iri = self.next()
            if iri.kind != "iri":
                raise QuerySyntaxError(iri.pos, f"expected IRI, found {iri.text!r}")
            plan.prefixes[ns.text[:-1]] = iri.text[1:-1]

        tok = self.peek()
        self.fail_if_unsupported(tok)
        self.expect_word("SELECT")
        nxt = self.peek()
        if nxt.kind == "word" and nxt.text.upper() == "DISTINCT":
            self.next()
            plan.distinct = True
        if self.peek().kind == "punct" and self.peek().text == "*":
            raise UnsupportedFeature("SELECT *")
        var_positions: dict[str, int] = {}
        while self.peek().kind == "var":
            tok = self.next()
            name = tok.text[1:]
            if name not in var_positions:
                var_positions[name] = tok.pos
                plan.projection.append(name)
        if not plan.projection:
            raise QuerySyntaxError(self.peek().pos, "expected at least one projected variable")

        tok = self.peek()
        if tok.kind == "word" and tok.text.upper() == "WHERE":
            self.next()
        tok = self.next()
        if tok.kind != "punct" or tok.text != "{":
            self.fail_if_unsupported(tok)
            raise QuerySyntaxError(tok.pos, f"expected {{, found {tok.text!r}")
        plan.patterns = self.parse_bgp()
        tok = self.next()
        if tok.kind != "eof":
            self.fail_if_unsupported(tok)
            raise QuerySyntaxError(tok.pos, f"unexpected trailing input {tok.text!r}")

        pattern_vars = {
            t.name
            for p in plan.patterns
            for t in (p.subject, p.predicate, p.object)
            if isinstance(t, Variable)
        }
        for name in plan.projection:
            if name not in pattern_vars:
                raise QuerySyntaxError(var_positions[name], f"projected variable ?{name} never occurs in a pattern")
        return plan

    def parse_bgp(self) -> list[TriplePattern]:
        patterns: list[TriplePattern] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "}":
                self.next()
                return patterns
            if tok.kind == "eof":
                raise QuerySyntaxError(tok.pos, "unexpected end of query inside WHERE block")
            self.fail_if_unsupported(tok)
            subject = self.parse_term(allow_literal=False)
            patterns.extend(self.parse_property_list(subject))
            tok = self.peek()
            if tok.kind == "punct" and tok.text == ".":
                self.next()

    def parse_property_list(self, subject: Term) -> list[TriplePattern]:
        patterns: list[TriplePattern] = []
        while True:
            verb = self.parse_verb()
            while True:
                obj = self.parse_term(allow_literal=True)
                patterns.append(TriplePattern(subject, verb, obj))
                if self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    continue
                break
            if self.peek().kind == "punct" and self.peek().text == ";":
                self.next()
                nxt = self.peek()
                if nxt.kind == "punct" and nxt.text in (".", "}"):
                    return patterns  # dangling semicolon
                continue
            return patterns

    def parse_verb(self) -> Term:
        tok = self.peek()
        if tok.kind == "word" and tok.text == "a":
            self.next()
            return PrefixedName("rdf", "type")
        return self.parse_term(allow_literal=False)

    def parse_term(self, allow_literal: bool) -> Term:
        tok = self.next()
        self.fail_if_unsupported(tok)
        if tok.kind == "var":
            return Variable(tok.text[1:])
        if tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            return PrefixedName(prefix, local)
        if tok.kind == "string":
            if not allow_literal:
                raise QuerySyntaxError(tok.pos, "literals may appear in object position only")
            value = _unescape_string(tok.text[1:-1], tok.pos)
            if self.peek().kind == "dtype":
                self.next()
                dt = self.next()
                if dt.kind != "pname":
                    raise QuerySyntaxError(dt.pos, f"expected datatype name, found {dt.text!r}")
                p, _, l = dt.text.partition(":")
                return LiteralTerm(value, PrefixedName(p, l))
            return LiteralTerm(value, None)
        raise QuerySyntaxError(tok.pos, f"unexpected token {tok.text!r}")


def _unescape_string(body: str, pos: int) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            i += 1
            if i >= len(body):
                raise QuerySyntaxError(pos, "dangling escape in string literal")
            mapped = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}.get(body[i])
            if mapped is None:
                raise QuerySyntaxError(pos, f"unknown escape \\{body[i]}")
            out.append(mapped)
        else:
            out.append(c)
        i += 1
    return "".join(out)


def parse_query(text: str) -> QueryPlan:
    return _Parser(text).parse()


# --- execution ----------------------------------------------------------------

# A resolved pattern position: a variable name, a constant entity id, a
# literal value constraint, or a constant that cannot match anything.
_VAR = "var"
_ENTITY = "entity"
_LITERAL = "literal"
_NOMATCH = "nomatch"

UriResolver = Callable[[str], "EntityId | None"]


def _resolve_term(
    term: Term,
    prefixes: dict[str, str],
    uri_resolver: UriResolver | None,
) -> tuple:
    if isinstance(term, Variable):
        return (_VAR, term.name)
    if isinstance(term, LiteralTerm):
        datatype = None
        if term.datatype is not None:
            datatype = _resolve_datatype(term.datatype, prefixes)
        return (_LITERAL, term.value, datatype)
    assert isinstance(term, PrefixedName)
    if term.prefix in prefixes:
        if uri_resolver is None:
            return (_NOMATCH,)
        entity = uri_resolver(prefixes[term.prefix] + term.local)
        return (_ENTITY, entity) if entity is not None else (_NOMATCH,)
    if term.prefix == "orkgr":
        return (_ENTITY, EntityId(EntityKind.RESOURCE, term.local))
    if term.prefix == "orkgp":
        return (_ENTITY, EntityId(EntityKind.PREDICATE, term.local))
    if term.prefix == "orkgc":
        return (_ENTITY, EntityId(EntityKind.CLASS, term.local))
    if term.prefix == "rdf" and term.local == "type":
        return (_ENTITY, vocab.TYPE_PREDICATE)
    if term.prefix in ("rdf", "rdfs", "xsd"):
        return (_ENTITY, EntityId(EntityKind.PREDICATE, f"{term.prefix}:{term.local}"))
    raise UnknownPrefix(f"undeclared prefix {term.prefix!r}")


def _resolve_datatype(name: PrefixedName, prefixes: dict[str, str]) -> str:
    if name.prefix in prefixes:
        # a declared override still names the datatype by its local part
        return f"{name.prefix}:{name.local}"
    if name.prefix in BUILTIN_PREFIXES:
        return f"{name.prefix}:{name.local}"
    raise UnknownPrefix(f"undeclared prefix {name.prefix!r}")


def execute(plan: QueryPlan, view, uri_resolver: UriResolver | None = None) -> SolutionTable:
    """Run a basic graph pattern against a graph view (head store or
    snapshot). Result: the set of total variable mappings satisfying every
    pattern, projected, deduplicated when DISTINCT, sorted for determinism."""
    resolved = [
        (
            _resolve_term(p.subject, plan.prefixes, uri_resolver),
            _resolve_term(p.predicate, plan.prefixes, uri_resolver),
            _resolve_term(p.object, plan.prefixes, uri_resolver),
        )
        for p in plan.patterns
    ]

    # most-selective-first: prefer patterns with more constants, then
    # patterns sharing variables with ones already placed
    order = _reorder(resolved)

    bindings: list[dict[str, EntityId]] = [{}]
    for idx in order:
        s_term, p_term, o_term = resolved[idx]
        next_bindings: list[dict[str, EntityId]] = []
        seen: set[frozenset] = set()
        for binding in bindings:
            for stmt in _candidates(view, s_term, p_term, o_term, binding):
                extended = _unify(stmt, s_term, p_term, o_term, binding, view)
                if extended is None:
                    continue
                key = frozenset(extended.items())
                if key not in seen:
                    seen.add(key)
                    next_bindings.append(extended)
        bindings = next_bindings
        if not bindings:
            break

    rows = [{name: b[name] for name in plan.projection} for b in bindings]
    if plan.distinct:
        unique: list[dict[str, EntityId]] = []
        seen_rows: set[tuple] = set()
        for row in rows:
            key = tuple(str(row[v]) for v in plan.projection)
            if key not in seen_rows:
                seen_rows.add(key)
                unique.append(row)
        rows = unique
    rows.sort(key=lambda r: tuple(str(r[v]) for v in plan.projection))
    return SolutionTable(header=list(plan.projection), rows=rows)


def _reorder(resolved: list[tuple]) -> list[int]:
    def constants(entry: tuple) -> int:
        return sum(1 for t in entry if t[0] in (_ENTITY, _LITERAL, _NOMATCH))

    remaining = list(range(len(resolved)))
    placed: list[int] = []
    bound_vars: set[str] = set()
    while remaining:
        def score(idx: int) -> tuple:
            entry = resolved[idx]
            bound = constants(entry) + sum(
                1 for t in entry if t[0] == _VAR and t[1] in bound_vars
            )
            return (-bound, idx)

        best = min(remaining, key=score)
        remaining.remove(best)
        placed.append(best)
        for t in resolved[best]:
            if t[0] == _VAR:
                bound_vars.add(t[1])
    return placed


def _instantiate(term: tuple, binding: dict[str, EntityId]):
    """Constant entity id for this position under current bindings, else None."""
    if term[0] == _ENTITY:
        return term[1]
    if term[0] == _VAR and term[1] in binding:
        return binding[term[1]]
    return None


def _candidates(view, s_term, p_term, o_term, binding):
    if s_term[0] == _NOMATCH or p_term[0] == _NOMATCH or o_term[0] == _NOMATCH:
        return []
    subject = _instantiate(s_term, binding)
    predicate = _instantiate(p_term, binding)
    obj = _instantiate(o_term, binding) if o_term[0] != _LITERAL else None
    return view.get_statements(subject=subject, predicate=predicate, object=obj)


def _unify(stmt, s_term, p_term, o_term, binding, view):
    extended = dict(binding)
    for term, value in ((s_term, stmt.subject), (p_term, stmt.predicate), (o_term, stmt.object)):
        if term[0] == _ENTITY:
            if term[1] != value:
                return None
        elif term[0] == _LITERAL:
            if value.kind is not EntityKind.LITERAL:
                return None
            entity = view.get_entity(value)
            if entity.literal_value != term[1] or entity.datatype != term[2]:
                return None
        elif term[0] == _VAR:
            bound = extended.get(term[1])
            if bound is None:
                extended[term[1]] = value
            elif bound != value:
                return None
    return extended


# --- result serialization -------------------------------------------------------


def to_csv(table: SolutionTable, view) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_cell_text(row[v], view) for v in table.header])
    return buf.getvalue()


def _cell_text(entity_id: EntityId, view) -> str:
    if entity_id.kind is EntityKind.LITERAL:
        return view.get_entity(entity_id).literal_value or ""
    return entity_id.key


def to_json(
    table: SolutionTable,
    view,
    uri_of: Callable[[EntityId], str],
    datatype_uri_of: Callable[[str], str],
) -> str:
    bindings = []
    for row in table.rows:
        entry = {}
        for var in table.header:
            eid = row[var]
            if eid.kind is EntityKind.LITERAL:
                entity = view.get_entity(eid)
                cell: dict[str, str] = {"type": "literal", "value": entity.literal_value or ""}
                if entity.datatype is not None:
                    cell["datatype"] = datatype_uri_of(entity.datatype)
            else:
                cell = {"type": "uri", "value": uri_of(eid)}
            entry[var] = cell
        bindings.append(entry)
    doc = {"head": {"vars": table.header}, "results": {"bindings": bindings}}
    return json.dumps(doc, indent=2, sort_keys=False)
