"""RDF export (N-Triples and Turtle) and lossless N-Triples import.

Sections are typed against DOCO/DEO and articles against FaBiO in the
emitted RDF; the canonical N-Triples form is line-sorted and deduplicated
so unchanged scopes export byte-identically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import vocab
from .errors import RdfParseError, UnknownUriBase
from .model import Entity, EntityId, EntityKind, Provenance, Statement, utc_now

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
PROV_NS = "http://www.w3.org/ns/prov#"
DEO_BASE = "http://purl.org/spar/deo/"
DOCO_BASE = "http://purl.org/spar/doco/"
FABIO_BASE = "http://purl.org/spar/fabio/"

# The FaBiO work type stamped on every exported article. FaBiO offers
# several candidates; this single constant is the place to change it.
FABIO_REVIEW_CLASS_URI = FABIO_BASE + "ReviewArticle"

_EXTERNAL_BASES = {"deo": DEO_BASE, "doco": DOCO_BASE, "fabio": FABIO_BASE}


@dataclass
class UriMapping:
    """Injective mapping between internal (kind, key) ids and absolute URIs."""

    resource_base: str = "http://orkg.org/resource/"
    predicate_base: str = "http://orkg.org/predicate/"
    class_base: str = "http://orkg.org/class/"

    def entity_uri(self, entity: Entity) -> str:
        eid = entity.id
        if eid.kind is EntityKind.LITERAL:
            raise ValueError("literals have no URI")
        if eid.kind is EntityKind.RESOURCE:
            return self.resource_base + eid.key
        if eid.kind is EntityKind.PREDICATE:
            if eid == vocab.TYPE_PREDICATE:
                return RDF_NS + "type"
            if eid.key.startswith("rdf:"):
                return RDF_NS + eid.key[4:]
            if eid.key.startswith("rdfs:"):
                return RDFS_NS + eid.key[5:]
            return self.predicate_base + eid.key
        if entity.external_vocab in _EXTERNAL_BASES:
            return _EXTERNAL_BASES[entity.external_vocab] + eid.key
        return self.class_base + eid.key

    def datatype_uri(self, datatype_key: str) -> str:
        if datatype_key.startswith("xsd:"):
            return XSD_NS + datatype_key[4:]
        return self.class_base + datatype_key

    def datatype_key(self, uri: str) -> str:
        if uri.startswith(XSD_NS):
            return "xsd:" + uri[len(XSD_NS):]
        if uri.startswith(self.class_base):
            return uri[len(self.class_base):]
        raise UnknownUriBase(f"unknown datatype URI base: {uri}")

    def internalize(self, uri: str) -> tuple[EntityId, str | None]:
        """URI to (entity id, external vocabulary flag)."""
        if uri == RDF_NS + "type":
            return vocab.TYPE_PREDICATE, None
        for vocab_name, base in _EXTERNAL_BASES.items():
            if uri.startswith(base):
                return EntityId(EntityKind.CLASS, uri[len(base):]), vocab_name
        if uri.startswith(self.resource_base):
            return EntityId(EntityKind.RESOURCE, uri[len(self.resource_base):]), None
        if uri.startswith(self.predicate_base):
            return EntityId(EntityKind.PREDICATE, uri[len(self.predicate_base):]), None
        if uri.startswith(self.class_base):
            return EntityId(EntityKind.CLASS, uri[len(self.class_base):]), None
        if uri.startswith(RDF_NS):
            return EntityId(EntityKind.PREDICATE, "rdf:" + uri[len(RDF_NS):]), None
        if uri.startswith(RDFS_NS):
            return EntityId(EntityKind.PREDICATE, "rdfs:" + uri[len(RDFS_NS):]), None
        raise UnknownUriBase(f"unknown URI base: {uri}")

    def internalize_or_none(self, uri: str) -> EntityId | None:
        try:
            return self.internalize(uri)[0]
        except UnknownUriBase:
            return None


# --- N-Triples term syntax -----------------------------------------------------

_NT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_literal(value: str) -> str:
    return "".join(_NT_ESCAPES.get(c, c) for c in value)


def unescape_literal(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
            if nxt == "u" and i + 6 <= len(body):
                out.append(chr(int(body[i + 2 : i + 6], 16)))
                i += 6
                continue
        out.append(c)
        i += 1
    return "".join(out)


def _object_text(obj: Entity, mapping: UriMapping) -> str:
    if obj.kind is EntityKind.LITERAL:
        text = f'"{escape_literal(obj.literal_value or "")}"'
        if obj.datatype is not None:
            text += f"^^<{mapping.datatype_uri(obj.datatype)}>"
        return text
    return f"<{mapping.entity_uri(obj)}>"


# --- export ------------------------------------------------------------------


def export_ntriples(
    statements,
    view,
    mapping: UriMapping,
    include_provenance: bool = False,
) -> str:
    """Canonical dump: each statement once, labels for every named entity
    in scope, FaBiO typing for articles; lines sorted and unique."""
    lines: set[str] = set()
    in_scope: set[EntityId] = set()
    for stmt in statements:
        subj = view.get_entity(stmt.subject)
        pred = view.get_entity(stmt.predicate)
        obj = view.get_entity(stmt.object)
        lines.add(f"<{mapping.entity_uri(subj)}> <{mapping.entity_uri(pred)}> {_object_text(obj, mapping)} .")
        in_scope.update((stmt.subject, stmt.predicate))
        if stmt.object.kind is not EntityKind.LITERAL:
            in_scope.add(stmt.object)
        if stmt.predicate == vocab.TYPE_PREDICATE and stmt.object == vocab.CLASS_SMARTREVIEW:
            lines.add(
                f"<{mapping.entity_uri(subj)}> <{RDF_NS}type> <{FABIO_REVIEW_CLASS_URI}> ."
            )
        if include_provenance:
            lines.update(_provenance_lines(stmt, view, mapping))
    for eid in in_scope:
        entity = view.get_entity(eid)
        if entity.label:
            lines.add(
                f'<{mapping.entity_uri(entity)}> <{RDFS_NS}label> "{escape_literal(entity.label)}" .'
            )
    if not lines:
        return ""
    return "\n".join(sorted(lines)) + "\n"


def _provenance_lines(stmt: Statement, view, mapping: UriMapping) -> list[str]:
    node = f"<{mapping.resource_base}{stmt.id}>"
    subj = f"<{mapping.entity_uri(view.get_entity(stmt.subject))}>"
    pred = f"<{mapping.entity_uri(view.get_entity(stmt.predicate))}>"
    obj = _object_text(view.get_entity(stmt.object), mapping)
    ts = stmt.provenance.isoformat()
    return [
        f"{node} <{RDF_NS}type> <{RDF_NS}Statement> .",
        f"{node} <{RDF_NS}subject> {subj} .",
        f"{node} <{RDF_NS}predicate> {pred} .",
        f"{node} <{RDF_NS}object> {obj} .",
        f'{node} <{PROV_NS}wasAttributedTo> "{escape_literal(stmt.provenance.user_id)}" .',
        f'{node} <{PROV_NS}generatedAtTime> "{ts}"^^<{XSD_NS}dateTime> .',
    ]


_TURTLE_PREFIXES = (
    ("orkgr", "resource_base"),
    ("orkgp", "predicate_base"),
    ("orkgc", "class_base"),
)
_TURTLE_FIXED = (
    ("deo", DEO_BASE),
    ("doco", DOCO_BASE),
    ("fabio", FABIO_BASE),
    ("rdf", RDF_NS),
    ("rdfs", RDFS_NS),
    ("xsd", XSD_NS),
)


def export_turtle(statements, view, mapping: UriMapping) -> str:
    """Pretty, prefixed form of the same scope; derived from the canonical
    N-Triples lines so both formats stay in lockstep."""
    nt = export_ntriples(statements, view, mapping)
    prefixes = [(p, getattr(mapping, attr)) for p, attr in _TURTLE_PREFIXES]
    prefixes += list(_TURTLE_FIXED)

    def compact(term: str) -> str:
        if term.startswith("<") and term.endswith(">"):
            uri = term[1:-1]
            for prefix, base in prefixes:
                if uri.startswith(base):
                    local = uri[len(base):]
                    if re.fullmatch(r"[A-Za-z0-9_\-.:]+", local):
                        if prefix == "rdf" and local == "type":
                            return "a"
                        return f"{prefix}:{local}"
            return term
        if "^^<" in term:
            body, _, dt = term.partition("^^")
            return body + "^^" + compact(dt)
        return term

    grouped: dict[str, dict[str, list[str]]] = {}
    for line in nt.splitlines():
        subj, pred, obj = _split_nt_line(line, 1)
        grouped.setdefault(compact(subj), {}).setdefault(compact(pred), []).append(compact(obj))

    used = sorted({p for p, base in prefixes})
    out = [f"@prefix {p}: <{dict(prefixes)[p]}> ." for p in used]
    out.append("")
    for subj in sorted(grouped):
        preds = grouped[subj]
        pred_parts = []
        for pred in sorted(preds, key=lambda p: (p != "a", p)):
            objs = ", ".join(sorted(preds[pred]))
            pred_parts.append(f"{pred} {objs}")
        out.append(f"{subj} " + " ;\n    ".join(pred_parts) + " .")
    return "\n".join(out) + "\n"


# --- import ---------------------------------------------------------------------

_NT_LINE_RE = re.compile(
    r"^<([^>\s]*)>\s+<([^>\s]*)>\s+"
    r"(<[^>\s]*>|\"(?:[^\"\\]|\\.)*\"(?:\^\^<[^>\s]*>)?)"
    r"\s*\.\s*$"
)


def _split_nt_line(line: str, line_no: int) -> tuple[str, str, str]:
    m = _NT_LINE_RE.match(line.strip())
    if not m:
        raise RdfParseError(line_no, f"malformed N-Triples line: {line.strip()!r}")
    return f"<{m.group(1)}>", f"<{m.group(2)}>", m.group(3)


def import_ntriples(document: str, store, mapping: UriMapping, user: str = "import") -> int:
    """All-or-nothing import of a canonical dump; returns the number of new
    statements. Labels become entity labels, everything else statements."""
    labels: dict[EntityId, str] = {}
    vocab_flags: dict[EntityId, str | None] = {}
    staged: list[tuple[EntityId, EntityId, object]] = []

    for line_no, raw in enumerate(document.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        subj_t, pred_t, obj_t = _split_nt_line(line, line_no)
        subj_uri, pred_uri = subj_t[1:-1], pred_t[1:-1]
        subject, subj_vocab = mapping.internalize(subj_uri)
        vocab_flags.setdefault(subject, subj_vocab)
        if pred_uri == RDFS_NS + "label":
            if not obj_t.startswith('"'):
                raise RdfParseError(line_no, "label object must be a literal")
            value, _ = _parse_literal(obj_t, mapping, line_no)
            labels[subject] = value
            continue
        predicate, _ = mapping.internalize(pred_uri)
        if predicate.kind is not EntityKind.PREDICATE:
            raise RdfParseError(line_no, f"predicate position holds a {predicate.kind.value}")
        if obj_t.startswith('"'):
            value, datatype = _parse_literal(obj_t, mapping, line_no)
            staged.append((subject, predicate, ("literal", value, datatype)))
        else:
            obj_id, obj_vocab = mapping.internalize(obj_t[1:-1])
            vocab_flags.setdefault(obj_id, obj_vocab)
            staged.append((subject, predicate, ("entity", obj_id)))
        if predicate == vocab.TYPE_PREDICATE and not obj_t.startswith('"'):
            if staged[-1][2][1].kind is not EntityKind.CLASS:
                raise RdfParseError(line_no, "type statements must point at a class URI")

    with store.lock():
        store.register_principal(user)
        provenance = Provenance(user_id=user, timestamp=utc_now())

        def ensure(eid: EntityId) -> EntityId:
            if not store.has_entity(eid):
                store.create_entity(
                    eid.kind,
                    label=labels.get(eid, eid.key),
                    key=eid.key,
                    external_vocab=vocab_flags.get(eid),
                )
            elif eid in labels and store.get_entity(eid).label != labels[eid]:
                store.update_label(eid, labels[eid])
            return eid

        for eid in labels:
            ensure(eid)
        existing = {}
        added = 0
        for subject, predicate, obj_spec in staged:
            ensure(subject)
            ensure(predicate)
            if obj_spec[0] == "literal":
                obj_id = store.intern_literal(obj_spec[1], obj_spec[2])
            else:
                obj_id = ensure(obj_spec[1])
            content = (subject, predicate, _value_key(store, obj_id))
            if content in existing:
                continue
            if any(
                _value_key(store, s.object) == content[2]
                for s in store.get_statements(subject=subject, predicate=predicate)
            ):
                existing[content] = True
                continue
            store.add_statement(subject, predicate, obj_id, provenance)
            existing[content] = True
            added += 1
        return added


def _value_key(store, obj_id: EntityId):
    if obj_id.kind is EntityKind.LITERAL:
        entity = store.get_entity(obj_id)
        return ("lit", entity.literal_value, entity.datatype)
    return ("ent", str(obj_id))


def _parse_literal(term: str, mapping: UriMapping, line_no: int) -> tuple[str, str | None]:
    m = re.match(r'^"((?:[^"\\]|\\.)*)"(?:\^\^<([^>\s]*)>)?$', term)
    if not m:
        raise RdfParseError(line_no, f"malformed literal {term!r}")
    value = unescape_literal(m.group(1))
    datatype = mapping.datatype_key(m.group(2)) if m.group(2) else None
    return value, datatype
