"""Well-known vocabulary: the fixed entity table loaded into every store
before any user data, plus the structural predicates and classes the
article model is built from."""

from __future__ import annotations

from importlib import resources as importlib_resources

from .model import EntityId, EntityKind, class_id, predicate, resource

# The reserved type predicate; `a` in queries resolves to it and class
# membership is stored through it.
TYPE_PREDICATE = predicate("rdf:type")

# --- paper-given vocabulary ------------------------------------------------

P30 = predicate("P30")  # research field
P31 = predicate("P31")  # contribution
P32 = predicate("P32")  # research problem
P27 = predicate("P27")  # related research field
P7009 = predicate("P7009")  # RDF support
HAS_SECTION = predicate("HasSection")

CLASS_SMARTREVIEW = class_id("SmartReview")
CLASS_CONTRIBUTION = class_id("Contribution")
CLASS_INTRODUCTION = class_id("Introduction")

R278 = resource("R278")  # information science
R49584 = resource("R49584")  # Scholarly Communication
R8193 = resource("R8193")  # information science (legacy field id)
R135360 = resource("R135360")  # the seeded review article

# --- structural plumbing ----------------------------------------------------

HAS_TITLE = predicate("HasTitle")
HAS_HEADING = predicate("HasHeading")
HAS_CONTENT = predicate("HasContent")
HAS_ORDER_INDEX = predicate("HasOrderIndex")
HAS_COLUMN = predicate("HasColumn")
COLUMN_PAPER = predicate("ColumnPaper")
COLUMN_CONTRIBUTION = predicate("ColumnContribution")
HAS_ROW = predicate("HasRow")
ROW_PROPERTY = predicate("RowProperty")
HAS_AUTHOR = predicate("HasAuthor")
HAS_PUBLICATION_DATE = predicate("HasPublicationDate")
HAS_DESCRIPTION = predicate("HasDescription")
SAME_AS = predicate("SameAs")
REFERS_TO = predicate("RefersTo")
OF_COMPARISON = predicate("OfComparison")
HAS_CHART_KIND = predicate("HasChartKind")
HAS_SERIES_PROPERTY = predicate("HasSeriesProperty")
HAS_LABEL = predicate("HasLabel")
HAS_TABLE_ENTITY = predicate("HasTableEntity")
HAS_TABLE_KIND = predicate("HasTableKind")

CLASS_SECTION = class_id("Section")  # carried by every section; maps to DOCO
CLASS_COMPARISON_SECTION = class_id("ComparisonSection")
CLASS_VISUALIZATION_SECTION = class_id("VisualizationSection")
CLASS_ONTOLOGY_TABLE_SECTION = class_id("OntologyTableSection")
CLASS_ENTITY_TABLE_SECTION = class_id("EntityTableSection")
CLASS_COMPARISON = class_id("Comparison")
CLASS_COMPARISON_COLUMN = class_id("ComparisonColumn")
CLASS_COMPARISON_ROW = class_id("ComparisonRow")
CLASS_VISUALIZATION = class_id("Visualization")
CLASS_PAPER = class_id("Paper")

# Predicates that realize the document structure rather than reviewed
# content; ontology/entity tables and used-entity listings skip them.
STRUCTURAL_PREDICATES: frozenset[EntityId] = frozenset(
    {
        TYPE_PREDICATE,
        P31,
        HAS_SECTION,
        HAS_TITLE,
        HAS_HEADING,
        HAS_CONTENT,
        HAS_ORDER_INDEX,
        HAS_COLUMN,
        COLUMN_PAPER,
        COLUMN_CONTRIBUTION,
        HAS_ROW,
        ROW_PROPERTY,
        HAS_AUTHOR,
        HAS_PUBLICATION_DATE,
        HAS_DESCRIPTION,
        SAME_AS,
        REFERS_TO,
        OF_COMPARISON,
        HAS_CHART_KIND,
        HAS_SERIES_PROPERTY,
        HAS_LABEL,
        HAS_TABLE_ENTITY,
        HAS_TABLE_KIND,
    }
)

# (kind, key, label, shared, external_vocab) rows loaded at store startup.
_VOCABULARY_ROWS: tuple[tuple[EntityKind, str, str, bool, str | None], ...] = (
    (EntityKind.PREDICATE, "rdf:type", "type", True, None),
    (EntityKind.PREDICATE, "P30", "research field", True, None),
    (EntityKind.PREDICATE, "P31", "contribution", True, None),
    (EntityKind.PREDICATE, "P32", "research problem", True, None),
    (EntityKind.PREDICATE, "P27", "related research field", True, None),
    (EntityKind.PREDICATE, "P7009", "RDF support", True, None),
    (EntityKind.PREDICATE, "HasSection", "has section", True, None),
    (EntityKind.PREDICATE, "HasTitle", "has title", True, None),
    (EntityKind.PREDICATE, "HasHeading", "has heading", True, None),
    (EntityKind.PREDICATE, "HasContent", "has content", True, None),
    (EntityKind.PREDICATE, "HasOrderIndex", "has order index", True, None),
    (EntityKind.PREDICATE, "HasColumn", "has column", True, None),
    (EntityKind.PREDICATE, "ColumnPaper", "column paper", True, None),
    (EntityKind.PREDICATE, "ColumnContribution", "column contribution", True, None),
    (EntityKind.PREDICATE, "HasRow", "has row", True, None),
    (EntityKind.PREDICATE, "RowProperty", "row property", True, None),
    (EntityKind.PREDICATE, "HasAuthor", "has author", True, None),
    (EntityKind.PREDICATE, "HasPublicationDate", "has publication date", True, None),
    (EntityKind.PREDICATE, "HasDescription", "has description", True, None),
    (EntityKind.PREDICATE, "SameAs", "same as", True, None),
    (EntityKind.PREDICATE, "RefersTo", "refers to", True, None),
    (EntityKind.PREDICATE, "OfComparison", "of comparison", True, None),
    (EntityKind.PREDICATE, "HasChartKind", "has chart kind", True, None),
    (EntityKind.PREDICATE, "HasSeriesProperty", "has series property", True, None),
    (EntityKind.PREDICATE, "HasLabel", "has label", True, None),
    (EntityKind.PREDICATE, "HasTableEntity", "has table entity", True, None),
    (EntityKind.PREDICATE, "HasTableKind", "has table kind", True, None),
    (EntityKind.CLASS, "SmartReview", "SmartReview", True, None),
    (EntityKind.CLASS, "Contribution", "Contribution", True, None),
    (EntityKind.CLASS, "Section", "Section", True, "doco"),
    (EntityKind.CLASS, "ComparisonSection", "Comparison section", True, None),
    (EntityKind.CLASS, "VisualizationSection", "Visualization section", True, None),
    (EntityKind.CLASS, "OntologyTableSection", "Ontology table section", True, None),
    (EntityKind.CLASS, "EntityTableSection", "Entity table section", True, None),
    (EntityKind.CLASS, "Comparison", "Comparison", True, None),
    (EntityKind.CLASS, "ComparisonColumn", "Comparison column", True, None),
    (EntityKind.CLASS, "ComparisonRow", "Comparison row", True, None),
    (EntityKind.CLASS, "Visualization", "Visualization", True, None),
    (EntityKind.CLASS, "Paper", "Paper", True, None),
    (EntityKind.RESOURCE, "R278", "information science", True, None),
    (EntityKind.RESOURCE, "R49584", "Scholarly Communication", True, None),
    (EntityKind.RESOURCE, "R8193", "information science", True, None),
    # The well-known review resource itself: reserved up front, but not
    # flagged shared because it is an article root, not vocabulary.
    (EntityKind.RESOURCE, "R135360", "Scholarly Knowledge Graphs", False, None),
)


def deo_class_names() -> list[str]:
    """Class names shipped in the static discourse-type list, file order."""
    text = deo_file_bytes().decode("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


def deo_file_bytes() -> bytes:
    return importlib_resources.files("smartreview.data").joinpath("deo_classes.txt").read_bytes()


def vocabulary_rows():
    """All startup entities: the fixed table plus each discourse class."""
    rows = list(_VOCABULARY_ROWS)
    for name in deo_class_names():
        rows.append((EntityKind.CLASS, name, name, True, "deo"))
    return rows


SECTION_KIND_CLASS: dict[str, EntityId] = {
    "text": CLASS_SECTION,
    "comparison": CLASS_COMPARISON_SECTION,
    "visualization": CLASS_VISUALIZATION_SECTION,
    "ontology-table": CLASS_ONTOLOGY_TABLE_SECTION,
    "entity-table": CLASS_ENTITY_TABLE_SECTION,
}

CHART_KINDS = ("Table", "BarChart", "LineChart")
TABLE_KINDS = ("Resources", "Properties")
