"""Exception taxonomy shared by all SmartReview modules."""


class SmartReviewError(Exception):
    """Base class for all domain errors."""


# --- graph store ---------------------------------------------------------


class InvalidKind(SmartReviewError):
    """Entity construction arguments do not fit the requested kind."""


class DuplicateKey(SmartReviewError):
    """An explicitly supplied entity key is already taken."""


class UnknownEntity(SmartReviewError):
    """A referenced entity id does not exist in the store."""


class InvalidSubjectKind(SmartReviewError):
    """Statement subject is a literal."""


class UnknownStatement(SmartReviewError):
    """A referenced statement id is not present in the head graph."""


class UnknownPrincipal(SmartReviewError):
    """Provenance names a user id that was never registered."""


# --- article model --------------------------------------------------------


class UnknownArticle(SmartReviewError):
    pass


class UnknownSection(SmartReviewError):
    pass


class InvalidPosition(SmartReviewError):
    """Section position outside [0, len(sections)]."""


class UnknownDeoType(SmartReviewError):
    """Natural-text section names a discourse type not in the shipped list."""


class DanglingReference(SmartReviewError):
    """A section body or comparison cell points at a missing target."""


class DuplicateProperty(SmartReviewError):
    """The same property is declared twice as a comparison row."""


class UnknownComparison(SmartReviewError):
    pass


class UndeclaredRowOrColumn(SmartReviewError):
    """Cell write addresses a row or column the comparison never declared."""


class DocumentFormatError(SmartReviewError):
    """Article text-document import could not be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- versioning -----------------------------------------------------------


class UnknownVersion(SmartReviewError):
    pass


class EmptyArticle(SmartReviewError):
    """Publishing requires at least one section."""


# --- renderer -------------------------------------------------------------


class UnknownTarget(SmartReviewError):
    """Render target (article or version) does not exist."""


# --- query engine ---------------------------------------------------------


class QuerySyntaxError(SmartReviewError):
    """Query text is malformed; carries the character offset of the fault."""

    def __init__(self, position: int, message: str):
        super().__init__(f"at offset {position}: {message}")
        self.position = position


class UnsupportedFeature(SmartReviewError):
    """Query uses SPARQL syntax outside the supported fragment."""

    def __init__(self, feature: str):
        super().__init__(f"unsupported SPARQL feature: {feature}")
        self.feature = feature


class UnknownPrefix(SmartReviewError):
    """Prefixed name uses a prefix that is neither built in nor declared."""


# --- rdf i/o --------------------------------------------------------------


class UnknownScopeTarget(SmartReviewError):
    """Export scope names an article or version that does not exist."""


class RdfParseError(SmartReviewError):
    """N-Triples input is malformed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownUriBase(SmartReviewError):
    """An imported URI does not start with any configured base."""


# --- accounts / api -------------------------------------------------------


class InvalidName(SmartReviewError):
    """Account display name is empty."""


class UnknownToken(SmartReviewError):
    """Presented API token does not authenticate any account."""
