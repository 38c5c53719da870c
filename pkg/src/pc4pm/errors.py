"""Exception hierarchy shared across the toolkit."""


class Pc4pmError(Exception):
    """Base class for every domain error raised by this package."""


class ModelInvariantError(Pc4pmError):
    """A domain value violates one of its structural invariants."""


class PositionedError(Pc4pmError):
    """Error tied to a line/column in an input document."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class MalformedXml(PositionedError):
    """Input is not well-formed XML."""


class SchemaViolation(PositionedError):
    """XML is well-formed but does not follow the event-log schema."""


class MalformedAbstraction(Pc4pmError):
    """Abstraction document is missing header fields or structurally broken."""


class UnknownAttribute(Pc4pmError):
    """A selector or target names an attribute absent from the whole log."""


class UnknownValue(Pc4pmError):
    """A substitution met an unmapped value while configured to fail on those."""


class PseudonymCollision(Pc4pmError):
    """Two distinct plaintexts hashed to the same token within one log."""


class SelectorTypeError(Pc4pmError):
    """Selector comparator does not type-check against the attribute kind."""


class DecryptionFailure(Pc4pmError):
    """A recoverable pseudonym does not decrypt under the supplied key."""


class EmptyResult(Pc4pmError):
    """Enforcement suppressed every event; parameters are too strict."""


class InvalidEpsilon(Pc4pmError):
    """Privacy budget must be strictly positive."""


class UnknownVariantSymbol(Pc4pmError):
    """A noisy variant names an activity absent from the original log."""


class ReservedSymbolClash(Pc4pmError):
    """An activity collides with a reserved start/end marker."""


class UnresolvedToken(Pc4pmError):
    """An encoded token matches no candidate label under the supplied key."""


class NoResources(Pc4pmError):
    """No event in the log carries a resource."""


class ParseFailure(Pc4pmError):
    """Uploaded content does not parse as the declared kind."""


class UnknownEntry(Pc4pmError):
    """Repository entry id does not exist."""


class UnknownTechnique(Pc4pmError):
    """Job names a technique that is not registered."""


class ParameterValidation(Pc4pmError):
    """Job parameters failed schema validation.

    `messages` maps parameter name to a human-readable problem description;
    the service surfaces these verbatim as field-level tooltips.
    """

    def __init__(self, messages: dict):
        super().__init__("; ".join(f"{k}: {v}" for k, v in sorted(messages.items())))
        self.messages = dict(messages)
