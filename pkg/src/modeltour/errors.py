"""Exception types shared across the package."""


class ModeltourError(Exception):
    """Base class for all domain errors raised by modeltour."""


class ParseError(ModeltourError):
    """A document could not be parsed (message carries line/position)."""


class ValidationError(ModeltourError):
    """A parsed document or in-memory structure violates an invariant."""


class TraversalError(ModeltourError):
    """Illegal traversal operation (empty pool, selection outside the pool)."""


class TemplateError(ModeltourError):
    """A template file or template string is malformed."""


class TemplateUnresolvable(ModeltourError):
    """A template references a variable the current context cannot fill."""


class NoNarratableContent(ModeltourError):
    """Input text contains no keyword that maps to a story node."""


class TransportFailure(ModeltourError):
    """The remote description endpoint could not be reached."""
