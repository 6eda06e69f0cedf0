"""Exception hierarchy shared by every ratnest module."""


class RatnestError(ValueError):
    """Base class for every domain error raised by ratnest."""


class MalformedInputError(RatnestError):
    """Text that does not parse as a key, path or number."""


class InvalidOrdinalError(RatnestError):
    """A child ordinal that is not a positive integer."""


class NonCanonicalKeyError(RatnestError):
    """A numerator/denominator pair that is not in lowest terms."""


class NotANodeError(RatnestError):
    """A rational that no tree position encodes to, or the root where a node is required."""


class NoSiblingError(RatnestError):
    """The super-root has no next sibling."""


class CorruptKeyError(RatnestError):
    """A quadruple that breaks the determinant or sign invariants."""


class RelocationDomainError(RatnestError):
    """A relocation was applied to a key outside the moved subtree."""


class KeyOverflowError(RatnestError, OverflowError):
    """A component left the range of the checked fixed-width fast path."""


class NoValueError(RatnestError):
    """An empty path has no continued-fraction value."""


class NodeNotFoundError(RatnestError, LookupError):
    """A key that is not present in a store."""


class MissingParentError(NodeNotFoundError):
    """Insertion under a parent that is not stored."""


class SlotConflictError(RatnestError):
    """A move destination ordinal that is already taken or out of range."""


class NoPredicateError(RatnestError):
    """No SQL predicate exists for the requested key and kind."""


class WorkloadError(RatnestError):
    """An invalid benchmark workload description."""
