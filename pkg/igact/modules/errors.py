class ResourceBoundError(RuntimeError):
    """A configured size cap would be exceeded."""


class VerificationError(RuntimeError):
    """An audit failed on the instance at hand.

    Every audit checks a statement that is proven in general, so this is never
    expected; the message names the failing item.
    """


class HypothesisError(ValueError):
    """A rule was asked to certify an instance whose side conditions do not hold."""
