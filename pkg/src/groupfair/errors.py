"""Typed errors raised across the package."""


class GroupFairError(Exception):
    """Base class for every error raised by groupfair."""


class InputError(GroupFairError, ValueError):
    """Malformed or inconsistent input."""


class NotAPermutation(InputError):
    pass


class NotSinglePeaked(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class SizeMismatch(InputError):
    pass


class MissingBallot(InputError):
    pass


class InvalidBallotFamily(InputError):
    pass


class InvalidParameters(InputError):
    pass


class MixedComponentKinds(InputError):
    pass


class RequiresSingleGroup(InputError):
    pass


class RequiresSingletonGroups(InputError):
    pass


class InvalidSpec(InputError):
    pass


class NonCompliantScenario(InputError):
    pass


class PreconditionViolated(InputError):
    pass


class InvalidOffset(InputError):
    pass


class NotTopContaining(InputError):
    pass


class ParseError(InputError):
    pass


class SizeGuardExceeded(GroupFairError):
    """An exhaustive computation would exceed the configured size guard."""


class DualModeDisagreement(GroupFairError):
    """Semantic and characterization audits returned different verdicts."""
