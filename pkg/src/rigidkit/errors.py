"""Exception hierarchy shared by all rigidkit modules."""


class RigidkitError(Exception):
    """Base class for all errors raised by rigidkit."""


class NonPrime(RigidkitError):
    pass


class UnsupportedSize(RigidkitError):
    pass


class DivisionByZero(RigidkitError):
    pass


class TooLarge(RigidkitError):
    pass


class BadParameters(RigidkitError):
    pass


class PrimeDoesNotDivideOrder(RigidkitError):
    pass


class NotAnAutomorphism(RigidkitError):
    pass


class NotGenerating(RigidkitError):
    pass


class RelationViolated(RigidkitError):
    """A required multiplicative relation fails; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Unsupported(RigidkitError):
    pass


class CosetLimitExceeded(RigidkitError):
    pass


class InconsistentAction(RigidkitError):
    pass


class SearchBudgetExceeded(RigidkitError):
    pass
