"""Exception hierarchy shared by every groupcodes module."""


class GroupCodeError(Exception):
    """Base class for all library errors."""


class SingularMatrix(GroupCodeError, ValueError):
    pass


class NotSublattice(GroupCodeError):
    """M·Z^k is not contained in the lattice spanned by T."""


class InternalError(GroupCodeError):
    """A structural postcondition failed; indicates a bug, not bad input."""


class IdentityElement(GroupCodeError, ValueError):
    pass


class DegenerateRadius(GroupCodeError, ValueError):
    pass


class GuardExceeded(GroupCodeError, ValueError):
    pass


class EmptyGroup(GroupCodeError, ValueError):
    pass


class NumericalFailure(GroupCodeError):
    pass


class InvalidDimension(GroupCodeError, ValueError):
    pass


class OddOrder(GroupCodeError, ValueError):
    pass


class InvalidGenerators(GroupCodeError, ValueError):
    def __init__(self, message: str, order: int | None = None):
        super().__init__(message)
        self.order = order
