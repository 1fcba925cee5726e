"""Exception hierarchy shared by every module."""


class CoarseError(Exception):
    """Base class for errors raised by coarse_ends."""


class InputError(CoarseError, ValueError):
    """Malformed or inconsistent input (bad point, mismatched carriers, ...)."""


class CertificationError(CoarseError):
    """A declared property failed an explicit check.

    ``index`` names the offending sequence index or point when there is one.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class HorizonError(CoarseError, IndexError):
    """A finitely described object was evaluated past its horizon."""
