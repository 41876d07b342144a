"""Exception hierarchy shared by the codecs and the simulator."""


class NcvcError(Exception):
    pass


class InfeasibleConfig(NcvcError, ValueError):
    """Parameters that no code / scheme can satisfy."""


class DecodeFailure(NcvcError):
    """A header or syndrome could not be decoded.

    ``cause`` is a short machine-readable tag used by the simulator and the
    CLI to bucket failures.
    """

    cause = "decode-failure"

    def __init__(self, message: str, cause: str | None = None):
        super().__init__(message)
        if cause is not None:
            self.cause = cause


class InconsistentSystem(DecodeFailure):
    cause = "inconsistent-system"


class InconsistentIdSegment(DecodeFailure):
    cause = "inconsistent-id-segment"


class NoMatch(DecodeFailure):
    cause = "no-match"


class AmbiguousSelection(DecodeFailure):
    cause = "ambiguous"

    def __init__(self, message: str, matches=()):
        super().__init__(message)
        self.matches = list(matches)


class ListOverflow(DecodeFailure):
    cause = "list-overflow"
