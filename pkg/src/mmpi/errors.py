"""Exception taxonomy for the runtime, one class per failure mode."""


class MmpiError(Exception):
    """Base class for every error raised by this package."""


# -- wire protocol ----------------------------------------------------------

class ProtocolError(MmpiError):
    """Malformed or unusable bytes on the wire."""


class BadMagic(ProtocolError):
    pass


class UnsupportedVersion(ProtocolError):
    pass


class UnknownType(ProtocolError):
    pass


class UnknownKind(ProtocolError):
    pass


class Truncated(ProtocolError):
    """Buffer ends before the declared frame does; wait for more bytes."""


class LengthMismatch(ProtocolError):
    """Array payload length is not a multiple of the element size."""


class OversizePayload(ProtocolError):
    pass


# -- transport --------------------------------------------------------------

class BindFailure(MmpiError):
    pass


class ConnectFailure(MmpiError):
    pass


class RegistrationTimeout(MmpiError):
    pass


class ProtocolViolation(MmpiError):
    """Peer sent a frame that is valid on the wire but illegal here."""


class HeadClosed(MmpiError):
    pass


# -- runtime ----------------------------------------------------------------

class InvalidRank(MmpiError):
    pass


class SelfSend(MmpiError):
    pass


class Disconnected(MmpiError):
    pass


class KindMismatch(MmpiError):
    pass


# -- kernels ----------------------------------------------------------------

class EmptySampleSet(MmpiError):
    """Zero Monte Carlo tries: the estimate is undefined."""


# -- launcher ---------------------------------------------------------------

class SpawnFailure(MmpiError):
    pass


class NonzeroWorkerExit(MmpiError):
    pass


# -- harness ----------------------------------------------------------------

class MissingBaseline(MmpiError):
    """Summary requested but no single-process row to normalize against."""
