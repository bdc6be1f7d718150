"""Exception hierarchy.

Every exception carries an ``exit_code`` used by the command-line front end:
3 for crypto/parameter errors, 4 for I/O, 5 for integrity/decode failures.
"""


class NilcryptError(Exception):
    exit_code = 3


# matrix layer
class InvalidDimension(NilcryptError, ValueError):
    pass


class DimensionMismatch(NilcryptError, ValueError):
    pass


class NonFiniteMatrix(NilcryptError, ValueError):
    pass


class SingularMatrix(NilcryptError, ArithmeticError):
    pass


class ExpDidNotConverge(NilcryptError, ArithmeticError):
    pass


class NotNilpotent(NilcryptError, ValueError):
    pass


class NotSingleBlock(NilcryptError, ValueError):
    pass


# modular arithmetic / key exchange
class InvalidModulus(NilcryptError, ValueError):
    pass


class InvalidParams(NilcryptError, ValueError):
    pass


class InvalidExponent(NilcryptError, ValueError):
    pass


class DegenerateKey(NilcryptError, ValueError):
    pass


# codec
class InvalidBase(NilcryptError, ValueError):
    pass


class UnencodableDigit(NilcryptError, ValueError):
    pass


class BlockOverflow(NilcryptError, ValueError):
    pass


class ParamMismatch(NilcryptError, ValueError):
    pass


class CorruptCiphertext(NilcryptError, ValueError):
    exit_code = 5


class DigitOutOfRange(NilcryptError, ValueError):
    exit_code = 5


# cryptanalysis
class InvalidEpsilon(NilcryptError, ValueError):
    pass


class NoSolution(NilcryptError, ValueError):
    pass


class LeadingCoefficientZero(NilcryptError, ValueError):
    pass


class ParameterTooLarge(NilcryptError, ValueError):
    pass


# wire protocol
class FrameError(NilcryptError, ValueError):
    exit_code = 5


class OversizedFrame(FrameError):
    pass


class TruncatedFrame(FrameError):
    pass


class UnknownKind(FrameError):
    pass


class HandshakeRejected(NilcryptError):
    pass


class PeerConnectionError(NilcryptError, ConnectionError):
    exit_code = 4
