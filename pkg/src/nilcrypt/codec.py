"""Message <-> matrix encoding.

A block carries up to ``n - 1`` digits.  Digit ``j`` contributes
``ln(d_j + offset) * X**(j + 1)``; decoding moves the block into a Jordan
basis of ``X`` where digit ``j`` can be read off superdiagonal ``j + 1``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import matrixcore as mc
from .errors import (
    BlockOverflow,
    CorruptCiphertext,
    DigitOutOfRange,
    InvalidBase,
    ParamMismatch,
    UnencodableDigit,
)

STRUCTURE_TOL = 1e-6
ROUNDING_HALF_WIDTH = 0.25


@dataclass(frozen=True)
class DigitMessage:
    base_a: int
    digits: tuple = ()

    def __post_init__(self):
        if self.base_a < 2:
            raise InvalidBase(f"base must be >= 2, got {self.base_a}")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        for d in self.digits:
            if not (0 <= d < self.base_a):
                raise DigitOutOfRange(f"digit {d} outside [0, {self.base_a})")

    @property
    def digit_count(self):
        return len(self.digits)

    def to_int(self):
        value = 0
        for d in reversed(self.digits):
            value = value * self.base_a + d
        return value


@dataclass(frozen=True, eq=False)
class Ciphertext:
    n: int
    p: int
    base_a: int
    offset: int
    epsilon: float
    digit_count: int
    blocks: tuple = field(default=())

    @property
    def params_echo(self):
        return (self.n, self.base_a, self.offset, self.epsilon, self.p)

    def _header(self):
        return (self.n, self.p, self.base_a, self.offset,
                np.float64(self.epsilon).tobytes(), self.digit_count)

    def __eq__(self, other):
        """Bit-exact comparison of header and blocks."""
        if not isinstance(other, Ciphertext):
            return NotImplemented
        return (
            self._header() == other._header()
            and len(self.blocks) == len(other.blocks)
            and all(np.asarray(a).tobytes() == np.asarray(b).tobytes()
                    for a, b in zip(self.blocks, other.blocks))
        )


def block_count_for(digit_count, n):
    return -(-digit_count // (n - 1))


def digits_of(m, base_a):
    """Little-endian base-``base_a`` digits of a non-negative integer."""
    if base_a < 2:
        raise InvalidBase(f"base must be >= 2, got {base_a}")
    if m < 0:
        raise ValueError("message integer must be non-negative")
    digits = []
    while True:
        m, d = divmod(m, base_a)
        digits.append(d)
        if m == 0:
            return DigitMessage(base_a, digits)


def log_coefficients(digits, offset):
    out = []
    for d in digits:
        if d + offset < 1:
            raise UnencodableDigit(f"digit {d} with offset {offset} has no logarithm")
        out.append(math.log(d + offset))
    return out


def encode_block(digits, x, offset, conjugator=None):
    """``sum_j ln(d_j + offset) * X**(j+1)``.

    When ``conjugator = (P, P_inv)`` with ``X = P J P_inv`` is supplied the sum
    is formed on the Jordan block and conjugated once, which is exact in the
    hidden basis.
    """
    x = mc.as_matrix(x)
    n = x.shape[0]
    if len(digits) > n - 1:
        raise BlockOverflow(f"{len(digits)} digits exceed block capacity {n - 1}")
    coeffs = log_coefficients(digits, offset)

    if conjugator is not None:
        P, P_inv = conjugator
        inner = np.zeros((n, n))
        for j, c in enumerate(coeffs):
            inner += c * np.eye(n, k=j + 1)
        return mc.multiply(mc.multiply(P, inner), P_inv)

    out = np.zeros((n, n))
    power = x.copy()
    for c in coeffs:
        out += c * power
        power = power @ x
    return mc.as_matrix(out)


def jordan_coordinates(block, q):
    return mc.multiply(mc.multiply(mc.invert(q), block), q)


def decode_block(block, q, offset, base_a, expected_len):
    """Read ``expected_len`` digits from a block using Jordan basis ``q``."""
    block = mc.as_matrix(block)
    n = block.shape[0]
    if expected_len > n - 1:
        raise BlockOverflow(f"cannot read {expected_len} digits from an {n}x{n} block")
    y = jordan_coordinates(block, q)

    lower = np.tril(y)
    if np.max(np.abs(lower)) >= STRUCTURE_TOL:
        raise CorruptCiphertext("block is not strictly upper triangular in the Jordan basis")
    for i in range(1, n):
        diag = np.diagonal(y, offset=i)
        if np.ptp(diag) > STRUCTURE_TOL:
            raise CorruptCiphertext(f"superdiagonal {i} is not constant")

    digits = []
    for i in range(1, expected_len + 1):
        try:
            value = math.exp(y[0, i])
        except OverflowError:
            raise DigitOutOfRange(f"coefficient {y[0, i]:.6g} is out of range") from None
        nearest = round(value)
        if abs(value - nearest) > ROUNDING_HALF_WIDTH:
            raise DigitOutOfRange(f"exp(coefficient) = {value:.6g} is not near an integer")
        d = nearest - offset
        if not (0 <= d < base_a):
            raise DigitOutOfRange(f"recovered digit {d} outside [0, {base_a})")
        digits.append(d)
    return digits


def encrypt_message(msg, key):
    params = key.params
    if msg.base_a != params.base_a:
        raise ParamMismatch(f"message base {msg.base_a} != scheme base {params.base_a}")
    cap = params.capacity
    pad = 0 if params.offset >= 1 else 1
    blocks = []
    for start in range(0, msg.digit_count, cap):
        chunk = list(msg.digits[start:start + cap])
        chunk += [pad] * (cap - len(chunk))
        blocks.append(encode_block(chunk, key.X, params.offset, (key.P, key.P_inv)))
    return Ciphertext(
        n=params.n,
        p=params.p,
        base_a=params.base_a,
        offset=params.offset,
        epsilon=float(params.epsilon),
        digit_count=msg.digit_count,
        blocks=tuple(blocks),
    )


def check_consistent(ct):
    if len(ct.blocks) != block_count_for(ct.digit_count, ct.n):
        raise CorruptCiphertext(f"{len(ct.blocks)} blocks cannot hold {ct.digit_count} digits")
    for b in ct.blocks:
        if np.shape(b) != (ct.n, ct.n):
            raise CorruptCiphertext(f"block of shape {np.shape(b)} in an n={ct.n} ciphertext")


def decode_with_basis(ct, q):
    """Decode every block of ``ct`` with Jordan basis ``q``."""
    check_consistent(ct)
    digits = []
    for b in ct.blocks:
        digits.extend(decode_block(b, q, ct.offset, ct.base_a, ct.n - 1))
    return DigitMessage(ct.base_a, digits[:ct.digit_count])


def decrypt_message(ct, key):
    params = key.params
    ours = (params.n, params.base_a, params.offset, float(params.epsilon), params.p)
    if ct.params_echo != ours:
        raise ParamMismatch(f"ciphertext parameters {ct.params_echo} do not match key {ours}")
    return decode_with_basis(ct, mc.jordan_basis_nilpotent(key.X))
