"""From a shared Diffie-Hellman value to the secret nilpotent matrix.

The scalar K is spread over an n x n integer matrix ``A`` of consecutive powers
of K mod p.  The conjugator is ``P = exp(S^-1)`` with ``S = (n p + eps) I - A``,
and the secret matrix is ``X = P J P^-1`` for the standard Jordan block ``J``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import matrixcore as mc
from .errors import DegenerateKey, DimensionMismatch, InvalidParams, NotNilpotent, NotSingleBlock
from .modarith import DHParams, mod_pow

MAX_BASE = 2**64 - 1


@dataclass(frozen=True)
class SchemeParams:
    """Everything both parties agree on besides their secrets."""

    n: int
    dh: DHParams
    base_a: int = 256
    epsilon: float = 1.0
    offset: int = 1

    def __post_init__(self):
        if not (2 <= self.n <= 64):
            raise InvalidParams(f"block dimension n must lie in [2, 64], got {self.n}")
        if not (2 <= self.base_a <= MAX_BASE):
            raise InvalidParams(f"base must lie in [2, 2^64-1], got {self.base_a}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise InvalidParams(f"epsilon must be a positive finite real, got {self.epsilon}")
        # offset 0 is legal; digits >= 1 are then enforced by the codec
        if self.offset < 0 or self.offset >= 2**32:
            raise InvalidParams(f"offset must lie in [0, 2^32), got {self.offset}")

    @property
    def p(self):
        return self.dh.p

    @property
    def capacity(self):
        """Digits carried per block."""
        return self.n - 1


@dataclass(frozen=True, eq=False)
class SharedMatrixKey:
    params: SchemeParams
    A: np.ndarray
    P: np.ndarray
    P_inv: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        for arr in (self.A, self.P, self.P_inv, self.X):
            arr.flags.writeable = False


def derive_A(k, params):
    """Integer matrix with ``A[i][j] = k**(i*n + j + 1) mod p``."""
    p, n = params.p, params.n
    if not (2 <= k < p):
        raise DegenerateKey(f"shared value must lie in [2, p), got {k}")
    a = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            a[i, j] = mod_pow(k, i * n + j + 1, p)
    return a


def shift_matrix(a, params):
    """``(n p + eps) I - A``, strictly diagonally dominant for A in [0, p)."""
    n = params.n
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (n, n):
        raise DimensionMismatch(f"coefficient matrix has shape {a.shape}, expected {(n, n)}")
    return (n * params.p + params.epsilon) * np.eye(n) - a


def conjugator(a, params):
    """Return ``(P, P_inv)`` with ``P = exp(S^-1)`` and ``P_inv = exp(-S^-1)``."""
    # out-of-range A is not rejected here; a singular S surfaces from invert
    s_inv = mc.invert(shift_matrix(a, params))
    return mc.mat_exp(s_inv), mc.mat_exp(-s_inv)


def derive_X(P, P_inv, n):
    x = mc.multiply(mc.multiply(P, mc.standard_jordan_block(n)), P_inv)
    try:
        index = mc.nilpotency_index(x)
    except NotNilpotent:
        index = None
    if index != n:
        raise NotSingleBlock("conjugated block lost its nilpotency structure")
    return x


def build_shared_key(k, params):
    a = derive_A(k, params)
    P, P_inv = conjugator(a, params)
    return SharedMatrixKey(params, a, P, P_inv, derive_X(P, P_inv, params.n))
