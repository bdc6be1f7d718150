"""Dense real square matrices and nilpotent structure.

Matrices are plain ``numpy`` float64 arrays of shape ``(n, n)``.  Every public
function validates its inputs with :func:`as_matrix` and returns a fresh array,
so callers may treat results as values.
"""

import math

import numpy as np

from .errors import (
    DimensionMismatch,
    ExpDidNotConverge,
    InvalidDimension,
    NonFiniteMatrix,
    NotNilpotent,
    NotSingleBlock,
    SingularMatrix,
)

NILPOTENCY_TOL = 1e-9
PIVOT_TOL = 1e-12
EXP_TOL = 1e-17
EXP_MAX_TERMS = 200


def as_matrix(a):
    """Return ``a`` as a finite, square float64 array (copied)."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidDimension(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrix("matrix has NaN or infinite entries")
    return m


def _checked(m):
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrix("operation produced NaN or infinite entries")
    return m


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape[0]}x{a.shape[0]} vs {b.shape[0]}x{b.shape[0]}")


def identity(n):
    if n < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {n}")
    return np.eye(n)


def standard_jordan_block(n):
    """n x n nilpotent block: ones on the first superdiagonal, zeros elsewhere."""
    if n < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {n}")
    return np.eye(n, k=1)


def multiply(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return _checked(a @ b)


def linear_combine(alpha, a, beta, b):
    """Return ``alpha * a + beta * b``."""
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise NonFiniteMatrix("coefficients must be finite")
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return _checked(alpha * a + beta * b)


def mat_power(a, k):
    """``a**k`` by repeated multiplication (``a**0`` is the identity)."""
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    a = as_matrix(a)
    out = np.eye(a.shape[0])
    for _ in range(k):
        out = out @ a
    return _checked(out)


def invert(a):
    """Inverse by Gauss-Jordan elimination with partial pivoting.

    A pivot smaller than ``1e-12`` times the largest absolute entry of the
    input (or 1 for the zero matrix) is treated as singular.
    """
    a = as_matrix(a)
    n = a.shape[0]
    scale = float(np.max(np.abs(a)))
    threshold = PIVOT_TOL * (scale if scale > 0 else 1.0)

    aug = np.hstack([a, np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[piv, col]) < threshold:
            raise SingularMatrix(f"pivot {aug[piv, col]:.3e} below {threshold:.3e} in column {col}")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        factors = aug[:, col].copy()
        factors[col] = 0.0
        aug -= np.outer(factors, aug[col])
    return _checked(aug[:, n:].copy())


def mat_exp(a):
    """Matrix exponential by plain Taylor summation.

    Terms are added until the next one is negligible relative to the partial
    sum.  Meant for arguments of norm below 1; anything that needs more than
    200 terms raises :class:`ExpDidNotConverge`.
    """
    a = as_matrix(a)
    total = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, EXP_MAX_TERMS + 1):
        term = (term @ a) / k
        ref = np.linalg.norm(total)
        if np.linalg.norm(term) < EXP_TOL * (ref if ref > 0 else 1.0):
            return _checked(total)
        total = total + term
    raise ExpDidNotConverge(f"Taylor series did not converge in {EXP_MAX_TERMS} terms")


def nilpotency_index(x):
    """Smallest k <= n with ``x**k`` numerically zero.

    "Numerically zero" means ``|x**k|_F <= 1e-9 * max(1, |x|_F)**k``.  The
    zero matrix has index 1.
    """
    x = as_matrix(x)
    n = x.shape[0]
    growth = max(1.0, float(np.linalg.norm(x)))
    power = np.eye(n)
    for k in range(1, n + 1):
        power = power @ x
        if np.linalg.norm(power) <= NILPOTENCY_TOL * growth**k:
            return k
    raise NotNilpotent(f"no power up to {n} vanishes")


def jordan_basis_nilpotent(x):
    """Jordan basis ``Q`` of a single-block nilpotent ``x``.

    Columns are ``[x^(n-1) v, ..., x v, v]`` where ``v`` is the canonical
    vector with the largest ``|x^(n-1) e_j|`` (lowest ``j`` on ties), so that
    ``Q^-1 x Q`` is the standard Jordan block.
    """
    x = as_matrix(x)
    n = x.shape[0]
    try:
        index = nilpotency_index(x)
    except NotNilpotent:
        raise NotSingleBlock("matrix is not nilpotent") from None
    if index != n:
        raise NotSingleBlock(f"nilpotency index {index} != dimension {n}")

    top = mat_power(x, n - 1)
    j = int(np.argmax(np.linalg.norm(top, axis=0)))  # argmax picks the first maximum
    cols = [np.eye(n)[:, j]]
    for _ in range(n - 1):
        cols.append(x @ cols[-1])
    q = np.column_stack(cols[::-1])
    invert(q)  # surfaces SingularMatrix
    return _checked(q)
