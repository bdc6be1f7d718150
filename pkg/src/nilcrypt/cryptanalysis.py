"""Attacks on the scheme and the claimed work estimate they are measured against."""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import matrixcore as mc
from .codec import decode_block, decode_with_basis, log_coefficients
from .errors import (
    CorruptCiphertext,
    DigitOutOfRange,
    InvalidEpsilon,
    LeadingCoefficientZero,
    NoSolution,
    NotSingleBlock,
    ParameterTooLarge,
)
from .keyschedule import build_shared_key
from .modarith import mod_pow

BRUTE_FORCE_MAX_P = 10**6


@dataclass
class AttackReport:
    method: str
    trials: int
    elapsed: float
    recovered: Optional[Any] = None
    estimate: float = math.nan
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        rec = self.recovered
        if isinstance(rec, np.ndarray):
            rec = rec.tolist()
        elif isinstance(rec, dict):
            rec = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in rec.items()}
        estimate = self.estimate if math.isfinite(self.estimate) else str(self.estimate)
        return {
            "method": self.method,
            "trials": self.trials,
            "elapsed_seconds": self.elapsed,
            "recovered": rec,
            "estimate": estimate,
        }

    def lines(self):
        out = [
            f"method: {self.method}",
            f"trials: {self.trials}",
            f"elapsed_seconds: {self.elapsed:.6f}",
            f"claimed_work_estimate: {self.estimate!r}",
        ]
        if isinstance(self.recovered, dict):
            for k, v in self.recovered.items():
                out.append(f"recovered_{k}: {np.asarray(v).tolist() if isinstance(v, np.ndarray) else v}")
        else:
            out.append(f"recovered: {self.recovered}")
        out.extend(f"note: {n}" for n in self.notes)
        return out


def work_estimate(n, epsilon, base_a):
    """``exp(n^2 (1/eps + ln a))``; overflows to ``inf`` rather than raising."""
    if not epsilon > 0:
        raise InvalidEpsilon(f"epsilon must be positive, got {epsilon}")
    try:
        return math.exp(n * n * (1.0 / epsilon + math.log(base_a)))
    except OverflowError:
        return math.inf


def _factorize(m):
    factors = set()
    d = 2
    while d * d <= m:
        while m % d == 0:
            factors.add(d)
            m //= d
        d += 1
    if m > 1:
        factors.add(m)
    return factors


def multiplicative_order(x, p):
    order = p - 1
    for q in _factorize(p - 1):
        while order % q == 0 and mod_pow(x, order // q, p) == 1:
            order //= q
    return order


def dlog_bsgs(x, y, p):
    """Smallest ``e >= 0`` with ``x**e == y (mod p)`` by baby-step giant-step."""
    y %= p
    order = multiplicative_order(x, p)
    m = math.isqrt(order - 1) + 1 if order > 1 else 1

    table = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * x % p
    stride = mod_pow(x, order - m % order, p)  # x^-m inside the subgroup
    cur = y
    for i in range(m):
        if cur in table:
            e = i * m + table[cur]
            if e < order:
                return e
        cur = cur * stride % p
    raise NoSolution(f"{y} is not a power of {x} modulo {p}")


def reversion_coefficients(coeffs, n):
    """Compositional inverse of ``f(t) = sum_k coeffs[k] t^(k+1)`` modulo ``t^n``.

    Returns ``b`` with ``sum_k b[k] f(t)^(k+1) = t + O(t^n)``.
    """
    m = n - 1
    f = np.zeros(n)
    f[1:len(coeffs) + 1] = coeffs[:m]
    if f[1] == 0:
        raise LeadingCoefficientZero("first coefficient is zero; the series cannot be inverted")

    # powers[k] = f^(k+1) truncated to degree < n
    powers = [f]
    for _ in range(1, m):
        powers.append(np.convolve(powers[-1], f)[:n])

    b = np.zeros(m)
    for deg in range(1, n):
        acc = sum(b[k] * powers[k][deg] for k in range(deg - 1))
        target = 1.0 if deg == 1 else 0.0
        b[deg - 1] = (target - acc) / powers[deg - 1][deg]
    return b


def kpa_recover_X(ct_block, known_digits, offset):
    """Recover the secret nilpotent matrix from one block and its plaintext.

    The block is a polynomial in X with known coefficients; inverting that
    polynomial as a truncated power series expresses X as a polynomial in the
    block itself.
    """
    block = mc.as_matrix(ct_block)
    n = block.shape[0]
    digits = list(known_digits)[:n - 1]
    if not digits or digits[0] + offset == 1:
        raise LeadingCoefficientZero("first known digit encodes to coefficient zero")
    coeffs = log_coefficients(digits, offset)
    b = reversion_coefficients(coeffs, n)

    x_hat = np.zeros((n, n))
    power = block.copy()
    for bk in b:
        x_hat += bk * power
        power = power @ block
    return mc.as_matrix(x_hat)


def kpa_decrypt(other_ct, x_hat):
    """Decrypt any ciphertext under the key whose X was recovered."""
    return decode_with_basis(other_ct, mc.jordan_basis_nilpotent(x_hat))


def known_plaintext_attack(ct, known_digits):
    """Full known-plaintext break: recover X from block 0, decrypt everything."""
    start = time.perf_counter()
    x_hat = kpa_recover_X(ct.blocks[0], known_digits, ct.offset)
    msg = kpa_decrypt(ct, x_hat)
    return AttackReport(
        method="known-plaintext-reversion",
        trials=1,
        elapsed=time.perf_counter() - start,
        recovered={"X": x_hat, "digits": list(msg.digits)},
        estimate=work_estimate(ct.n, ct.epsilon, ct.base_a),
    )


def brute_force_K(ct, params, verify_digits=None):
    """Enumerate every shared value K in [2, p-1] against the first block.

    A candidate is accepted when all decode integrity checks pass and, if a
    crib is given, the decoded digits start with it.
    """
    if params.p > BRUTE_FORCE_MAX_P:
        raise ParameterTooLarge(f"p={params.p} exceeds the enumeration cap {BRUTE_FORCE_MAX_P}")
    start = time.perf_counter()
    found = []
    trials = 0
    cap = params.n - 1
    crib = list(verify_digits)[:cap] if verify_digits is not None else None
    first = ct.blocks[0] if ct.blocks else None
    expected = min(cap, ct.digit_count)
    for k in range(2, params.p):
        trials += 1
        if first is None:
            found.append(k)
            continue
        try:
            key = build_shared_key(k, params)
            q = mc.jordan_basis_nilpotent(key.X)
            digits = decode_block(first, q, params.offset, params.base_a, expected)
        except (CorruptCiphertext, DigitOutOfRange, NotSingleBlock):
            continue
        if crib is None or digits[:len(crib)] == crib:
            found.append(k)

    notes = ["attacked model: single shared scalar K expanded by consecutive powers"]
    if len(found) > 1:
        notes.append(f"{len(found)} candidates pass the integrity checks; supply a crib to disambiguate")
    return AttackReport(
        method="brute-force-K",
        trials=trials,
        elapsed=time.perf_counter() - start,
        recovered=found,
        estimate=work_estimate(params.n, params.epsilon, params.base_a),
        notes=notes,
    )
