"""Modular arithmetic and the Diffie-Hellman exchange."""

from dataclasses import dataclass

from .errors import DegenerateKey, InvalidExponent, InvalidModulus, InvalidParams

MAX_MODULUS = 2**31
_WITNESSES = (2, 3, 5, 7)


def mod_pow(base, exp, p):
    """``base**exp mod p`` by right-to-left square-and-multiply."""
    if p < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {p}")
    if exp < 0:
        raise InvalidExponent(f"exponent must be >= 0, got {exp}")
    result = 1 % p
    base %= p
    while exp:
        if exp & 1:
            result = result * base % p
        base = base * base % p
        exp >>= 1
    return result


def is_prime(m):
    """Deterministic Miller-Rabin, exact for m < 3,215,031,751."""
    if m < 2:
        return False
    for w in _WITNESSES:
        if m == w:
            return True
        if m % w == 0:
            return False
    d, r = m - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _WITNESSES:
        y = mod_pow(a, d, m)
        if y == 1 or y == m - 1:
            continue
        for _ in range(r - 1):
            y = y * y % m
            if y == m - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class DHParams:
    p: int
    x: int

    def __post_init__(self):
        if not (3 <= self.p < MAX_MODULUS) or not is_prime(self.p):
            raise InvalidParams(f"p must be a prime in [3, 2^31), got {self.p}")
        if not (2 <= self.x <= self.p - 2):
            raise InvalidParams(f"base x must lie in [2, p-2], got {self.x}")


@dataclass(frozen=True)
class DHKeyPair:
    params: DHParams
    secret: int
    public: int

    @classmethod
    def from_secret(cls, params, secret):
        return cls(params, secret, dh_public(params, secret))

    @classmethod
    def generate(cls, params, rng):
        """Draw a secret uniformly from [1, p-1] using ``rng`` (a ``random.Random``)."""
        return cls.from_secret(params, rng.randint(1, params.p - 1))


def _check_secret(params, secret):
    if not (1 <= secret < params.p):
        raise InvalidExponent(f"secret must lie in [1, p), got {secret}")


def dh_public(params, secret):
    _check_secret(params, secret)
    return mod_pow(params.x, secret, params.p)


def dh_shared(params, secret, other_public):
    """Shared value ``other_public**secret mod p``; K <= 1 is rejected."""
    _check_secret(params, secret)
    if not (1 <= other_public < params.p):
        raise InvalidExponent(f"peer public value must lie in [1, p), got {other_public}")
    k = mod_pow(other_public, secret, params.p)
    if k <= 1:
        raise DegenerateKey(f"shared value K={k} is degenerate; choose new secrets")
    return k
