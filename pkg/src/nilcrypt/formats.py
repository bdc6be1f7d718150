"""On-disk formats: key files and ciphertext files.

Ciphertext file (all little-endian)::

    magic "NILM" | version u8 = 1 | n u32 | p u64 | base_a u64 | offset u32
    | epsilon f64 | digit_count u64 | block_count u64
    | block_count * n * n f64, row-major, blocks in order
"""

import struct

import numpy as np

from .codec import Ciphertext, block_count_for
from .errors import CorruptCiphertext, InvalidParams
from .modarith import DHKeyPair, DHParams

MAGIC = b"NILM"
VERSION = 1
HEADER = struct.Struct("<4sBIQQIdQQ")


def encode_ciphertext(ct):
    header = HEADER.pack(
        MAGIC, VERSION, ct.n, ct.p, ct.base_a, ct.offset, ct.epsilon,
        ct.digit_count, len(ct.blocks),
    )
    body = b"".join(np.ascontiguousarray(b, dtype="<f8").tobytes() for b in ct.blocks)
    return header + body


def decode_ciphertext(data):
    data = bytes(data)
    if len(data) < HEADER.size:
        raise CorruptCiphertext(f"ciphertext is {len(data)} bytes, shorter than the {HEADER.size}-byte header")
    magic, version, n, p, base_a, offset, epsilon, digit_count, block_count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptCiphertext(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptCiphertext(f"unsupported version {version}")
    if not 2 <= n <= 64:
        raise CorruptCiphertext(f"block dimension {n} out of range")
    if block_count != block_count_for(digit_count, n):
        raise CorruptCiphertext(f"block count {block_count} inconsistent with {digit_count} digits")
    expected = HEADER.size + block_count * n * n * 8
    if len(data) != expected:
        raise CorruptCiphertext(f"ciphertext is {len(data)} bytes, header promises {expected}")

    values = np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise CorruptCiphertext("ciphertext contains non-finite values")
    blocks = tuple(values.reshape(block_count, n, n)) if block_count else ()
    return Ciphertext(n, p, base_a, offset, epsilon, digit_count, blocks)


def write_ciphertext(path, ct):
    with open(path, "wb") as fh:
        fh.write(encode_ciphertext(ct))


def read_ciphertext(path):
    with open(path, "rb") as fh:
        return decode_ciphertext(fh.read())


def format_keyfile(pair):
    return f"{pair.params.p}\n{pair.params.x}\n{pair.secret}\n"


def parse_keyfile(text):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 3:
        raise InvalidParams(f"key file must hold exactly 3 lines (p, x, secret), found {len(lines)}")
    try:
        p, x, secret = (int(s.strip()) for s in lines)
    except ValueError:
        raise InvalidParams("key file lines must be decimal integers") from None
    return DHKeyPair.from_secret(DHParams(p, x), secret)


def write_keyfile(path, pair):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_keyfile(pair))


def read_keyfile(path):
    with open(path) as fh:
        return parse_keyfile(fh.read())
