"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed
in the terminal summary."""

import math
import random
import threading
import time

import numpy as np
import pytest

from nilcrypt import formats, netpeer
from nilcrypt import matrixcore as mc
from nilcrypt.codec import (
    Ciphertext,
    DigitMessage,
    decode_block,
    decrypt_message,
    digits_of,
    encode_block,
    encrypt_message,
)
from nilcrypt.cryptanalysis import brute_force_K, kpa_decrypt, kpa_recover_X, work_estimate
from nilcrypt.keyschedule import build_shared_key, shift_matrix
from nilcrypt.modarith import DHParams, dh_public, dh_shared
from nilcrypt.netpeer import Frame, Kind, frame_decode, frame_encode

from conftest import make_key, make_params, toeplitz_upper
from test_formats import random_ciphertext

ROUND_TRIP_PRIMES = [7, 101, 1009, 65537, 2147483629]
SEED = 20261016


@pytest.mark.criterion(1, "worked encoding example: ln 2 / ln 3 layout within 1e-12")
def test_c1_paper_encoding():
    start = time.perf_counter()
    msg = digits_of(2 * 4 + 3 * 4**2, 4)
    assert msg.digits == (0, 2, 3)
    block = encode_block(msg.digits[1:], mc.standard_jordan_block(3), 0)
    ln2, ln3 = math.log(2), math.log(3)
    for (i, j), want in {(0, 1): ln2, (1, 2): ln2, (0, 2): ln3}.items():
        assert abs(block[i, j] - want) <= 1e-12
        block[i, j] = 0.0
    assert not np.any(block)
    # displayed as 0,6932... / 1,0986... (truncated display of the same values)
    assert abs(ln2 - 0.6932) < 1e-3 and abs(ln3 - 1.0986) < 1e-4
    assert time.perf_counter() - start < 0.5


@pytest.mark.criterion(2, "worked key exchange: p=7, x=4, a=2, b=4 gives 2, 4, K=2")
def test_c2_paper_key_exchange():
    dh = DHParams(7, 4)
    pub_a, pub_b = dh_public(dh, 2), dh_public(dh, 4)
    assert (pub_a, pub_b) == (2, 4)
    assert dh_shared(dh, 2, pub_b) == 2
    assert dh_shared(dh, 4, pub_a) == 2


@pytest.mark.criterion(3, "1000 random round trips, zero failures, < 30 s")
def test_c3_round_trip():
    r = random.Random(SEED)
    start = time.perf_counter()
    failures = 0
    for _ in range(1000):
        n = r.randint(2, 12)
        p = r.choice(ROUND_TRIP_PRIMES)
        base = r.choice([2, 10, 256])
        key = make_key(n, p, r.randint(2, p - 1), base=base, offset=1)
        msg = DigitMessage(base, [r.randrange(base) for _ in range(r.randint(0, 3 * n))])
        if decrypt_message(encrypt_message(msg, key), key) != msg:
            failures += 1
    elapsed = time.perf_counter() - start
    assert failures == 0
    assert elapsed < 30


@pytest.mark.criterion(4, "key schedule: dominance, P P^-1 = I within 1e-10, index n; < 10 s")
def test_c4_key_schedule():
    r = random.Random(SEED + 4)
    start = time.perf_counter()
    for _ in range(100):
        n = r.randint(2, 12)
        p = r.choice(ROUND_TRIP_PRIMES)
        params = make_params(n, p)
        key = build_shared_key(r.randint(2, p - 1), params)
        s = shift_matrix(key.A, params)
        off = np.sum(np.abs(s), axis=1) - np.abs(np.diag(s))
        assert np.all(np.abs(np.diag(s)) > off)
        assert np.max(np.abs(key.P @ key.P_inv - np.eye(n))) <= 1e-10
        assert mc.nilpotency_index(key.X) == n
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(5, "Jordan-basis independence over 100 keys; < 10 s")
def test_c5_basis_independence():
    rng = np.random.default_rng(SEED + 5)
    start = time.perf_counter()
    for _ in range(100):
        n = int(rng.integers(2, 13))
        p = int(rng.choice(ROUND_TRIP_PRIMES))
        key = make_key(n, p, int(rng.integers(2, p)))
        digits = [int(d) for d in rng.integers(0, 256, n - 1)]
        block = encode_block(digits, key.X, 1, (key.P, key.P_inv))
        q = mc.jordan_basis_nilpotent(key.X)
        coeffs = rng.uniform(-1, 1, n)
        coeffs[0] = rng.choice([-1, 1]) * rng.uniform(0.5, 2)
        qt = q @ toeplitz_upper(coeffs)
        assert decode_block(block, q, 1, 256, n - 1) == decode_block(block, qt, 1, 256, n - 1) == digits
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(6, "known-plaintext break: X within 1e-6, unseen block decrypted; < 10 s")
def test_c6_known_plaintext():
    rng = np.random.default_rng(SEED + 6)
    start = time.perf_counter()
    for _ in range(50):
        n = int(rng.integers(2, 9))
        p = int(rng.choice(ROUND_TRIP_PRIMES))
        key = make_key(n, p, int(rng.integers(2, p)))
        cap = n - 1
        first = [int(rng.integers(1, 256))] + [int(d) for d in rng.integers(0, 256, cap - 1)]
        second = [int(d) for d in rng.integers(0, 256, cap)]
        ct = encrypt_message(DigitMessage(256, first + second), key)

        x_hat = kpa_recover_X(ct.blocks[0], first, 1)
        rel = np.linalg.norm(x_hat - key.X) / max(1.0, np.linalg.norm(key.X))
        assert rel <= 1e-6

        unseen = Ciphertext(ct.n, ct.p, ct.base_a, ct.offset, ct.epsilon, cap, ct.blocks[1:])
        assert list(kpa_decrypt(unseen, x_hat).digits) == second
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(7, "brute force n=2, p=101: true K found in <= 99 trials, estimate reported")
def test_c7_brute_force():
    r = random.Random(SEED + 7)
    params = make_params(2, 101)
    for _ in range(10):
        k = r.randint(2, 100)
        msg = DigitMessage(256, [r.randrange(1, 256) for _ in range(r.randint(1, 6))])
        report = brute_force_K(encrypt_message(msg, build_shared_key(k, params)), params)
        assert k in report.recovered
        assert 1 <= report.trials <= 99
        assert report.estimate == work_estimate(2, 1.0, 256)
        text = "\n".join(report.lines())
        assert f"trials: {report.trials}" in text
        assert f"claimed_work_estimate: {report.estimate!r}" in text


@pytest.mark.criterion(8, "TCP loopback demo with the worked parameters; < 5 s")
def test_c8_wire_demo():
    params = make_params(3, 7, x=4, base=4)
    start = time.perf_counter()
    result = {}
    with netpeer.open_listener("127.0.0.1", 0) as listener:
        port = listener.getsockname()[1]

        def listen():
            conn, _ = listener.accept()
            conn.settimeout(5)
            with conn:
                result["bob"] = netpeer.responder_session(conn, params, 4)

        t = threading.Thread(target=listen)
        t.start()
        with netpeer.connect("127.0.0.1", port, timeout=5) as sock:
            result["alice"] = netpeer.initiator_session(sock, params, 2, digits_of(56, 4))
        t.join(5)

    bob_key, received = result["bob"]
    alice_key = result["alice"]
    assert alice_key.X.tobytes() == bob_key.X.tobytes()
    assert received.digits == (0, 2, 3)
    assert time.perf_counter() - start < 5


@pytest.mark.criterion(9, "ciphertext file and frame round trips bit-exact x1000; < 5 s")
def test_c9_serialization():
    rng = np.random.default_rng(SEED + 9)
    start = time.perf_counter()
    for _ in range(1000):
        ct = random_ciphertext(rng)
        data = formats.encode_ciphertext(ct)
        back = formats.decode_ciphertext(data)
        assert back == ct and formats.encode_ciphertext(back) == data

        frame = Frame(Kind(int(rng.choice([1, 2, 3, 0x7F]))), rng.bytes(int(rng.integers(0, 4097))))
        wire = frame_encode(frame)
        assert frame_decode(wire) == frame and frame_encode(frame_decode(wire)) == wire
    assert time.perf_counter() - start < 5
