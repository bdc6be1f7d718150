"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 crypto/parameter error, 4 I/O error,
5 integrity/decode error.
"""

import argparse
import json
import logging
import random
import sys

from . import formats, netpeer
from .codec import DigitMessage, decrypt_message, digits_of, encode_block, encrypt_message
from .cryptanalysis import brute_force_K, known_plaintext_attack, work_estimate
from .errors import NilcryptError
from .keyschedule import SchemeParams, build_shared_key
from .matrixcore import standard_jordan_block
from .modarith import DHKeyPair, DHParams, dh_public, dh_shared

EXIT_USAGE = 2
EXIT_IO = 4


class UsageError(Exception):
    pass


def _scheme_args(p):
    p.add_argument("--n", type=int, required=True, help="block dimension")
    p.add_argument("--base", type=int, default=256, help="message radix (default 256)")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--offset", type=int, default=1)


def _plaintext_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--in", dest="infile", help="byte file (base 256 only)")
    g.add_argument("--int", dest="integer", help="message as a decimal integer")


def build_parser():
    parser = argparse.ArgumentParser(prog="nilcrypt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="write a key file")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--secret", type=int)
    g.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pubkey", help="print x^secret mod p")
    p.add_argument("--key", required=True)

    p = sub.add_parser("encrypt")
    p.add_argument("--key", required=True)
    p.add_argument("--peer", type=int, required=True, help="peer public value")
    _scheme_args(p)
    _plaintext_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("decrypt")
    p.add_argument("--key", required=True)
    p.add_argument("--peer", type=int, required=True)
    p.add_argument("--in", dest="infile", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--out")
    g.add_argument("--print-int", action="store_true")

    p = sub.add_parser("estimate", help="claimed work estimate exp(n^2 (1/eps + ln a))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--base", type=int, required=True)

    p = sub.add_parser("attack-kpa", help="known-plaintext attack on a ciphertext file")
    p.add_argument("--cipher", required=True)
    p.add_argument("--plain", required=True, help="comma-separated digits of the first block")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("attack-brute", help="enumerate the shared value K")
    p.add_argument("--cipher", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--plain", help="optional crib: comma-separated digits")
    p.add_argument("--json", action="store_true")

    sub.add_parser("demo-paper", help="reproduce the worked examples")

    for name in ("peer-listen", "peer-connect"):
        p = sub.add_parser(name)
        p.add_argument("--host", default="" if name == "peer-listen" else "localhost")
        p.add_argument("--port", type=int, default=netpeer.DEFAULT_PORT)
        p.add_argument("--key", required=True)
        _scheme_args(p)
        p.add_argument("--timeout", type=float, default=30.0)
        if name == "peer-listen":
            p.add_argument("--sessions", type=int, default=1)
            p.add_argument("--out", help="write received bytes here (base 256 only)")
        else:
            _plaintext_args(p)
    return parser


def _scheme(args, dh):
    return SchemeParams(args.n, dh, args.base, args.epsilon, args.offset)


def _load_message(args, base):
    if args.infile is not None:
        if base != 256:
            raise UsageError("--in byte mode requires --base 256")
        with open(args.infile, "rb") as fh:
            return DigitMessage(256, fh.read())
    try:
        m = int(args.integer)
    except ValueError:
        raise UsageError(f"--int expects a decimal integer, got {args.integer!r}") from None
    if m < 0:
        raise UsageError("--int must be non-negative")
    return digits_of(m, base)


def _parse_digits(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated digits, got {text!r}") from None


def _emit_message(msg, out, stdout):
    if out:
        if msg.base_a != 256:
            raise UsageError("--out byte mode requires base 256")
        with open(out, "wb") as fh:
            fh.write(bytes(msg.digits))
    else:
        print(msg.to_int(), file=stdout)


def _report(report, as_json, stdout):
    if as_json:
        print(json.dumps(report.to_json_dict()), file=stdout)
    else:
        for line in report.lines():
            print(line, file=stdout)


def cmd_keygen(args, stdout):
    params = DHParams(args.p, args.x)
    if args.secret is not None:
        pair = DHKeyPair.from_secret(params, args.secret)
    else:
        pair = DHKeyPair.generate(params, random.Random(args.seed))
    formats.write_keyfile(args.out, pair)
    print(pair.public, file=stdout)


def cmd_pubkey(args, stdout):
    print(formats.read_keyfile(args.key).public, file=stdout)


def _shared_key(args, params_from):
    pair = formats.read_keyfile(args.key)
    params = params_from(pair.params)
    k = dh_shared(pair.params, pair.secret, args.peer)
    return build_shared_key(k, params)


def cmd_encrypt(args, stdout):
    key = _shared_key(args, lambda dh: _scheme(args, dh))
    ct = encrypt_message(_load_message(args, args.base), key)
    formats.write_ciphertext(args.out, ct)


def cmd_decrypt(args, stdout):
    ct = formats.read_ciphertext(args.infile)

    def params_from(dh):
        if dh.p != ct.p:
            raise UsageError(f"key modulus {dh.p} differs from ciphertext modulus {ct.p}")
        return SchemeParams(ct.n, dh, ct.base_a, ct.epsilon, ct.offset)

    msg = decrypt_message(ct, _shared_key(args, params_from))
    _emit_message(msg, args.out, stdout)


def cmd_estimate(args, stdout):
    print(repr(work_estimate(args.n, args.epsilon, args.base)), file=stdout)


def cmd_attack_kpa(args, stdout):
    ct = formats.read_ciphertext(args.cipher)
    if not ct.blocks:
        raise UsageError("ciphertext has no blocks")
    _report(known_plaintext_attack(ct, _parse_digits(args.plain)), args.json, stdout)


def cmd_attack_brute(args, stdout):
    ct = formats.read_ciphertext(args.cipher)
    params = SchemeParams(ct.n, DHParams(ct.p, args.x), ct.base_a, ct.epsilon, ct.offset)
    crib = _parse_digits(args.plain) if args.plain else None
    _report(brute_force_K(ct, params, crib), args.json, stdout)


def cmd_demo_paper(args, stdout):
    out = lambda *a: print(*a, file=stdout)  # noqa: E731

    msg = digits_of(56, 4)
    out("Encoding: M = 56 = 2*4 + 3*4^2, base 4")
    out(f"  digits (little-endian): {list(msg.digits)}")
    out("  X = standard Jordan block, n = 3, offset 0 (digit 0 dropped)")
    block = encode_block(msg.digits[1:], standard_jordan_block(3), 0)
    for row in block:
        out("  [" + ", ".join(f"{v:.15f}" for v in row) + "]")
    out(f"  ln 2 = {float(block[0, 1])!r}, ln 3 = {float(block[0, 2])!r}")

    dh = DHParams(7, 4)
    a, b = 2, 4
    pub_a, pub_b = dh_public(dh, a), dh_public(dh, b)
    k = dh_shared(dh, a, pub_b)
    out("Key exchange: p = 7, x = 4")
    out(f"  A = 4^{a} mod 7 = {pub_a}")
    out(f"  B = 4^{b} mod 7 = {pub_b}")
    out(f"  K = 4^{a * b} mod 7 = {k}")
    out(f"  K = {k} (Bob's side: {dh_shared(dh, b, pub_a)})")


def cmd_peer_listen(args, stdout):
    pair = formats.read_keyfile(args.key)
    params = _scheme(args, pair.params)
    if args.out and args.sessions != 1:
        raise UsageError("--out can only be used with --sessions 1")
    with netpeer.open_listener(args.host, args.port) as listener:
        host, port = listener.getsockname()[:2]
        print(f"listening on port {port}", file=sys.stderr, flush=True)

        def on_message(key, msg):
            _emit_message(msg, args.out, stdout)
            stdout.flush()

        errors = netpeer.serve(listener, params, pair.secret, on_message, args.sessions, args.timeout)
    if errors:
        raise errors[0]


def cmd_peer_connect(args, stdout):
    pair = formats.read_keyfile(args.key)
    params = _scheme(args, pair.params)
    msg = _load_message(args, args.base)
    sock = netpeer.connect(args.host, args.port, args.timeout)
    with sock:
        netpeer.initiator_session(sock, params, pair.secret, msg)


COMMANDS = {
    "keygen": cmd_keygen,
    "pubkey": cmd_pubkey,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "estimate": cmd_estimate,
    "attack-kpa": cmd_attack_kpa,
    "attack-brute": cmd_attack_brute,
    "demo-paper": cmd_demo_paper,
    "peer-listen": cmd_peer_listen,
    "peer-connect": cmd_peer_connect,
}


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(f"nilcrypt: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NilcryptError as exc:
        print(f"nilcrypt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"nilcrypt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def main_entry():
    sys.exit(main())
