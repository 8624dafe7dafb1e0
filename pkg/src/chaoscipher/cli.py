"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data/format error, 4 self-test failure.
"""
import argparse
import json
import sys
from io import StringIO
from pathlib import Path

import numpy as np

from chaoscipher import classical, io, selftest
from chaoscipher.attacks import BfaConfig, brute_force_key, build_histogram_model, coa_confusion
from chaoscipher.channel import ber_sweep
from chaoscipher.cipher import (CipherFormatError, CipherParams, SecretKey, Thresholds,
                                calibrate_thresholds, decode, encode)
from chaoscipher.detectors import DETECTORS
from chaoscipher.dynamics import DEFAULT_A, critical_coupling, sync_sweep

EXIT_USAGE, EXIT_DATA, EXIT_SELFTEST = 2, 3, 4


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror}") from None


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _key(text):
    if text is None:
        raise UsageError("--key is required")
    try:
        return SecretKey.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params(args, block_len=None):
    try:
        return CipherParams(args.a, args.delta, block_len or args.block_len,
                            getattr(args, "transient", 0) or 0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _note(msg):
    print(msg, file=sys.stderr)


def text_to_bits(data):
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_text(bits):
    bits = np.asarray(bits, dtype=np.uint8)
    usable = bits.size - bits.size % 8
    return np.packbits(bits[:usable]).tobytes()


def _bit_string(text):
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise UsageError("--bits must be a non-empty string of 0 and 1")
    return np.array([int(c) for c in text], dtype=np.uint8)


# --- subcommands --------------------------------------------------------------

def cmd_sync_sweep(args):
    if args.deltas is not None:
        try:
            deltas = [float(d) for d in args.deltas.split(",")]
        except ValueError:
            raise UsageError("--deltas must be comma-separated numbers") from None
    else:
        if args.delta_step <= 0:
            raise UsageError("--delta-step must be positive")
        count = int(round((args.delta_max - args.delta_min) / args.delta_step)) + 1
        deltas = [round(args.delta_min + i * args.delta_step, 10) for i in range(count)]
    try:
        rows = sync_sweep(args.a, deltas, args.series_len, args.transient,
                          random_state=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(io.sweep_table(rows, args.format), args.out)
    _note(f"delta_c (mean|x-y| < 1e-6): {critical_coupling(rows)}")


def cmd_send(args):
    key = _key(args.key)
    if (args.bits is None) == (args.text is None):
        raise UsageError("give exactly one of --bits or --text")
    bits = _bit_string(args.bits) if args.bits is not None else text_to_bits(
        _read(args.text).encode("utf-8"))
    if bits.size == 0:
        raise UsageError("message is empty")
    ct = encode(bits, key, _params(args), random_state=args.seed)
    _emit(io.format_ciphertext(ct), args.out)


def cmd_receive(args):
    key = _key(args.key)
    try:
        ct = io.parse_ciphertext(_read(args.ciphertext))
    except CipherFormatError as exc:
        raise DataError(f"{args.ciphertext}: {exc}") from None
    try:
        params = CipherParams(ct.a, ct.delta, ct.block_len or args.block_len, args.transient)
        thr = Thresholds(args.thr_te, args.thr_mi, args.thr_cc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    truth = _bit_string(args.truth) if args.truth else None
    report = decode(ct, key, params, thr, truth=truth)
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        header = ("block", "cc", "mi", "te", "bit_te", "bit_mi", "bit_cc")
        rows = [[i, v.cc, v.mi, v.te, *(int(report.bits[d][i]) for d in DETECTORS)]
                for i, v in enumerate(report.values)]
        text = io.table_text(header, rows)
    _emit(text, args.out)
    for d in DETECTORS:
        _note(f"{d}: {''.join(map(str, report.bits[d]))}")


def cmd_calibrate(args):
    try:
        cal = calibrate_thresholds(_params(args), args.ensemble, key_source=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for name in ("mixed", "null", "coupled"):
        st = getattr(cal, name)
        rows += [[name, st.size, d, st.mean[d], st.std[d]] for d in DETECTORS]
    rows += [["proposed", cal.mixed.size, d, cal.proposed[d], 0.0] for d in DETECTORS]
    _emit(io.table_text(("ensemble", "size", "detector", "mean", "std"), rows, args.format),
          args.out)


def cmd_ber(args):
    sigmas = [float(s) for s in args.sigmas.split(",")]
    try:
        curve = ber_sweep(args.message_len, args.trials, sigmas, _params(args),
                          seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(io.ber_table(curve, args.format), args.out)
    for d in DETECTORS:
        _note(f"SNR*({d}) = {curve.snr_star(d)}")


def cmd_coa(args):
    params = _params(args)
    seeds = np.random.SeedSequence(args.seed).spawn(2)
    try:
        model = build_histogram_model(args.samples_per_class, params, key_source=seeds[0])
        confusion = coa_confusion(model, params, args.trials, random_state=seeds[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(io.histogram_table(model, args.format), args.out)
    conf_path = args.confusion_out
    if conf_path is None and args.out is not None:
        out = Path(args.out)
        conf_path = out.with_name(out.stem + ".confusion" + out.suffix)
    if conf_path is None:
        sys.stdout.write(io.confusion_table(confusion, args.format))
    else:
        _emit(io.confusion_table(confusion, args.format), conf_path)
    accuracy = np.trace(confusion) / confusion.sum()
    _note(f"COA accuracy {accuracy:.4f} over {confusion.sum()} balanced blocks "
          f"(artifact pass level 0.95)")


def cmd_bfa(args):
    rng = np.random.default_rng(args.seed)
    if args.ciphertext:
        try:
            ct = io.parse_ciphertext(_read(args.ciphertext))
        except CipherFormatError as exc:
            raise DataError(f"{args.ciphertext}: {exc}") from None
        if args.key_low is None or args.key_high is None:
            raise UsageError("--key-low and --key-high are required with --ciphertext")
        if not 0 <= args.block_index < ct.n_blocks:
            raise UsageError("--block-index outside the ciphertext")
        params = CipherParams(ct.a, ct.delta, ct.block_len)
        target, low, high = ct.blocks[args.block_index], args.key_low, args.key_high
    else:
        key = _key(args.key)
        params = _params(args)
        if args.window < 1:
            raise UsageError("--window must be >= 1")
        ct = encode([1], key, params, random_state=rng)
        offset = int(rng.integers(0, args.window))
        low = max(1, key.digits - offset)
        high = min(10**14 - 1, low + args.window - 1)
        target = ct.blocks[0]
        args.block_index = 0
    try:
        cfg = BfaConfig(low, high, target, detector=args.detector, threshold=args.threshold,
                        block_index=args.block_index, budget=args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = brute_force_key(cfg, params)
    _emit(io.bfa_table(result, args.format), args.out)
    _note(result.summary())


def cmd_classical(args):
    if args.cipher == "otp":
        if args.self_test:
            return _self_test_line(selftest.check_otp, "otp worked example")
        if not (args.message and args.key):
            raise UsageError("otp needs --message and --key (or --self-test)")
        fn = classical.otp_decrypt if args.decrypt else classical.otp_encrypt
        try:
            print(fn(args.message.upper(), args.key.upper()))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif args.cipher == "rsa":
        if args.self_test:
            return _self_test_line(selftest.check_rsa, "rsa worked example")
        try:
            kp = classical.rsa_keygen(args.p, args.q, args.d)
            print(f"n={kp.n} e={kp.e} d={kp.d}")
            if args.encrypt is not None:
                print(classical.rsa_encrypt(args.encrypt, kp.public))
            if args.decrypt_block is not None:
                print(classical.rsa_decrypt(args.decrypt_block, kp.private))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.self_test:
            return _self_test_line(selftest.check_baptista, "baptista worked example")
        cfg = classical.BaptistaConfig(a=args.a, x0=args.x0, transient=args.transient,
                                       skip_per_letter=not args.skip_once)
        try:
            if args.counts:
                print(classical.baptista_decrypt([int(c) for c in args.counts.split()], cfg))
            elif args.message:
                print(" ".join(map(str, classical.baptista_encrypt(args.message, cfg))))
            else:
                raise UsageError("baptista needs --message or --counts (or --self-test)")
        except classical.BaptistaError as exc:
            raise DataError(str(exc)) from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return 0


def _self_test_line(check, name):
    ok, detail = check()
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if ok else EXIT_SELFTEST


def cmd_self_test(args):
    buf = StringIO()
    ok = selftest.run(buf)
    _emit(buf.getvalue(), args.out)
    return 0 if ok else EXIT_SELFTEST


# --- parser -------------------------------------------------------------------

def _common(format="csv", trials=10):
    """Options shared by the cipher subcommands; a fresh parser per subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=DEFAULT_A, help="bifurcation parameter")
    common.add_argument("--delta", type=float, default=0.2, help="coupling strength")
    common.add_argument("--block-len", type=int, default=10000, help="samples per bit")
    common.add_argument("--key", help="14-digit secret key")
    common.add_argument("--trials", type=int, default=trials)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=format)
    return common


def build_parser():
    parser = argparse.ArgumentParser(prog="chaoscipher", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sync-sweep", parents=[_common()], help="master-slave coupling sweep")
    p.add_argument("--deltas", help="comma-separated coupling values")
    p.add_argument("--delta-min", type=float, default=0.0)
    p.add_argument("--delta-max", type=float, default=0.6)
    p.add_argument("--delta-step", type=float, default=0.01)
    p.add_argument("--series-len", type=int, default=11000)
    p.add_argument("--transient", type=int, default=1000)
    p.set_defaults(func=cmd_sync_sweep)

    p = sub.add_parser("send", parents=[_common()], help="encrypt a message")
    p.add_argument("--bits", help="message as a 0/1 string")
    p.add_argument("--text", help="text file whose UTF-8 bytes form the message")
    p.set_defaults(func=cmd_send)

    p = sub.add_parser("receive", parents=[_common(format="json")],
                       help="decrypt a ciphertext file")
    p.add_argument("ciphertext")
    p.add_argument("--thr-te", type=float, default=0.1)
    p.add_argument("--thr-mi", type=float, default=0.015)
    p.add_argument("--thr-cc", type=float, default=0.2)
    p.add_argument("--transient", type=int, default=0)
    p.add_argument("--truth", help="sent bits, to count errors")
    p.set_defaults(func=cmd_receive)

    p = sub.add_parser("calibrate", parents=[_common()], help="threshold ensemble statistics")
    p.add_argument("--ensemble", type=int, default=1000)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("ber", parents=[_common()], help="BER versus SNR sweep")
    p.add_argument("--message-len", type=int, default=20)
    p.add_argument("--sigmas", default="0,0.02,0.05,0.08,0.1,0.12,0.16,0.2,0.25,0.3,0.35,"
                                       "0.4,0.5,0.6,0.8,1.0")
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("coa", parents=[_common(trials=1000)],
                       help="ciphertext-only histogram attack")
    p.add_argument("--samples-per-class", type=int, default=1_000_000)
    p.add_argument("--confusion-out", help="confusion matrix path")
    p.set_defaults(func=cmd_coa)

    p = sub.add_parser("bfa", parents=[_common()], help="brute-force key scan")
    p.add_argument("--ciphertext", help="attack this ciphertext file")
    p.add_argument("--block-index", type=int, default=0)
    p.add_argument("--key-low", type=int)
    p.add_argument("--key-high", type=int)
    p.add_argument("--window", type=int, default=1_000_000,
                   help="planted demo: window size around --key")
    p.add_argument("--detector", choices=DETECTORS, default="cc")
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.set_defaults(func=cmd_bfa)

    p = sub.add_parser("classical", help="reference ciphers")
    csub = p.add_subparsers(dest="cipher", required=True)
    for name in ("otp", "rsa", "baptista"):
        q = csub.add_parser(name)
        q.add_argument("--self-test", action="store_true")
        q.set_defaults(func=cmd_classical)
    q = csub.choices["otp"]
    q.add_argument("--message")
    q.add_argument("--key")
    q.add_argument("--decrypt", action="store_true")
    q = csub.choices["rsa"]
    q.add_argument("--p", type=int, default=47)
    q.add_argument("--q", type=int, default=59)
    q.add_argument("--d", type=int, default=157)
    q.add_argument("--encrypt", type=int)
    q.add_argument("--decrypt", dest="decrypt_block", type=int)
    q = csub.choices["baptista"]
    q.add_argument("--message")
    q.add_argument("--counts", help="whitespace-separated iteration counts")
    q.add_argument("--a", type=float, default=3.987986)
    q.add_argument("--x0", type=float, default=0.01010101010101)
    q.add_argument("--transient", type=int, default=250)
    q.add_argument("--skip-once", action="store_true",
                   help="skip the transient only before the first letter")

    p = sub.add_parser("self-test", help="check the reference examples")
    p.add_argument("--out")
    p.set_defaults(func=cmd_self_test)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DataError, CipherFormatError) as exc:
        print(f"chaoscipher: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
