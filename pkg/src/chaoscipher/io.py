"""Ciphertext files and tabular (CSV/JSON) artifacts.

Ciphertext file::

    CHAOCT v1 a=3.987986 delta=0.2 block_len=10000 n_blocks=50
    0.12345678901234
    ...

one sample per line with exactly 14 fractional digits, blocks concatenated.
"""
import csv
import io as _io
import json
import re

import numpy as np

from chaoscipher.attacks import HistogramModel
from chaoscipher.channel import BerCurve, BerRow
from chaoscipher.cipher import CipherFormatError, CipherText, SecretKey
from chaoscipher.dynamics import SyncSweepRow

MAGIC = "CHAOCT v1"
_HEADER = re.compile(
    r"^CHAOCT v1 a=(?P<a>\S+) delta=(?P<delta>\S+) "
    r"block_len=(?P<block_len>\d+) n_blocks=(?P<n_blocks>\d+)$")
_SAMPLE = re.compile(r"^[01]\.\d{14}$")


def _num(x):
    """Shortest round-trip text for a float."""
    return repr(float(x))


def format_ciphertext(ct, block_len=None):
    block_len = ct.block_len if block_len is None else block_len
    lines = [f"{MAGIC} a={_num(ct.a)} delta={_num(ct.delta)} "
             f"block_len={block_len} n_blocks={ct.n_blocks}"]
    lines.extend(f"{x:.14f}" for x in ct.blocks.ravel())
    return "\n".join(lines) + "\n"


def parse_ciphertext(text):
    lines = text.splitlines()
    if not lines:
        raise CipherFormatError("empty ciphertext file")
    m = _HEADER.match(lines[0])
    if not m:
        raise CipherFormatError(f"bad header: {lines[0][:80]!r}")
    block_len = int(m["block_len"])
    n_blocks = int(m["n_blocks"])
    body = lines[1:]
    if len(body) != block_len * n_blocks:
        raise CipherFormatError(
            f"expected {block_len * n_blocks} samples, found {len(body)}")
    for i, line in enumerate(body):
        if not _SAMPLE.match(line):
            raise CipherFormatError(f"line {i + 2}: sample must have 14 decimals: {line!r}")
    samples = np.array([float(s) for s in body], dtype=np.float64)
    if np.any(samples > 1.0):
        raise CipherFormatError("sample above 1")
    try:
        a, delta = float(m["a"]), float(m["delta"])
    except ValueError:
        raise CipherFormatError("a and delta must be decimal numbers") from None
    return CipherText(samples.reshape(n_blocks, block_len), a, delta)


def write_ciphertext(ct, path):
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(format_ciphertext(ct))


def read_ciphertext(path):
    with open(path, encoding="ascii") as fh:
        return parse_ciphertext(fh.read())


def parse_key(text):
    return SecretKey.parse(text)


# --- tables -----------------------------------------------------------------

def table_text(header, rows, fmt="csv"):
    """Serialize rows (sequences aligned with ``header``) as CSV or JSON."""
    rows = [[_cell(v) for v in row] for row in rows]
    if fmt == "json":
        return json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, SecretKey):
        return str(v)
    return v


def read_table(text, fmt="csv"):
    """Rows as dicts of strings (CSV) or native values (JSON)."""
    if fmt == "json":
        return json.loads(text)
    return list(csv.DictReader(_io.StringIO(text)))


SWEEP_HEADER = ("delta", "mean_abs_diff", "cc", "mi", "te")
BER_HEADER = ("detector", "sigma", "snr", "ber", "trials")
BFA_HEADER = ("rank", "key", "value")
HIST_HEADER = ("bin_low", "bin_high", "p_m0", "p_m1")
CONFUSION_HEADER = ("true_bit", "pred_0", "pred_1")


def sweep_table(rows, fmt="csv"):
    return table_text(SWEEP_HEADER, [[getattr(r, h) for h in SWEEP_HEADER] for r in rows], fmt)


def read_sweep(text, fmt="csv"):
    return [SyncSweepRow(**{h: float(r[h]) for h in SWEEP_HEADER}) for r in read_table(text, fmt)]


def ber_table(curve, fmt="csv"):
    return table_text(BER_HEADER, [[getattr(r, h) for h in BER_HEADER] for r in curve], fmt)


def read_ber(text, fmt="csv"):
    return BerCurve(BerRow(r["detector"], float(r["sigma"]), float(r["snr"]),
                           float(r["ber"]), int(r["trials"])) for r in read_table(text, fmt))


def bfa_table(result, fmt="csv"):
    return table_text(BFA_HEADER, [[rank, key, value] for rank, (key, value)
                                   in zip(result.ranks(), result.candidates)], fmt)


def read_bfa(text, fmt="csv"):
    return [(int(r["rank"]), SecretKey.parse(str(r["key"]).zfill(14)), float(r["value"]))
            for r in read_table(text, fmt)]


def histogram_table(model, fmt="csv"):
    e = model.edges
    return table_text(HIST_HEADER, [[e[i], e[i + 1], model.p0[i], model.p1[i]]
                                    for i in range(len(model.p0))], fmt)


def read_histogram(text, fmt="csv"):
    rows = read_table(text, fmt)
    edges = np.array([float(rows[0]["bin_low"])] + [float(r["bin_high"]) for r in rows])
    return HistogramModel(edges, np.array([float(r["p_m0"]) for r in rows]),
                          np.array([float(r["p_m1"]) for r in rows]))


def confusion_table(confusion, fmt="csv"):
    return table_text(CONFUSION_HEADER, [[b, *confusion[b]] for b in (0, 1)], fmt)


def read_confusion(text, fmt="csv"):
    rows = read_table(text, fmt)
    return np.array([[int(r["pred_0"]), int(r["pred_1"])] for r in rows], dtype=np.int64)
