import numpy as np
import pytest

from chaoscipher import io
from chaoscipher.attacks import BfaResult, build_histogram_model
from chaoscipher.channel import ber_sweep
from chaoscipher.cipher import CipherFormatError, CipherParams, CipherText, SecretKey, encode
from chaoscipher.dynamics import DEFAULT_A, sync_sweep

KEY = SecretKey.parse("00000000001234")
SMALL = CipherParams(block_len=100)


@pytest.fixture
def ct():
    return encode([1, 0, 1], KEY, SMALL, random_state=0)


class TestCiphertextFormat:
    def test_round_trip_is_byte_identical(self, ct, tmp_path):
        text = io.format_ciphertext(ct)
        again = io.parse_ciphertext(text)
        assert np.array_equal(again.blocks, ct.blocks)
        assert io.format_ciphertext(again) == text
        path = tmp_path / "ct.txt"
        io.write_ciphertext(ct, path)
        assert path.read_bytes() == text.encode("ascii")
        assert np.array_equal(io.read_ciphertext(path).blocks, ct.blocks)

    def test_layout(self, ct):
        lines = io.format_ciphertext(ct).splitlines()
        assert lines[0] == f"CHAOCT v1 a={DEFAULT_A!r} delta=0.2 block_len=100 n_blocks=3"
        assert len(lines) == 301
        assert all(len(x) == 16 for x in lines[1:])

    def test_samples_print_exact_grid_values(self, ct):
        for line, x in zip(io.format_ciphertext(ct).splitlines()[1:], ct.blocks.ravel()):
            assert int(line.replace(".", "")) == round(x * 1e14)

    def test_empty_message_file(self):
        ct = io.parse_ciphertext("CHAOCT v1 a=3.987986 delta=0.2 block_len=100 n_blocks=0\n")
        assert ct.n_blocks == 0

    @pytest.mark.parametrize("text,match", [
        ("", "empty"),
        ("hello\n0.50000000000000\n", "header"),
        ("CHAOCT v1 a=3.9 delta=0.2 block_len=1 n_blocks=2\n0.50000000000000\n", "expected 2"),
        ("CHAOCT v1 a=3.9 delta=0.2 block_len=1 n_blocks=1\n0.5\n", "14 decimals"),
        ("CHAOCT v1 a=3.9 delta=0.2 block_len=1 n_blocks=1\n-0.50000000000000\n", "14 decimals"),
        ("CHAOCT v1 a=3.9 delta=0.2 block_len=1 n_blocks=1\n1.50000000000000\n", "above 1"),
        ("CHAOCT v1 a=x delta=0.2 block_len=1 n_blocks=1\n0.50000000000000\n", "decimal"),
    ])
    def test_malformed(self, text, match):
        with pytest.raises(CipherFormatError, match=match):
            io.parse_ciphertext(text)

    def test_key_parsing(self):
        assert io.parse_key("00000000001234") == KEY
        with pytest.raises(ValueError):
            io.parse_key("1234")


class TestTables:
    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_sweep(self, fmt):
        rows = sync_sweep(DEFAULT_A, [0.0, 0.5], series_len=1200, transient=200)
        assert io.read_sweep(io.sweep_table(rows, fmt), fmt) == rows

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_ber(self, fmt):
        curve = ber_sweep(10, 10, [0.0, 0.1], SMALL, seed=0)
        again = io.read_ber(io.ber_table(curve, fmt), fmt)
        assert list(again) == list(curve)

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_bfa(self, fmt):
        res = BfaResult([(KEY, 0.5), (SecretKey(7), 0.5), (SecretKey(9), 0.25)], 3, 1.0, 3)
        assert io.read_bfa(io.bfa_table(res, fmt), fmt) == [
            (1, KEY, 0.5), (1, SecretKey(7), 0.5), (3, SecretKey(9), 0.25)]
        if fmt == "csv":
            assert "1,00000000001234,0.5" in io.bfa_table(res, fmt)

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_histogram_and_confusion(self, fmt):
        model = build_histogram_model(10_000, SMALL, key_source=0)
        again = io.read_histogram(io.histogram_table(model, fmt), fmt)
        assert np.array_equal(again.edges, model.edges)
        assert np.array_equal(again.p0, model.p0) and np.array_equal(again.p1, model.p1)
        conf = np.array([[480, 20], [3, 497]])
        assert np.array_equal(io.read_confusion(io.confusion_table(conf, fmt), fmt), conf)

    def test_floats_round_trip_exactly(self):
        x = 0.1 + 0.2
        text = io.table_text(("v",), [[x]])
        assert float(io.read_table(text)[0]["v"]) == x

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            io.table_text(("v",), [[1]], fmt="xml")

    def test_empty_blocks_format(self):
        ct = CipherText(np.empty((0, 100)), DEFAULT_A, 0.2)
        assert io.parse_ciphertext(io.format_ciphertext(ct)).n_blocks == 0
