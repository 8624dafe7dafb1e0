import dataclasses
import string

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaoscipher.classical import (ENGLISH, AlphabetTable, BaptistaConfig, BaptistaError,
                                   InvalidExponentError, baptista_decrypt, baptista_encrypt,
                                   is_prime, mod_inverse, mod_pow, otp_decrypt, otp_encrypt,
                                   rsa_decrypt, rsa_encrypt, rsa_keygen)
from chaoscipher.dynamics import iterate_free

letters = st.text(alphabet=string.ascii_uppercase, min_size=1, max_size=40)
SMALL_PRIMES = [p for p in range(3, 400) if all(p % f for f in range(2, int(p**0.5) + 1))]


class TestOneTimePad:
    def test_textbook_example(self):
        assert otp_encrypt("HELLO", "TODAY") == "BTPMN"
        assert otp_decrypt("BTPMN", "TODAY") == "HELLO"

    def test_wrap_conventions(self):
        assert otp_encrypt("A", "Z") == "A"
        assert otp_decrypt("Q", "Q") == "Z"
        assert ENGLISH.wrap(0) == 26 and ENGLISH.wrap(27) == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            otp_encrypt("AB", "A")

    def test_unknown_symbol(self):
        with pytest.raises(ValueError):
            otp_encrypt("a", "B")

    @given(st.data())
    def test_round_trip(self, data):
        m = data.draw(letters)
        k = data.draw(st.text(alphabet=string.ascii_uppercase, min_size=len(m), max_size=len(m)))
        assert otp_decrypt(otp_encrypt(m, k), k) == m

    def test_custom_table(self):
        tbl = AlphabetTable("01")
        # codes 1 and 2 modulo 2 turn the pad into XNOR
        assert otp_encrypt("0110", "1010", tbl) == "0011"
        assert otp_decrypt(otp_encrypt("0110", "1010", tbl), "1010", tbl) == "0110"

    def test_duplicate_symbols_rejected(self):
        with pytest.raises(ValueError):
            AlphabetTable("AAB")


class TestRsa:
    def test_textbook_example(self):
        kp = rsa_keygen(47, 59, 157)
        assert (kp.n, kp.e) == (2773, 17)
        assert kp.public == (17, 2773) and kp.private == (157, 2773)

    def test_tiny_example(self):
        assert rsa_keygen(3, 5, 3).e == 3

    def test_noncoprime_exponent(self):
        with pytest.raises(InvalidExponentError):
            rsa_keygen(3, 5, 2)

    @pytest.mark.parametrize("p,q", [(4, 5), (3, 9), (5, 5), (1, 7)])
    def test_bad_primes(self, p, q):
        with pytest.raises(ValueError):
            rsa_keygen(p, q, 3)

    def test_block_range(self):
        kp = rsa_keygen(47, 59, 157)
        with pytest.raises(ValueError):
            rsa_encrypt(2773, kp.public)
        with pytest.raises(ValueError):
            rsa_decrypt(-1, kp.private)

    def test_full_bijection(self):
        kp = rsa_keygen(47, 59, 157)
        cs = [rsa_encrypt(m, kp.public) for m in range(kp.n)]
        assert sorted(cs) == list(range(kp.n))
        assert all(rsa_decrypt(c, kp.private) == m for m, c in enumerate(cs))

    @given(st.integers(0, 10**30), st.integers(0, 10**6), st.integers(1, 10**12))
    def test_mod_pow_matches_builtin(self, b, e, m):
        assert mod_pow(b, e, m) == pow(b, e, m)

    @given(st.integers(1, 10**9), st.integers(2, 10**9))
    def test_mod_inverse_matches_builtin(self, a, m):
        try:
            expected = pow(a, -1, m)
        except ValueError:
            with pytest.raises(InvalidExponentError):
                mod_inverse(a, m)
        else:
            assert mod_inverse(a, m) == expected

    @settings(max_examples=50)
    @given(st.sampled_from(SMALL_PRIMES), st.sampled_from(SMALL_PRIMES), st.integers(3, 10**5),
           st.integers(0, 10**9))
    def test_exponent_relation_and_round_trip(self, p, q, d, m):
        if p == q:
            return
        phi = (p - 1) * (q - 1)
        try:
            kp = rsa_keygen(p, q, d)
        except InvalidExponentError:
            assert np.gcd(d, phi) != 1
            return
        assert kp.e * kp.d % phi == 1
        m %= kp.n
        assert rsa_decrypt(rsa_encrypt(m, kp.public), kp.private) == m

    def test_is_prime_against_sieve(self):
        sieve = np.ones(2000, dtype=bool)
        sieve[:2] = False
        for i in range(2, 45):
            sieve[i * i::i] = False
        assert [n for n in range(2000) if is_prime(n)] == np.flatnonzero(sieve).tolist()


def oracle_counts(message, cfg):
    """Straightforward re-derivation of the iteration counts from a long orbit."""
    orbit = iterate_free(cfg.x0, cfg.a, cfg.transient + 20000)
    ref = orbit[cfg.transient:cfg.transient + cfg.reference_len + 1]
    lo, hi = ref.min(), ref.max()
    width = (hi - lo) / 26

    def letter_at(i):
        return min(int((orbit[i] - lo) / width), 25)

    start = 0 if cfg.skip_per_letter else cfg.transient
    counts = []
    for ch in message:
        n = cfg.transient + 1 if cfg.skip_per_letter else 1
        while letter_at(start + n) != cfg.ordering.index(ch):
            n += 1
        counts.append(n)
        start += n
    return counts


class TestBaptista:
    ONCE = BaptistaConfig(skip_per_letter=False, reference_len=20000)
    PER_LETTER = BaptistaConfig(reference_len=20000)

    @pytest.mark.parametrize("cfg", [PER_LETTER, ONCE], ids=["per-letter", "once"])
    def test_counts_match_oracle(self, cfg):
        assert baptista_encrypt("HI", cfg) == oracle_counts("HI", cfg)
        assert baptista_encrypt("CHAOS", cfg) == oracle_counts("CHAOS", cfg)

    def test_default_counts_for_hi(self):
        counts = baptista_encrypt("hi")
        assert all(n > 250 for n in counts)
        assert baptista_decrypt(counts) == "HI"

    @settings(max_examples=25, deadline=None)
    @given(letters, st.booleans())
    def test_round_trip(self, msg, per_letter):
        cfg = dataclasses.replace(self.PER_LETTER, skip_per_letter=per_letter)
        assert baptista_decrypt(baptista_encrypt(msg, cfg), cfg) == msg

    def test_shuffled_alphabet(self):
        cfg = dataclasses.replace(self.ONCE, ordering="QWERTYUIOPASDFGHJKLZXCVBNM")
        assert baptista_decrypt(baptista_encrypt("SECRET", cfg), cfg) == "SECRET"
        assert baptista_encrypt("SECRET", cfg) != baptista_encrypt("SECRET", self.ONCE)

    def test_errors(self):
        with pytest.raises(ValueError):
            baptista_encrypt("HI!")
        with pytest.raises(BaptistaError):
            baptista_decrypt([0])
        with pytest.raises(ValueError):
            BaptistaConfig(ordering="ABC")
