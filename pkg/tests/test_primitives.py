import hashlib
import threading

import pytest

from qnk.errors import (
    DomainMismatch,
    LengthTooLarge,
    MessageTooLong,
    NotBinding,
    PuncturedPoint,
)
from qnk.primitives import (
    MODE_SIMGEN,
    MODE_TDGEN,
    Commitment,
    PrfKey,
    RandomOracle,
    SbshKeys,
    commit,
    ggm_eval,
    ggm_eval_punct,
    ggm_punct,
    owf,
    prf_eval,
    prf_gen,
    prg,
    ro_query,
    sbsh_com,
    sbsh_ext,
    sbsh_gen,
    sbsh_is_binding,
    sbsh_key,
    verify_open,
)
from qnk.rand import Drbg

ZERO_KEY = PrfKey(b"\x00" * 16)


class TestPrf:
    def test_zero_key_empty_input_vector(self):
        # frozen vector: HMAC-SHA256(0^16, "") truncated to 16 bytes
        assert prf_eval(ZERO_KEY, b"") == bytes.fromhex("b613679a0814d9ec772f95d778c35fc5")

    def test_deterministic(self):
        k = prf_gen(Drbg(1))
        assert prf_eval(k, b"abc") == prf_eval(k, b"abc")

    def test_extension_changes_output(self):
        d = Drbg(2)
        collisions = 0
        for _ in range(10 ** 4):
            k = PrfKey(d.bytes(16))
            x = d.bytes(8)
            if prf_eval(k, x) == prf_eval(k, x + b"\x00"):
                collisions += 1
        assert collisions == 0

    def test_key_length_enforced(self):
        with pytest.raises(DomainMismatch):
            PrfKey(b"\x00" * 15)


class TestGgm:
    def test_punctured_agrees_everywhere_else(self):
        k = prf_gen(Drbg(3), 8)
        kz = ggm_punct(k, 0x2A)
        for x in range(256):
            if x == 0x2A:
                continue
            assert ggm_eval_punct(kz, x) == ggm_eval(k, x)

    def test_punctured_point_errors(self):
        kz = ggm_punct(prf_gen(Drbg(4), 8), 0x2A)
        with pytest.raises(PuncturedPoint):
            ggm_eval_punct(kz, 0x2A)

    def test_first_path_key_is_right_child_of_root(self):
        k = PrfKey(b"\x00" * 16, 8)
        kz = ggm_punct(k, 0x00)
        g1 = hashlib.sha256(b"\x00" * 16 + b"\x01").digest()[:16]
        assert kz.path_keys[0] == (1, g1)

    def test_all_zero_input_is_left_spine(self):
        k = PrfKey(b"\x00" * 16, 8)
        s = k.bytes
        for _ in range(8):
            s = hashlib.sha256(s + b"\x00").digest()[:16]
        assert ggm_eval(k, 0) == s

    def test_full_domain_collision_free(self):
        k = prf_gen(Drbg(5), 8)
        table = {ggm_eval(k, x) for x in range(256)}
        assert len(table) == 256

    def test_plain_key_still_defined_at_punctured_point(self):
        k = prf_gen(Drbg(6), 8)
        ggm_punct(k, 0x11)
        assert len(ggm_eval(k, 0x11)) == 16

    def test_width_mismatch(self):
        k = prf_gen(Drbg(7), 8)
        with pytest.raises(DomainMismatch):
            ggm_eval(k, 256)
        with pytest.raises(DomainMismatch):
            ggm_punct(k, b"\x00\x01")

    def test_punctured_key_shape(self):
        kz = ggm_punct(prf_gen(Drbg(8), 16), 0x1234)
        assert len(kz.path_keys) == 16
        assert kz.point == 0x1234


class TestPrg:
    def test_single_block(self):
        assert len(prg(b"\x01" * 16, 16)) == 16

    def test_prefix_property(self):
        s = b"\x02" * 16
        assert prg(s, 32)[:16] == prg(s, 16)

    def test_seed_collisions(self):
        d = Drbg(9)
        seen = set()
        for _ in range(10 ** 4):
            out = prg(d.bytes(16), 64)
            assert out not in seen
            seen.add(out)

    def test_too_large(self):
        with pytest.raises(LengthTooLarge):
            prg(b"\x00" * 16, 2 ** 16 + 1)


class TestOwf:
    def test_deterministic(self):
        assert owf(b"x") == owf(b"x")

    def test_empty_vector(self):
        assert owf(b"") == hashlib.sha256(b"").digest()

    def test_no_collisions(self):
        d = Drbg(10)
        seen = set()
        for _ in range(10 ** 4):
            out = owf(d.bytes(12))
            assert out not in seen
            seen.add(out)


class TestCommit:
    def test_repeatable(self):
        r = b"\x07" * 16
        assert commit(b"\x01", r).payload == commit(b"\x01", r).payload

    def test_distinct_messages_distinct_payloads(self):
        d = Drbg(11)
        for _ in range(10 ** 3):
            r = d.bytes(16)
            assert commit(b"\x01", r).payload != commit(b"\x02", r).payload

    def test_open_roundtrip(self):
        c = commit(b"msg", b"\x03" * 16)
        assert verify_open(c, b"msg", b"\x03" * 16)
        assert not verify_open(c, b"msh", b"\x03" * 16)

    def test_message_length_cap(self):
        with pytest.raises(MessageTooLong):
            commit(b"\x00" * 65, b"\x00" * 16)

    def test_payload_is_two_digests(self):
        assert len(commit(b"", b"\x00" * 16).payload) == 64
        with pytest.raises(MessageTooLong):
            Commitment(b"\x00" * 63)

    def test_binding_search_finds_no_collision(self):
        d = Drbg(12)
        seen = {}
        for _ in range(10 ** 5):
            m = d.bytes(2)
            r = d.bytes(16)
            payload = commit(m, r).payload
            prev = seen.get(payload)
            assert prev is None or prev == (m, r)
            seen[payload] = (m, r)


class TestRandomOracle:
    def test_consistency(self):
        o = RandomOracle(b"\x05" * 16)
        assert o.query(b"q") == o.query(b"q")

    def test_modes_share_prefix(self):
        seed = b"\x05" * 16
        td = PrfKey(b"\x07" * 16)
        uni = RandomOracle(seed)
        tdo = RandomOracle(seed, MODE_TDGEN, td, lambda x: 0)
        sim = RandomOracle(seed, MODE_SIMGEN, td)
        for q in (b"", b"a", b"zz" * 40):
            answers = {uni.query(q)[:16], tdo.query(q)[:16], sim.query(q)[:16]}
            assert len(answers) == 1

    def test_tdgen_simgen_last_bit_relation(self):
        seed = b"\x05" * 16
        td = PrfKey(b"\x07" * 16)
        tdo = RandomOracle(seed, MODE_TDGEN, td, lambda x: 1 if x == b"hit" else 0)
        sim = RandomOracle(seed, MODE_SIMGEN, td)
        assert tdo.query(b"hit")[16] ^ sim.query(b"hit")[16] == 1
        assert tdo.query(b"miss") == sim.query(b"miss")

    def test_answer_length(self):
        o = RandomOracle(b"\x01" * 16)
        ans = ro_query(o, b"x")
        assert len(ans) == 17 and ans[16] in (0, 1)

    def test_concurrent_queries_consistent(self):
        o = RandomOracle(b"\x09" * 16)
        results = []

        def worker(tag):
            local = [o.query(b"shared"), o.query(tag)]
            results.append(local[0])

        threads = [threading.Thread(target=worker, args=(bytes([i]),)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1


class TestSbsh:
    def test_always_binding_extraction(self):
        d = Drbg(13)
        ck0, gen_rand = sbsh_gen(d)
        ck1 = sbsh_key(ck0, d)
        keys = SbshKeys(ck0, ck1, 0)
        c = sbsh_com(keys, b"the committed value", d.bytes(16))
        assert sbsh_ext(gen_rand, ck0, ck1, c, 0) == b"the committed value"

    def test_binding_frequency_matches_rate(self):
        d = Drbg(14)
        ck0, _ = sbsh_gen(d)
        hits = sum(sbsh_is_binding(ck0, sbsh_key(ck0, d), 4) for _ in range(10 ** 4))
        # binomial(10^4, 2^-4): mean 625, sigma ~24.8
        assert abs(hits - 625) <= 3 * 24.8

    def test_not_binding_refuses_extraction(self):
        d = Drbg(15)
        ck0, gen_rand = sbsh_gen(d)
        ck1 = sbsh_key(ck0, d)
        while sbsh_is_binding(ck0, ck1, 4):
            ck1 = sbsh_key(ck0, d)
        keys = SbshKeys(ck0, ck1, 4)
        c = sbsh_com(keys, b"m", d.bytes(16))
        with pytest.raises(NotBinding):
            sbsh_ext(gen_rand, ck0, ck1, c, 4)

    def test_non_binding_distributions_close(self):
        # per-byte empirical distance between commitments to two messages
        d = Drbg(16)
        ck0, _ = sbsh_gen(d)
        ck1 = sbsh_key(ck0, d)
        while sbsh_is_binding(ck0, ck1, 4):
            ck1 = sbsh_key(ck0, d)
        keys = SbshKeys(ck0, ck1, 4)
        ones = [0] * 8
        zeros = [0] * 8
        n = 10 ** 4
        for _ in range(n):
            c0 = sbsh_com(keys, b"\x00" * 8, d.bytes(16))[16:]
            c1 = sbsh_com(keys, b"\xff" * 8, d.bytes(16))[16:]
            for j in range(8):
                zeros[j] += bin(c0[j]).count("1")
                ones[j] += bin(c1[j]).count("1")
        # each byte contributes 8 Bernoulli(1/2) bits per sample
        sigma = (n * 8 * 0.25) ** 0.5
        for j in range(8):
            assert abs(zeros[j] - ones[j]) < 6 * sigma
