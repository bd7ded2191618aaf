import pytest

from qnk.circuit_ir import ExplicitDomain, equiv_check, evaluate
from qnk.encdelegate import (
    POLICY_FAMILY,
    AbeCiphertext,
    AbeSecretKey,
    PeCiphertext,
    QLockObf,
    ShareSet,
    abe_dec,
    abe_enc_circuit,
    abe_encryptor_hybrids,
    abe_gen,
    abe_keycheck_hybrids,
    abe_keygen,
    attr_wire,
    cprf_constrain,
    cprf_eval,
    cprf_gen,
    cprf_hybrids,
    kp_dec,
    kp_enc,
    kp_gen,
    kp_keygen,
    pe_dec,
    pe_enc,
    qlock_eval,
    qlock_obf,
    qlock_sim,
    ss_rec,
    ss_share,
)
from qnk.errors import WidthMismatch
from qnk.primitives import ggm_eval, prf_gen, prg
from qnk.qma import (
    PseudoDetCircuit,
    Witness,
    fixture,
    is_qualified,
    make_policy_language,
    make_threshold_language,
)
from qnk.qsim import QuantumCircuit
from qnk.rand import Drbg

PARITY4 = QuantumCircuit(5, tuple(("CNOT", (i, 0)) for i in range(1, 5)), n_input=4)


@pytest.fixture(scope="module")
def keys():
    return abe_gen(4, 1)


@pytest.fixture(scope="module")
def parity_ct(keys):
    return abe_enc_circuit(keys, PARITY4, b"\x01", 2)


class TestAbe:
    def test_qualifying_attribute(self, keys, parity_ct):
        sk = abe_keygen(keys, 0b0111)
        assert abe_dec(sk, parity_ct, Drbg(3)) == b"\x01"

    def test_non_qualifying_attribute(self, keys, parity_ct):
        sk = abe_keygen(keys, 0b0011)
        assert abe_dec(sk, parity_ct, Drbg(3)) is None

    def test_wrong_keys_fail_keycheck(self, keys, parity_ct):
        d = Drbg(4)
        wire = attr_wire(0b0111, 4)
        hits = 0
        for _ in range(10 ** 4):
            if keys.mpk.run(wire, d.bytes(16)) == b"\x01":
                hits += 1
        assert hits == 0

    def test_all_attributes_match_policy(self, keys, parity_ct):
        for attr in range(16):
            got = abe_dec(abe_keygen(keys, attr), parity_ct, Drbg(attr))
            want = b"\x01" if bin(attr).count("1") % 2 else None
            assert got == want

    def test_serialization(self, keys, parity_ct):
        sk = abe_keygen(keys, 0b1110)
        again_sk = AbeSecretKey.from_bytes(sk.to_bytes())
        again_ct = AbeCiphertext.from_bytes(parity_ct.to_bytes())
        assert abe_dec(again_sk, again_ct, Drbg(5)) == b"\x01"

    def test_attr_length_cap(self):
        with pytest.raises(WidthMismatch):
            abe_gen(11, 6)

    def test_multibyte_message(self, keys):
        ct = abe_enc_circuit(keys, PARITY4, b"sixteen-byte-msg", 7)
        assert abe_dec(abe_keygen(keys, 1), ct, Drbg(8)) == b"sixteen-byte-msg"


class TestKeyPolicy:
    def test_policy_key_decrypts_matching_attribute(self):
        kpk = kp_gen(9)
        ct = kp_enc(kpk.mpk, attr_wire(0b0111, 4), b"\x42", 10)
        assert kp_dec(kp_keygen(kpk, 1), ct, Drbg(11)) == b"\x42"

    def test_rejecting_policy(self):
        kpk = kp_gen(12)
        ct = kp_enc(kpk.mpk, attr_wire(0b0111, 4), b"\x42", 13)
        assert kp_dec(kp_keygen(kpk, 3), ct, Drbg(14)) is None

    def test_role_swap_agreement(self):
        # key-policy decryption succeeds exactly when the registered circuit
        # accepts the attribute, matching a direct ciphertext-policy run
        kpk = kp_gen(15)
        cpk = abe_gen(4, 16)
        d = Drbg(17)
        for t in range(50):
            attr = d.randint(0, 15)
            kct = kp_enc(kpk.mpk, attr_wire(attr, 4), b"\x01", d.child(f"k{t}").bytes(16))
            cct = abe_enc_circuit(cpk, POLICY_FAMILY[1], b"\x01", d.child(f"c{t}").bytes(16))
            kp_ok = kp_dec(kp_keygen(kpk, 1), kct, d.child(f"kd{t}")) is not None
            cp_ok = abe_dec(abe_keygen(cpk, attr), cct, d.child(f"cd{t}")) is not None
            assert kp_ok == cp_ok == (bin(attr).count("1") % 2 == 1)


@pytest.fixture(scope="module")
def dom(keys):
    pts = []
    for a in range(16):
        wire = attr_wire(a, 4)
        pts += [(wire, ggm_eval(keys.msk, wire)), (wire, b"\x31" * 16)]
    return ExplicitDomain(tuple(pts))


class TestAbeHybrids:
    def test_keycheck_chain(self, keys, dom):
        i_star = 5
        fam = abe_keycheck_hybrids(keys.msk, 4, i_star, Drbg(18))
        assert equiv_check(fam["P"], fam["P1"], dom)
        star = attr_wire(i_star, 4)
        for a, b in (("P1", "P2"), ("P2", "P3"), ("P3", "Pstar")):
            for pt in dom.entries:
                if pt[0] == star:
                    continue
                assert evaluate(fam[a], list(pt)) == evaluate(fam[b], list(pt))

    def test_pstar_rejects_at_index(self, keys, dom):
        i_star = 5
        fam = abe_keycheck_hybrids(keys.msk, 4, i_star, Drbg(19))
        wire = attr_wire(i_star, 4)
        assert evaluate(fam["Pstar"], [wire, ggm_eval(keys.msk, wire)]) == [b"\x00"]

    def test_prg_range_event_unhit(self):
        d = Drbg(20)
        for _ in range(10 ** 4):
            image = d.bytes(64)
            assert prg(d.bytes(16), 64) != image

    def test_encryptor_chain(self, keys, dom):
        pol = make_policy_language(PARITY4)
        r = prf_gen(Drbg(21), 16)
        fam = abe_encryptor_hybrids(keys.mpk.to_bytes(), pol, b"\x00", b"\x01",
                                    r, 4, 5, Drbg(22))
        assert equiv_check(fam["E"], fam["E1"], dom)
        star = attr_wire(5, 4)
        for a, b in (("E1", "E2"), ("E2", "E3"), ("E3", "Estar")):
            for pt in dom.entries:
                if pt[0] == star:
                    continue
                assert evaluate(fam[a], list(pt)) == evaluate(fam[b], list(pt))


class TestQLock:
    def test_constant_circuit_releases_everywhere(self):
        u = bytes(range(16))
        Q = PseudoDetCircuit(QuantumCircuit(5, (), n_input=4), 1, (u, u))
        obj = qlock_obf(Q, u, b"z-payload", 23)
        for x in range(16):
            bits = [(x >> (3 - i)) & 1 for i in range(4)]
            assert qlock_eval(obj, bits, Drbg(x)) == b"z-payload"

    def test_fresh_lock_never_hits(self):
        v0, v1 = b"\x01" * 16, b"\x02" * 16
        Q = PseudoDetCircuit(QuantumCircuit(5, (), n_input=4), 1, (v0, v1))
        obj = qlock_obf(Q, b"\x77" * 16, b"z", 24)
        d = Drbg(25)
        for _ in range(10 ** 4):
            bits = [d.bit() for _ in range(4)]
            assert qlock_eval(obj, bits, d.child(str(bits))) is None

    def test_sim_always_bottom_with_matching_sizes(self):
        u = bytes(range(16))
        Q = PseudoDetCircuit(QuantumCircuit(5, (), n_input=4), 1, (u, u))
        obj = qlock_obf(Q, u, b"zz", 26)
        sim = qlock_sim(obj.desc_len, obj.payload_len, 27)
        assert sim.cc.declared_size == obj.cc.declared_size
        assert len(sim.ct.payload) == len(obj.ct.payload)
        for x in range(16):
            bits = [(x >> (3 - i)) & 1 for i in range(4)]
            assert qlock_eval(sim, bits, Drbg(x)) is None

    def test_serialization(self):
        u = bytes(range(16))
        Q = PseudoDetCircuit(QuantumCircuit(5, (), n_input=4), 1, (u, u))
        obj = qlock_obf(Q, u, b"z", 28)
        again = QLockObf.from_bytes(obj.to_bytes())
        assert qlock_eval(again, [0, 0, 0, 0], Drbg(29)) == b"z"


class TestPredicateEncryption:
    def test_qualifying_key(self, keys):
        ct = pe_enc(keys, PARITY4, b"payload", 30)
        assert pe_dec(abe_keygen(keys, 0b0111), ct) == b"payload"

    def test_non_qualifying_key_trials(self, keys):
        d = Drbg(31)
        for t in range(100):
            ct = pe_enc(keys, PARITY4, b"payload", d.child(f"s{t}").bytes(16))
            assert pe_dec(abe_keygen(keys, 0b0011), ct) is None

    def test_policy_hiding_metadata(self, keys):
        ct_a = pe_enc(keys, PARITY4, b"m", 32)
        other = QuantumCircuit(5, tuple(("CNOT", (i, 0)) for i in (1, 2))
                               + (("CNOT", (3, 0)), ("CNOT", (4, 0))), n_input=4)
        ct_b = pe_enc(keys, other, b"m", 33)
        assert ct_a.cc.declared_size == ct_b.cc.declared_size
        assert ct_a.payload_len == ct_b.payload_len

    def test_serialization(self, keys):
        ct = pe_enc(keys, PARITY4, b"m", 34)
        again = PeCiphertext.from_bytes(ct.to_bytes())
        assert pe_dec(abe_keygen(keys, 0b0001), again) == b"m"


@pytest.fixture(scope="module")
def ck():
    return cprf_gen(35)


class TestConstrainedPrf:
    def test_accepting_point_byte_equal(self, ck):
        kq = cprf_constrain(ck, 1)
        assert cprf_eval(ck, 0b0111) == cprf_ceval_wrap(ck, kq, 0b0111)

    def test_rejecting_point_bottom(self, ck):
        kq = cprf_constrain(ck, 1)
        assert cprf_ceval_wrap(ck, kq, 0b0011) is None

    def test_two_keys_agree_with_master(self, ck):
        kq1 = cprf_constrain(ck, 1)
        kq2 = cprf_constrain(ck, 2)
        for x in (0b0111, 0b1110):
            want = cprf_eval(ck, x)
            assert cprf_ceval_wrap(ck, kq1, x) == want
            assert cprf_ceval_wrap(ck, kq2, x) == want

    def test_hybrid_chain(self, ck):
        star = attr_wire(3, 8)
        fam = cprf_hybrids(ck.k, ck.escrow["k_tilde"], ck.abe.mpk.to_bytes(),
                           star, Drbg(36))
        dom = ExplicitDomain(tuple((attr_wire(v, 8),) for v in range(16)))
        assert equiv_check(fam["P"], fam["P1"], dom)
        assert equiv_check(fam["P1"], fam["P2"], dom)
        for a, b in (("P2", "P3"), ("P3", "Pstar")):
            for pt in dom.entries:
                if pt[0] == star:
                    continue
                assert evaluate(fam[a], list(pt)) == evaluate(fam[b], list(pt))


def cprf_ceval_wrap(ck, kq, x):
    from qnk.encdelegate import cprf_ceval
    return cprf_ceval(ck.pp, kq, x, Drbg(x))


class TestSecretSharing:
    def test_threshold_2_of_3(self):
        th = fixture("th23")
        ss = ss_share(th, 3, 1, 37)
        assert ss_rec(ss, {0, 1}, Witness.empty(), Drbg(38)) == 1
        assert ss_rec(ss, {0}, Witness.empty(), Drbg(38)) is None
        assert ss_rec(ss, {0, 1, 2}, Witness.empty(), Drbg(38)) == 1

    def test_exhaustive_subsets_match_qualified_table(self):
        for n, t in ((3, 2), (4, 3)):
            lang = make_threshold_language(n, t)
            for secret in (0, 1):
                ss = ss_share(lang, n, secret, 39 + n + secret)
                for mask in range(1, 1 << n):
                    subset = {i for i in range(n) if (mask >> (n - 1 - i)) & 1}
                    got = ss_rec(ss, subset, Witness.empty(), Drbg(mask))
                    want = secret if is_qualified(
                        lang, mask.to_bytes(1, "big")) == "yes" else None
                    assert got == want, (n, t, secret, mask)

    def test_shares_serialize(self):
        ss = ss_share(fixture("th23"), 3, 1, 44)
        again = ShareSet.from_bytes(ss.to_bytes())
        assert ss_rec(again, {1, 2}, Witness.empty(), Drbg(45)) == 1

    def test_party_count_cap(self):
        with pytest.raises(WidthMismatch):
            ss_share(fixture("th23"), 11, 0, 46)

    def test_commitments_bind_party_indices(self):
        from qnk.primitives import commit
        ss = ss_share(fixture("th23"), 3, 1, 47)
        for i, (r_i, _) in enumerate(ss.shares):
            assert commit(bytes([i + 1]), r_i).payload == ss.commitments[i]
