import itertools

import pytest

from qnk.cvqc import (
    MINI_PARAMS,
    PROTO_TOY,
    TOY_LINEAR,
    TOY_STATS,
    Claim,
    CvqcProof,
    CvqcVerifyKey,
    ToyParams,
    blind_keygen,
    blind_prove,
    blind_verify,
    claim_for,
    decode_base_proof,
    encode_base_proof,
    keygen_star,
    oracle_keygen,
    oracle_prove,
    oracle_verify,
    sim_gen,
    star_prove,
    star_verify,
    stats_verify,
    td_gen,
    td_verify,
    toy_keygen,
    toy_prove,
    toy_prove_stats,
    toy_verify,
)
from qnk.errors import JudgeReject, MalformedProof
from qnk.primitives import ro_query
from qnk.qma import Witness, fixture, ghz_witness
from qnk.rand import Drbg

PAR = fixture("par8")
YES = claim_for(PAR, b"\x07")
NO = claim_for(PAR, b"\x03")


def mini_proofs():
    singles = [(b, d) for b in range(2) for d in range(4)]
    return itertools.product(singles, repeat=4)


class TestOracleProtocol:
    def test_completeness(self):
        pp, r = oracle_keygen(YES, Drbg(1))
        pi = oracle_prove(pp, Witness.empty(), Drbg(2))
        assert oracle_verify(YES, pi, r) == 1

    def test_random_tags_rejected(self):
        pp, r = oracle_keygen(YES, Drbg(3))
        d = Drbg(4)
        assert sum(oracle_verify(YES, d.bytes(16), r) for _ in range(10 ** 5)) == 0

    def test_no_instance_judge_rejects(self):
        pp, _ = oracle_keygen(NO, Drbg(5))
        with pytest.raises(JudgeReject):
            oracle_prove(pp, Witness.empty(), Drbg(6))

    def test_quantum_witness(self):
        ghz = claim_for(fixture("ghz"), b"\x01")
        pp, r = oracle_keygen(ghz, Drbg(7))
        pi = oracle_prove(pp, Witness(ghz_witness(), 5), Drbg(8))
        assert oracle_verify(ghz, pi, r) == 1

    def test_wrong_claim_rejected(self):
        pp, r = oracle_keygen(YES, Drbg(9))
        pi = oracle_prove(pp, Witness.empty(), Drbg(10))
        assert oracle_verify(NO, pi, r) == 0


class TestToyProtocol:
    def test_honest_accept_rate(self):
        accepted = 0
        for s in range(100):
            pp, r = toy_keygen(YES, Drbg(100 + s))
            pi = toy_prove(pp, Witness.empty(), Drbg(200 + s))
            accepted += toy_verify(YES, pi, r)
        assert accepted >= 90

    def test_no_instance_reject_rate(self):
        accepted = 0
        for s in range(100):
            pp, r = toy_keygen(NO, Drbg(300 + s))
            pi = toy_prove(pp, Witness.empty(), Drbg(400 + s))
            accepted += toy_verify(NO, pi, r)
        assert accepted <= 10

    def test_flip_semantics(self):
        pp, r = toy_keygen(YES, Drbg(11))
        pi = toy_prove(pp, Witness.empty(), Drbg(12))
        assert toy_verify(YES, pi, r) == 1
        for i, basis in enumerate(r.body.bases):
            mutated = list(pi)
            b, d = mutated[i]
            mutated[i] = (1 - b, d)
            got = toy_verify(YES, tuple(mutated), r)
            assert got == (1 if basis == 0 else 0)

    def test_malformed_arity(self):
        pp, r = toy_keygen(YES, Drbg(13))
        pi = toy_prove(pp, Witness.empty(), Drbg(14))
        with pytest.raises(MalformedProof):
            toy_verify(YES, pi[:-1], r)

    def test_proof_encoding_roundtrip(self):
        pp, _ = toy_keygen(YES, Drbg(15))
        pi = toy_prove(pp, Witness.empty(), Drbg(16))
        assert decode_base_proof(PROTO_TOY, encode_base_proof(PROTO_TOY, pi)) == pi


class TestStarLayer:
    def test_roundtrip(self):
        s = keygen_star(YES, PROTO_TOY, Drbg(17))
        proof = star_prove(s.pp, Witness.empty(), s.oracle, Drbg(18))
        assert star_verify(YES, proof, s.r, s.oracle) == 1

    def test_tampered_hash(self):
        s = keygen_star(YES, PROTO_TOY, Drbg(19))
        proof = star_prove(s.pp, Witness.empty(), s.oracle, Drbg(20))
        bad = CvqcProof(proof.pi, bytes(17))
        assert star_verify(YES, bad, s.r, s.oracle) == 0

    def test_tampered_proof_with_original_hash(self):
        s = keygen_star(YES, PROTO_TOY, Drbg(21))
        proof = star_prove(s.pp, Witness.empty(), s.oracle, Drbg(22))
        d = Drbg(23)
        tested = 0
        rejected = 0
        for _ in range(10 ** 4):
            pi = tuple((d.bit(), d.randint(0, 15)) for _ in range(8))
            if pi == proof.pi:
                continue
            tested += 1
            rejected += 1 - star_verify(YES, CvqcProof(pi, proof.h), s.r, s.oracle)
        assert rejected == tested


class TestTrapdoorLayer:
    def test_same_seed_same_keys(self):
        honest = keygen_star(YES, PROTO_TOY, Drbg(24))
        trapdoor = td_gen(YES, PROTO_TOY, Drbg(24))
        assert honest.pp.to_bytes() == trapdoor.pp.to_bytes()
        assert honest.r.to_bytes() == trapdoor.r.to_bytes()

    def test_oracle_bit_unmasks_verdict(self):
        s = td_gen(YES, PROTO_TOY, Drbg(25))
        d = Drbg(26)
        from qnk.primitives import prf_eval
        for _ in range(200):
            pi = tuple((d.bit(), d.randint(0, 15)) for _ in range(8))
            enc = encode_base_proof(PROTO_TOY, pi)
            bit = ro_query(s.oracle, enc)[16] ^ (prf_eval(s.td, enc)[0] & 1)
            assert bit == toy_verify(YES, pi, s.r)

    def test_verification_equivalence_mini(self):
        s = td_gen(YES, PROTO_TOY, Drbg(27), MINI_PARAMS)
        for pi in mini_proofs():
            h = ro_query(s.oracle, encode_base_proof(PROTO_TOY, pi))
            proof = CvqcProof(pi, h)
            assert star_verify(YES, proof, s.r, s.oracle) == \
                td_verify(YES, proof, s.td, s.oracle, PROTO_TOY)

    def test_td_verify_honest_proof(self):
        s = td_gen(YES, PROTO_TOY, Drbg(28))
        proof = star_prove(s.pp, Witness.empty(), s.oracle, Drbg(29))
        assert td_verify(YES, proof, s.td, s.oracle, PROTO_TOY) == 1

    def test_mismatched_hash_rejected(self):
        s = td_gen(YES, PROTO_TOY, Drbg(30))
        proof = star_prove(s.pp, Witness.empty(), s.oracle, Drbg(31))
        assert td_verify(YES, CvqcProof(proof.pi, bytes(17)), s.td, s.oracle,
                         PROTO_TOY) == 0


class TestSimMode:
    def test_consistent_pairs_never_accept(self):
        s = sim_gen(YES, PROTO_TOY, Drbg(32), MINI_PARAMS)
        for pi in mini_proofs():
            h = ro_query(s.oracle, encode_base_proof(PROTO_TOY, pi))
            assert td_verify(YES, CvqcProof(pi, h), s.td, s.oracle, PROTO_TOY) == 0

    def test_inconsistent_pairs_never_accept(self):
        s = sim_gen(YES, PROTO_TOY, Drbg(33))
        d = Drbg(34)
        for _ in range(1000):
            pi = tuple((d.bit(), d.randint(0, 15)) for _ in range(8))
            assert td_verify(YES, CvqcProof(pi, d.bytes(17)), s.td, s.oracle,
                             PROTO_TOY) == 0

    def test_oracles_agree_on_honest_traces_of_null_claims(self):
        # a null claim's honest prover queries are all rejecting inputs, so
        # the trapdoor and simulation oracles answer them identically
        claim = claim_for(fixture("null0"), b"\x01", reps=1)
        tdo = td_gen(claim, PROTO_TOY, Drbg(35))
        simo = sim_gen(claim, PROTO_TOY, Drbg(35))
        for s in range(50):
            pi = toy_prove(tdo.pp, Witness.empty(copies=1), Drbg(500 + s))
            enc = encode_base_proof(PROTO_TOY, pi)
            assert ro_query(tdo.oracle, enc) == ro_query(simo.oracle, enc)


class TestVariants:
    def test_stats_variant_checks_subset(self):
        pp, r = toy_keygen(YES, Drbg(36), ToyParams(variant=TOY_STATS))
        salt, pi = toy_prove_stats(pp, Witness.empty(), Drbg(37))
        assert stats_verify(YES, salt, pi, r) == 1

    def test_linear_variant_checks_all_positions(self):
        pp, r = toy_keygen(YES, Drbg(38), ToyParams(variant=TOY_LINEAR))
        pi = toy_prove(pp, Witness.empty(), Drbg(39))
        assert toy_verify(YES, pi, r) == 1
        for i in range(r.body.K):
            mutated = list(pi)
            b, d = mutated[i]
            mutated[i] = (1 - b, d)
            assert toy_verify(YES, tuple(mutated), r) == 0

    def test_verify_key_serialization(self):
        for params in (ToyParams(), MINI_PARAMS, ToyParams(variant=TOY_STATS)):
            _, r = toy_keygen(YES, Drbg(40), params)
            assert CvqcVerifyKey.from_bytes(r.to_bytes()).to_bytes() == r.to_bytes()
        _, r = oracle_keygen(YES, Drbg(41))
        assert CvqcVerifyKey.from_bytes(r.to_bytes()).to_bytes() == r.to_bytes()


class TestBlindWrapper:
    def test_completeness(self):
        accepted = 0
        for s in range(100):
            bp, bvk, oracle = blind_keygen(YES, Drbg(600 + s))
            proof = blind_prove(bp, Witness.empty(), oracle, Drbg(700 + s))
            accepted += blind_verify(YES, proof, bvk, oracle)
        assert accepted >= 90

    def test_parameters_hide_the_claim(self):
        bp0, _, _ = blind_keygen(YES, Drbg(42))
        bp1, _, _ = blind_keygen(claim_for(fixture("par8"), b"\x1f"), Drbg(43))
        # public metadata: key id and sealed payload length
        assert len(bp0.ct_pp.payload) == len(bp1.ct_pp.payload)
        assert bp0.ct_pp.eval_depth == bp1.ct_pp.eval_depth

    def test_tampered_challenge_rejected(self):
        bp, bvk, oracle = blind_keygen(YES, Drbg(44))
        proof = blind_prove(bp, Witness.empty(), oracle, Drbg(45))
        import dataclasses
        bad = dataclasses.replace(proof, c=bytes(16))
        assert blind_verify(YES, bad, bvk, oracle) == 0

    def test_decrypt_then_verify_matches_unblinded_flow(self):
        # dual run: the four-message protocol executed in the clear with the
        # same seeds gives the same verdict as the blind wrapper
        from qnk.cvqc import _toy_prove1, _toy_prove2, _toy_verify4
        from qnk.qfhe import qfhe_dec
        from qnk.wire import unpack_fields
        for s in range(20):
            bp, bvk, oracle = blind_keygen(YES, Drbg(800 + s))
            drbg = Drbg(900 + s)
            proof = blind_prove(bp, Witness.empty(), oracle, drbg)
            blind_bit = blind_verify(YES, proof, bvk, oracle)
            # unblinded replay with the same prover randomness
            pp, r = toy_keygen(YES, Drbg(800 + s).child("keygen"))
            y, st = _toy_prove1(pp, Witness.empty(), Drbg(900 + s).child("prove1"))
            pi = _toy_prove2(pp, y, proof.c, st)
            clear_bit = _toy_verify4(YES, y, proof.c, pi, r)
            assert blind_bit == clear_bit == 1
            # and the decrypted transcript matches the clear one
            dec_y, dec_pi = unpack_fields(qfhe_dec(bvk.sk, proof.ct_pi), 2)
            assert dec_y == y and decode_base_proof(PROTO_TOY, dec_pi) == pi

    def test_claim_digest_changes(self):
        assert YES.digest() != NO.digest()
        assert Claim.from_bytes(YES.to_bytes()) == YES
