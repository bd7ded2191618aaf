"""Proof systems: a NIZK whose CRS is a pair of sealed programs (statement ->
witness-encryption ciphertext, and (statement, candidate) -> verdict), the
soundness-hybrid program family for it, modeled NIWI/ZAP systems, and the
two-message publicly verifiable argument (ZAPR) built from all of the above
plus SBSH commitments.

The NIZK prover evaluates the sealed encryptor on its statement and decrypts
with witness copies; the resulting 16-byte PRF value is the proof. The
simulator reads the same value straight from the setup escrow, so simulated
and honest proofs are byte-equal whenever decryption succeeds.

NIWI/ZAP are modeled idealized primitives: a relation-scoped sealed prover
issues a tag depending only on the statement (witness indistinguishability
holds as byte equality), after checking the witness.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .circuit_ir import (
    Program,
    ProgramBuilder,
    SealedProgram,
    ggm_key_blob,
    obf_io,
    punctured_key_to_bytes,
)
from .errors import (
    InvalidWitness,
    NoValidNizk,
    ProofFailed,
    SetupProofInvalid,
    WidthMismatch,
)
from .nullio import WeCiphertext, we_cfg as _we_cfg, we_dec_bytes
from .primitives import (
    KEY_LEN,
    PrfKey,
    SbshKeys,
    ggm_eval,
    ggm_punct,
    owf,
    prf_eval,
    prf_gen,
    sbsh_com,
    sbsh_gen,
    sbsh_key,
)
from .qma import QmaLanguage, Witness, resolve_language
from .rand import Drbg
from .wire import pack_fields, unpack_fields

PROOF_LEN = KEY_LEN




# ---------------------------------------------------------------------------
# NIZK


@dataclass
class NizkCrs:
    p_prog: SealedProgram    # statement -> serialized WE ciphertext
    v_prog: SealedProgram    # (statement, candidate) -> verdict byte
    stmt_bytes: int
    lang_ref: bytes
    escrow: dict = field(repr=False, default=None)  # test-only setup randomness

    def digest(self) -> bytes:
        return hashlib.sha256(self.p_prog.to_bytes() + self.v_prog.to_bytes()).digest()


@dataclass(frozen=True)
class NizkProof:
    pi: bytes

    def __post_init__(self):
        if len(self.pi) != PROOF_LEN:
            raise WidthMismatch("proof must be 16 bytes")


def _stmt_domain_bits(L: QmaLanguage) -> int:
    if L.statement_bits > 16:
        raise WidthMismatch("statement space wider than 16 bits")
    return 8 if L.statement_bits <= 8 else 16


def _encode_stmt(L: QmaLanguage, x: bytes) -> bytes:
    n = _stmt_domain_bits(L) // 8
    if len(x) != n:
        raise WidthMismatch(f"statement must be {n} bytes for this language")
    return x


def _build_p_program(L: QmaLanguage, k0_blob: bytes, k1_blob: bytes) -> Program:
    b = ProgramBuilder(1)
    x = b.input(0)
    m = b.host("GGM_EVAL", b.const(k0_blob), x)
    coins = b.host("GGM_EVAL", b.const(k1_blob), x)
    ct = b.host("WE_ENC", x, m, coins, consts=(_we_cfg(L),))
    return b.build([ct])


def _build_v_program(k0_blob: bytes) -> Program:
    b = ProgramBuilder(2)
    x = b.input(0)
    y = b.input(1)
    m = b.host("GGM_EVAL", b.const(k0_blob), x)
    return b.build([b.eq(b.host("OWF", m), b.host("OWF", y))])


def nizk_setup(L: QmaLanguage, seed) -> NizkCrs:
    drbg = Drbg(seed).child("nizk-setup")
    domain = _stmt_domain_bits(L)
    k0 = prf_gen(drbg.child("k0"), domain)
    k1 = prf_gen(drbg.child("k1"), domain)
    p_prog = _build_p_program(L, ggm_key_blob(k0), ggm_key_blob(k1))
    v_prog = _build_v_program(ggm_key_blob(k0))
    x_star = bytes(domain // 8)
    fam = nizk_hybrid_programs(L, k0, k1, x_star, drbg.child("pad-sizing"))
    p_budget = max(fam[n].size for n in ("P", "P1", "P2", "P3", "Pstar"))
    v_budget = max(fam[n].size for n in ("V", "V1", "V2", "Vstar"))
    return NizkCrs(
        p_prog=obf_io(p_prog, p_budget),
        v_prog=obf_io(v_prog, v_budget),
        stmt_bytes=domain // 8,
        lang_ref=L.ref,
        escrow={"k0": k0, "k1": k1, "lang": L, "seed": seed},
    )


def nizk_prove(crs: NizkCrs, witness: Witness, x: bytes, drbg: Drbg) -> NizkProof:
    L = resolve_language(crs.lang_ref)
    ct = WeCiphertext.from_bytes(crs.p_prog.run(_encode_stmt(L, x)))
    m = we_dec_bytes(ct, witness, drbg)
    if m is None:
        raise ProofFailed("witness decryption returned bottom")
    return NizkProof(m)


def nizk_verify(crs: NizkCrs, proof: NizkProof, x: bytes) -> int:
    L = resolve_language(crs.lang_ref)
    return 1 if crs.v_prog.run(_encode_stmt(L, x), proof.pi) == b"\x01" else 0


def nizk_sim(crs: NizkCrs, x: bytes) -> NizkProof:
    """Simulation from the setup randomness: the proof is the PRF value the
    honest prover would decrypt."""
    if crs.escrow is None:
        raise ProofFailed("simulator needs the setup-randomness escrow")
    L = resolve_language(crs.lang_ref)
    return NizkProof(ggm_eval(crs.escrow["k0"], _encode_stmt(L, x)))


# ---------------------------------------------------------------------------
# soundness-hybrid program family


def _branch_on_xstar(b: ProgramBuilder, x: int, x_star: bytes, then_id: int,
                     else_id: int) -> int:
    return b.ite(b.eq(x, b.const(x_star)), then_id, else_id)


def nizk_hybrid_programs(L: QmaLanguage, k0: PrfKey, k1: PrfKey, x_star: bytes,
                         drbg: Drbg) -> dict[str, Program]:
    """The encryptor/verdict program variants from the soundness argument:
    puncture the keys at x_star and hardwire that point's values step by step
    until the verdict there tests against a hardwired image of a fresh
    preimage."""
    cfg = _we_cfg(L)
    k0b, k1b = ggm_key_blob(k0), ggm_key_blob(k1)
    k0p = punctured_key_to_bytes(ggm_punct(k0, x_star))
    k1p = punctured_key_to_bytes(ggm_punct(k1, x_star))
    m_star = ggm_eval(k0, x_star)
    coins_star = ggm_eval(k1, x_star)
    u = drbg.child("u").bytes(KEY_LEN)
    r_tilde = drbg.child("r").bytes(KEY_LEN)

    def p_variant(at_star_m: bytes, at_star_coins: bytes, punct_k0: bool) -> Program:
        b = ProgramBuilder(1)
        x = b.input(0)
        ct_star = b.host("WE_ENC", b.const(x_star), b.const(at_star_m),
                         b.const(at_star_coins), consts=(cfg,))
        if punct_k0:
            m = b.host("GGM_EVAL_PUNCT", b.const(k0p), x)
        else:
            m = b.host("GGM_EVAL", b.const(k0b), x)
        coins = b.host("GGM_EVAL_PUNCT", b.const(k1p), x)
        ct = b.host("WE_ENC", x, m, coins, consts=(cfg,))
        return b.build([_branch_on_xstar(b, x, x_star, ct_star, ct)])

    def v_variant(at_star_key_or_image: bytes, hardwired_image: bool) -> Program:
        b = ProgramBuilder(2)
        x = b.input(0)
        y = b.input(1)
        hy = b.host("OWF", y)
        if hardwired_image:
            star_hit = b.eq(b.const(at_star_key_or_image), hy)
        else:
            star_hit = b.eq(b.host("OWF", b.const(at_star_key_or_image)), hy)
        m = b.host("GGM_EVAL_PUNCT", b.const(punctured_key_to_bytes(ggm_punct(k0, x_star))), x)
        rest = b.eq(b.host("OWF", m), hy)
        return b.build([_branch_on_xstar(b, x, x_star, star_hit, rest)])

    return {
        "P": _build_p_program(L, k0b, k1b),
        "P1": p_variant(m_star, coins_star, punct_k0=False),
        "P2": p_variant(m_star, u, punct_k0=False),
        "P3": p_variant(m_star, u, punct_k0=True),
        "Pstar": p_variant(bytes(KEY_LEN), u, punct_k0=True),
        "V": _build_v_program(k0b),
        "V1": v_variant(m_star, hardwired_image=False),
        "V2": v_variant(r_tilde, hardwired_image=False),
        "Vstar": v_variant(owf(r_tilde), hardwired_image=True),
    }


def nizk_hybrid_family(crs: NizkCrs, x_star: bytes) -> dict[str, Program]:
    if crs.escrow is None:
        raise ProofFailed("hybrid family needs the setup-randomness escrow")
    return nizk_hybrid_programs(
        crs.escrow["lang"], crs.escrow["k0"], crs.escrow["k1"], x_star,
        Drbg(crs.escrow["seed"]).child("hybrids"))


# ---------------------------------------------------------------------------
# modeled NIWI / ZAP


@dataclass(frozen=True)
class Relation:
    name: str
    check: object  # (x: bytes, w: bytes) -> bool


class NiwiScheme:
    """Relation-scoped sealed prover: the proof is a PRF tag over the
    statement, issued only after a witness check, and therefore identical for
    every valid witness."""

    def __init__(self, drbg: Drbg):
        self.__master = drbg.bytes(KEY_LEN)

    def _tag(self, rel: Relation, x: bytes) -> bytes:
        return prf_eval(PrfKey(self.__master), rel.name.encode() + b"|" + x)

    def prove(self, rel: Relation, x: bytes, w: bytes) -> bytes:
        if not rel.check(x, w):
            raise InvalidWitness(f"witness rejected by relation {rel.name!r}")
        return self._tag(rel, x)

    def verify(self, rel: Relation, proof: bytes, x: bytes) -> int:
        return 1 if proof == self._tag(rel, x) else 0


class ZapScheme(NiwiScheme):
    """Two-message variant: the first message (crs) folds into the tag."""

    def __init__(self, drbg: Drbg):
        super().__init__(drbg.child("key"))
        self.crs = drbg.child("crs").bytes(KEY_LEN)

    def _tag(self, rel: Relation, x: bytes) -> bytes:
        return super()._tag(rel, self.crs + b"|" + x)


def zap_setup(drbg: Drbg) -> ZapScheme:
    return ZapScheme(drbg)


# ---------------------------------------------------------------------------
# ZAPR

_SBSH_MSG_LEN = 1 + PROOF_LEN  # branch byte plus one proof/preimage payload


@dataclass
class ZaprCrs:
    crs0: NizkCrs
    crs1: NizkCrs
    y0: bytes
    y1: bytes
    ck0: bytes
    zap: ZapScheme
    niwi: NiwiScheme
    setup_proof: bytes
    lang_ref: bytes
    sbsh_t: int
    escrow: dict = field(repr=False, default=None)


@dataclass(frozen=True)
class ZaprProof:
    ck1: bytes
    c_nizk: bytes
    c_owf: bytes
    zap_proof: bytes


def _setup_relation(L: QmaLanguage) -> Relation:
    def check(x: bytes, w: bytes) -> bool:
        digest0, y0, digest1, y1 = unpack_fields(x, 4)
        b, seed, pre = unpack_fields(w, 3)
        digest, y = (digest0, y0) if b == b"\x00" else (digest1, y1)
        return (nizk_setup(L, seed).digest() == digest) and (owf(pre) == y)

    return Relation("zapr-setup", check)


def _setup_stmt(crs: ZaprCrs) -> bytes:
    return pack_fields(crs.crs0.digest(), crs.y0, crs.crs1.digest(), crs.y1)


def _main_relation(crs: ZaprCrs) -> Relation:
    """Disjunction: the committed value opens to a verifying proof under one
    CRS, or to a preimage of one of the published images."""

    def check(stmt: bytes, w: bytes) -> bool:
        x, ck1, c_nizk, c_owf = unpack_fields(stmt, 4)
        keys = SbshKeys(crs.ck0, ck1, crs.sbsh_t)
        branch, payload, r = unpack_fields(w, 3)
        if branch == b"A":
            if sbsh_com(keys, payload, r) != c_nizk:
                return False
            b = payload[0]
            pi = NizkProof(payload[1:])
            target = crs.crs0 if b == 0 else crs.crs1
            return nizk_verify(target, pi, x) == 1
        if sbsh_com(keys, payload, r) != c_owf:
            return False
        b = payload[0]
        return owf(payload[1:]) == (crs.y0 if b == 0 else crs.y1)

    return Relation("zapr-main", check)


def _main_stmt(crs: ZaprCrs, x: bytes, proof: ZaprProof) -> bytes:
    return pack_fields(x, proof.ck1, proof.c_nizk, proof.c_owf)


def zapr_setup(L: QmaLanguage, seed, sbsh_t: int = 4) -> ZaprCrs:
    drbg = Drbg(seed).child("zapr-setup")
    crs0 = nizk_setup(L, drbg.child("crs0").bytes(16))
    crs1 = nizk_setup(L, drbg.child("crs1").bytes(16))
    x0 = drbg.child("x0").bytes(KEY_LEN)
    x1 = drbg.child("x1").bytes(KEY_LEN)
    ck0, gen_rand = sbsh_gen(drbg.child("sbsh"))
    zap = zap_setup(drbg.child("zap"))
    niwi = NiwiScheme(drbg.child("niwi"))
    crs = ZaprCrs(crs0, crs1, owf(x0), owf(x1), ck0, zap, niwi, b"", L.ref, sbsh_t,
                  escrow={"gen_rand": gen_rand, "x0": x0, "x1": x1})
    witness = pack_fields(b"\x00", crs0.escrow["seed"], x0)
    crs.setup_proof = niwi.prove(_setup_relation(L), _setup_stmt(crs), witness)
    return crs


def zapr_prove(crs: ZaprCrs, witness: Witness, x: bytes, drbg: Drbg) -> ZaprProof:
    L = resolve_language(crs.lang_ref)
    if crs.niwi.verify(_setup_relation(L), crs.setup_proof, _setup_stmt(crs)) != 1:
        raise SetupProofInvalid("reference-string consistency proof rejected")
    half = Witness(witness.state, witness.copies // 2)
    pis = []
    for idx, sub_crs in enumerate((crs.crs0, crs.crs1)):
        try:
            pi = nizk_prove(sub_crs, half, x, drbg.child(f"nizk{idx}"))
        except ProofFailed:
            pi = None
        pis.append(pi)
    b = None
    for idx, pi in enumerate(pis):
        if pi is not None and nizk_verify((crs.crs0, crs.crs1)[idx], pi, x) == 1:
            b = idx
            break
    if b is None:
        raise NoValidNizk("neither reference string yielded a verifying proof")
    ck1 = sbsh_key(crs.ck0, drbg.child("ck1"))
    keys = SbshKeys(crs.ck0, ck1, crs.sbsh_t)
    r1 = drbg.child("r1").bytes(KEY_LEN)
    r2 = drbg.child("r2").bytes(KEY_LEN)
    c_nizk = sbsh_com(keys, bytes([b]) + pis[b].pi, r1)
    c_owf = sbsh_com(keys, bytes(_SBSH_MSG_LEN), r2)
    proof = ZaprProof(ck1, c_nizk, c_owf, b"")
    zap_witness = pack_fields(b"A", bytes([b]) + pis[b].pi, r1)
    zap_proof = crs.zap.prove(_main_relation(crs), _main_stmt(crs, x, proof),
                              zap_witness)
    return ZaprProof(ck1, c_nizk, c_owf, zap_proof)


def zapr_verify(crs: ZaprCrs, proof: ZaprProof, x: bytes) -> int:
    return crs.zap.verify(_main_relation(crs), proof.zap_proof,
                          _main_stmt(crs, x, proof))
