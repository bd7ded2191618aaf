"""Encrypted delegation suite over witness encryption: ciphertext-policy ABE
for quantum policies, a key-policy wrapper through a universal evaluator,
the per-index hybrid program families behind the ABE and constrained-PRF
security arguments, lockable obfuscation of pseudo-deterministic quantum
circuits, a one-sided attribute-hiding (predicate encryption) compiler, a
constrained PRF, and secret sharing for monotone access structures.

Attributes travel as 2-byte big-endian wires (low `attr_len` bits used) so
that the 16-bit puncturable-PRF domain covers them.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import qfhe
from .circuit_ir import (
    BOTTOM,
    LockSpec,
    Program,
    ProgramBuilder,
    SealedProgram,
    ggm_key_blob,
    lockobf,
    lockobf_sim,
    obf_io,
    punctured_key_to_bytes,
    register_gate,
    unwrap,
)
from .errors import MalformedCiphertext, WidthMismatch
from .nullio import WeCiphertext, we_cfg as _we_cfg, we_dec_bqp, we_enc_bytes
from .primitives import KEY_LEN, PrfKey, commit, ggm_eval, ggm_punct, prf_gen, prg
from .qma import (
    QmaLanguage,
    QuantumCircuit,
    Witness,
    make_policy_language,
    make_share_language,
)
from .rand import Drbg
from .wire import pack_fields, unpack_fields

ATTR_WIRE_BYTES = 2
MAX_ATTR_BITS = 10


def attr_wire(x, attr_len: int) -> bytes:
    """Attribute as a 2-byte wire (low attr_len bits significant)."""
    if isinstance(x, bytes):
        x = int.from_bytes(x, "big")
    if not 0 <= x < (1 << attr_len):
        raise WidthMismatch(f"attribute {x} out of range for {attr_len} bits")
    return x.to_bytes(ATTR_WIRE_BYTES, "big")


# ---------------------------------------------------------------------------
# universal policy family (key-policy wrapper support)

POLICY_FAMILY: dict[int, QuantumCircuit] = {}


def register_policy(policy_id: int, circuit: QuantumCircuit) -> None:
    POLICY_FAMILY[policy_id] = circuit


def _default_policies():
    # id 1: odd parity of a 4-bit attribute; id 2: at-least-2-of-3; id 3: never
    par = QuantumCircuit(5, tuple(("CNOT", (i, 0)) for i in range(1, 5)), n_input=4)
    register_policy(1, par)
    th = QuantumCircuit(5, (("CCX", (2, 3, 1)), ("CCX", (2, 4, 1)),
                            ("CCX", (3, 4, 1)), ("CNOT", (1, 0)),
                            ("CCX", (2, 3, 1)), ("CCX", (2, 4, 1))), n_input=3)
    register_policy(2, th)
    register_policy(3, QuantumCircuit(2, (), n_input=1))


def make_universal_language(x_attr: bytes) -> QmaLanguage:
    """BQP language whose instances are policy-family ids: instance pid is a
    yes-instance exactly when the registered circuit accepts x_attr."""
    from .qma import _bits_of

    def build(pid_bytes: bytes, cw: bytes = b""):
        pid = int.from_bytes(pid_bytes, "big")
        if pid not in POLICY_FAMILY:
            return QuantumCircuit(1, (), n_input=0)  # unknown policy: reject
        circ = POLICY_FAMILY[pid]
        n = circ.n_input
        bits = _bits_of(x_attr, n)
        load = tuple(("X", (circ.n_qubits - n + i,)) for i, b in enumerate(bits) if b)
        return QuantumCircuit(circ.n_qubits, load + circ.gates, n_input=0)

    return QmaLanguage("upolicy", 8 * ATTR_WIRE_BYTES, 0, 1.0, 0.0, build,
                       pack_fields(b"upolicy", x_attr))


def _install_language_hook():
    """Extend the language-reference resolver with the universal-policy kind."""
    from .qma import register_language_kind
    register_language_kind(b"upolicy", lambda r: make_universal_language(r.field()))


# ---------------------------------------------------------------------------
# ciphertext-policy ABE


@dataclass(frozen=True)
class AbeSecretKey:
    x: bytes      # 2-byte attribute wire
    key: bytes    # 16 bytes

    def to_bytes(self) -> bytes:
        return pack_fields(self.x, self.key)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "AbeSecretKey":
        x, key = unpack_fields(blob, 2)
        return cls(x, key)


@dataclass
class AbeKeys:
    msk: PrfKey
    mpk: SealedProgram     # (attribute, candidate key) -> verdict byte
    attr_len: int
    escrow: dict = field(repr=False, default=None)


@dataclass
class AbeCiphertext:
    e_prog: SealedProgram  # (attribute, key) -> tagged WE ciphertext or bottom
    policy_digest: bytes
    attr_len: int

    def to_bytes(self) -> bytes:
        return pack_fields(self.e_prog.to_bytes(), self.policy_digest,
                           bytes([self.attr_len]))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "AbeCiphertext":
        prog, digest, al = unpack_fields(blob, 3)
        return cls(SealedProgram.from_bytes(prog), digest, al[0])


def _gate_sealed_eval(*args: bytes) -> bytes:
    prog = SealedProgram.from_bytes(args[-1])
    return prog.run(*args[:-1])


register_gate("SEALED_EVAL", _gate_sealed_eval)


def _prg_image_len(attr_len: int) -> int:
    return attr_len * KEY_LEN


def _build_keycheck_program(k: PrfKey, attr_len: int) -> Program:
    """mpk circuit: accept (x, s) when the PRG images of s and of the
    attribute's PRF value coincide."""
    b = ProgramBuilder(2)
    x = b.input(0)
    s = b.input(1)
    ln = b.const(_prg_image_len(attr_len).to_bytes(2, "big"))
    left = b.host("PRG", s, ln)
    right = b.host("PRG", b.host("GGM_EVAL", b.const(ggm_key_blob(k)), x), ln)
    return b.build([b.eq(left, right)])


def abe_gen(attr_len: int, seed) -> AbeKeys:
    if attr_len > MAX_ATTR_BITS:
        raise WidthMismatch(f"attribute length {attr_len} exceeds {MAX_ATTR_BITS}")
    drbg = Drbg(seed).child("abe-gen")
    k = prf_gen(drbg.child("k"), 16)
    program = _build_keycheck_program(k, attr_len)
    fam = abe_keycheck_hybrids(k, attr_len, 0, drbg.child("sizing"))
    budget = max(p.size for p in fam.values())
    return AbeKeys(msk=k, mpk=obf_io(program, budget), attr_len=attr_len,
                   escrow={"k": k, "seed": seed})


def abe_keygen(keys: AbeKeys, x) -> AbeSecretKey:
    wire = attr_wire(x, keys.attr_len)
    return AbeSecretKey(wire, ggm_eval(keys.msk, wire))


def _build_encryptor_program(mpk_blob: bytes, policy: QmaLanguage, m: bytes,
                             r: PrfKey) -> Program:
    b = ProgramBuilder(2)
    x = b.input(0)
    s = b.input(1)
    bit = b.host("SEALED_EVAL", x, s, consts=(mpk_blob,))
    coins = b.host("GGM_EVAL", b.const(ggm_key_blob(r)), x)
    ct = b.host("WE_ENC", x, b.const(m), coins, consts=(_we_cfg(policy),))
    tagged = b.concat(b.const(b"\x01"), ct)
    out = b.ite(b.eq(bit, b.const(b"\x01")), tagged, b.const(BOTTOM))
    return b.build([out])


def abe_enc(keys_mpk: SealedProgram, policy: QmaLanguage, m: bytes, seed,
            attr_len: int) -> AbeCiphertext:
    """Encrypt to a policy language over attributes; decryptable by keys whose
    attribute the policy accepts."""
    drbg = Drbg(seed).child("abe-enc")
    r = prf_gen(drbg.child("r"), 16)
    mpk_blob = keys_mpk.to_bytes()
    program = _build_encryptor_program(mpk_blob, policy, m, r)
    fam = abe_encryptor_hybrids(mpk_blob, policy, m, m, r, attr_len, 0,
                                drbg.child("sizing"))
    budget = max(p.size for p in fam.values())
    digest = hashlib.sha256(policy.ref).digest()
    return AbeCiphertext(obf_io(program, budget), digest, attr_len)


def abe_enc_circuit(keys: AbeKeys, Q: QuantumCircuit, m: bytes, seed) -> AbeCiphertext:
    return abe_enc(keys.mpk, make_policy_language(Q), m, seed, keys.attr_len)


def abe_dec(sk: AbeSecretKey, ct: AbeCiphertext, drbg: Drbg):
    """Returns the message bytes or None."""
    tagged = ct.e_prog.run(sk.x, sk.key)
    we_bytes = unwrap(tagged)
    if we_bytes is None:
        return None
    return we_dec_bqp(WeCiphertext.from_bytes(we_bytes), drbg)


# key-policy wrapper: keys carry policies (family ids), ciphertexts attributes

KP_ATTR_LEN = 8  # policy-id space


def kp_gen(seed) -> AbeKeys:
    return abe_gen(KP_ATTR_LEN, seed)


def kp_keygen(keys: AbeKeys, policy_id: int) -> AbeSecretKey:
    return abe_keygen(keys, policy_id)


def kp_enc(keys_mpk: SealedProgram, x_attr: bytes, m: bytes, seed) -> AbeCiphertext:
    return abe_enc(keys_mpk, make_universal_language(x_attr), m, seed, KP_ATTR_LEN)


def kp_dec(sk: AbeSecretKey, ct: AbeCiphertext, drbg: Drbg):
    return abe_dec(sk, ct, drbg)


# ---------------------------------------------------------------------------
# per-index hybrid program families


def _index_chain(b: ProgramBuilder, x: int, attr_len: int, i: int,
                 lt: int, eq: int, gt: int) -> int:
    """Nested equality dispatch realizing the x < i / x = i / x > i split."""
    out = gt
    for j in range((1 << attr_len) - 1, -1, -1):
        tgt = eq if j == i else (lt if j < i else gt)
        out = b.ite(b.eq(x, b.const(attr_wire(j, attr_len))), tgt, out)
    return out


def abe_keycheck_hybrids(k: PrfKey, attr_len: int, i: int,
                         drbg: Drbg) -> dict[str, Program]:
    """mpk-circuit variants: puncture the key at attribute i, replace its
    PRF value, widen to a raw random image, then reject i outright."""
    wire_i = attr_wire(i, attr_len)
    ki = punctured_key_to_bytes(ggm_punct(k, wire_i))
    k_at_i = ggm_eval(k, wire_i)
    k_tilde = drbg.child("ktilde").bytes(KEY_LEN)
    K_img = drbg.child("K").bytes(_prg_image_len(attr_len))
    ln_bytes = _prg_image_len(attr_len).to_bytes(2, "big")

    def variant(at_i: str) -> Program:
        b = ProgramBuilder(2)
        x = b.input(0)
        s = b.input(1)
        ln = b.const(ln_bytes)
        left = b.host("PRG", s, ln)
        rest = b.eq(left, b.host("PRG", b.host("GGM_EVAL_PUNCT", b.const(ki), x), ln))
        if at_i == "honest":
            eq_node = b.eq(left, b.host("PRG", b.const(k_at_i), ln))
        elif at_i == "random-key":
            eq_node = b.eq(left, b.host("PRG", b.const(k_tilde), ln))
        elif at_i == "random-image":
            eq_node = b.eq(left, b.const(K_img))
        else:
            eq_node = b.const(b"\x00")
        out = _index_chain(b, x, attr_len, i, rest, eq_node, rest)
        return b.build([out])

    return {
        "P": _build_keycheck_program(k, attr_len),
        "P1": variant("honest"),
        "P2": variant("random-key"),
        "P3": variant("random-image"),
        "Pstar": variant("reject"),
    }


def abe_encryptor_hybrids(mpk_blob: bytes, policy: QmaLanguage, m0: bytes,
                          m1: bytes, r: PrfKey, attr_len: int, i: int,
                          drbg: Drbg) -> dict[str, Program]:
    """Encryptor variants for the message-switch argument at index i: E is the
    stage entering index i (m1 below i, m0 from i up, plain coin key); E1
    punctures the coin key and hardwires index i; E2/E3 rerandomize and switch
    the message there; Estar stops releasing at i."""
    wire_i = attr_wire(i, attr_len)
    ri = punctured_key_to_bytes(ggm_punct(r, wire_i))
    coins_i = ggm_eval(r, wire_i)
    u = drbg.child("u").bytes(KEY_LEN)
    cfg = _we_cfg(policy)

    def ct_const(b: ProgramBuilder, m: bytes, coins: bytes) -> int:
        node = b.host("WE_ENC", b.const(wire_i), b.const(m), b.const(coins),
                      consts=(cfg,))
        return b.concat(b.const(b"\x01"), node)

    def variant(stage: str) -> Program:
        b = ProgramBuilder(2)
        x = b.input(0)
        s = b.input(1)
        bit = b.host("SEALED_EVAL", x, s, consts=(mpk_blob,))
        punct = stage != "base"
        key_blob = ri if punct else ggm_key_blob(r)
        gate = "GGM_EVAL_PUNCT" if punct else "GGM_EVAL"
        coins = b.host(gate, b.const(key_blob), x)
        low = b.concat(b.const(b"\x01"),
                       b.host("WE_ENC", x, b.const(m1), coins, consts=(cfg,)))
        high = b.concat(b.const(b"\x01"),
                        b.host("WE_ENC", x, b.const(m0), coins, consts=(cfg,)))
        if stage == "base":
            at_i = high
        elif stage == "hardwired":
            at_i = ct_const(b, m0, coins_i)
        elif stage == "fresh-coins":
            at_i = ct_const(b, m0, u)
        elif stage == "switched":
            at_i = ct_const(b, m1, u)
        else:
            at_i = b.const(BOTTOM)
        selected = _index_chain(b, x, attr_len, i, low, at_i, high)
        out = b.ite(b.eq(bit, b.const(b"\x01")), selected, b.const(BOTTOM))
        return b.build([out])

    return {
        "E": variant("base"),
        "E1": variant("hardwired"),
        "E2": variant("fresh-coins"),
        "E3": variant("switched"),
        "Estar": variant("drop"),
    }


# ---------------------------------------------------------------------------
# lockable obfuscation for pseudo-deterministic quantum circuits


def _dec_compare_program(sk: bytes) -> Program:
    b = ProgramBuilder(1)
    ct = b.input(0)
    pt = b.host("QFHE_DEC", b.const(sk), ct)
    return b.build([b.slice(pt, 1, 1 + KEY_LEN)])


@dataclass
class QLockObf:
    ct: qfhe.QfheCiphertext      # encrypted circuit description
    cc: SealedProgram            # ciphertext -> tagged payload or bottom
    pk: bytes
    desc_len: int
    payload_len: int

    def to_bytes(self) -> bytes:
        return pack_fields(self.ct.to_bytes(), self.cc.to_bytes(), self.pk,
                           self.desc_len.to_bytes(4, "big"),
                           self.payload_len.to_bytes(4, "big"))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "QLockObf":
        f = unpack_fields(blob, 5)
        return cls(qfhe.QfheCiphertext.from_bytes(f[0]),
                   SealedProgram.from_bytes(f[1]), f[2],
                   int.from_bytes(f[3], "big"), int.from_bytes(f[4], "big"))


def qlock_obf(Q, u: bytes, z: bytes, seed) -> QLockObf:
    """Lock the payload z behind the event "the encrypted circuit's output
    register equals u"."""
    drbg = Drbg(seed).child("qlock")
    keys = qfhe.qfhe_gen(drbg.child("qfhe"))
    desc = Q.to_bytes()
    ct = qfhe.qfhe_enc(keys.pk, desc, drbg.child("enc"))
    cc = lockobf(LockSpec(u, z, _dec_compare_program(keys.sk)))
    return QLockObf(ct, cc, keys.pk, len(desc), len(z))


def qlock_eval(obj: QLockObf, x_bits, drbg: Drbg):
    """Homomorphically run the encrypted circuit on x, then apply the
    compare-and-release layer. Returns payload bytes or None."""
    from .errors import MalformedCircuit
    from .qma import PseudoDetCircuit

    def universal(desc: bytes) -> bytes:
        try:
            circ = PseudoDetCircuit.from_bytes(desc)
        except (MalformedCiphertext, MalformedCircuit, ValueError, IndexError):
            return b""  # unparseable description (e.g. the simulator's zero fill)
        return circ.run(x_bits, drbg.child("run"))

    ct_out = qfhe.qfhe_eval(obj.pk, universal, obj.ct, drbg.child("eval"))
    return unwrap(obj.cc.run(ct_out.to_bytes()))


def qlock_sim(desc_len: int, payload_len: int, seed) -> QLockObf:
    """Input-independent simulator object with matching declared sizes."""
    drbg = Drbg(seed).child("qlock-sim")
    keys = qfhe.qfhe_gen(drbg.child("qfhe"))
    ct = qfhe.qfhe_enc(keys.pk, bytes(desc_len), drbg.child("enc"))
    size_c = _dec_compare_program(keys.sk).size
    return QLockObf(ct, lockobf_sim(size_c, payload_len), keys.pk,
                    desc_len, payload_len)


# ---------------------------------------------------------------------------
# one-sided attribute hiding (predicate encryption)


def _gate_abe_dec(sk_bytes: bytes, ct_blob: bytes) -> bytes:
    sk = AbeSecretKey.from_bytes(sk_bytes)
    ct = AbeCiphertext.from_bytes(ct_blob)
    seed = hashlib.sha256(b"abe-dec" + sk_bytes + ct_blob).digest()[:16]
    m = abe_dec(sk, ct, Drbg(seed))
    return m if m is not None else b""


register_gate("ABE_DEC", _gate_abe_dec)


@dataclass
class PeCiphertext:
    cc: SealedProgram
    payload_len: int

    def to_bytes(self) -> bytes:
        return pack_fields(self.cc.to_bytes(), self.payload_len.to_bytes(4, "big"))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "PeCiphertext":
        f = unpack_fields(blob, 2)
        return cls(SealedProgram.from_bytes(f[0]), int.from_bytes(f[1], "big"))


def pe_enc(keys: AbeKeys, Q: QuantumCircuit, m: bytes, seed) -> PeCiphertext:
    """Policy-hiding layer: ABE-encrypt a fresh lock value, then gate the real
    payload behind decrypting to that lock."""
    drbg = Drbg(seed).child("pe")
    u = drbg.child("u").bytes(KEY_LEN)
    abe_ct = abe_enc_circuit(keys, Q, u, drbg.child("abe").bytes(16))
    b = ProgramBuilder(1)
    sk_in = b.input(0)
    out = b.host("ABE_DEC", sk_in, b.const(abe_ct.to_bytes()))
    inner = b.build([out])
    cc = lockobf(LockSpec(u, m, inner))
    return PeCiphertext(cc, len(m))


def pe_dec(sk: AbeSecretKey, ct: PeCiphertext):
    return unwrap(ct.cc.run(sk.to_bytes()))


# ---------------------------------------------------------------------------
# constrained PRF


@dataclass
class CprfKeys:
    k: PrfKey
    abe: AbeKeys
    pp: SealedProgram   # input wire -> serialized key-policy ABE ciphertext
    escrow: dict = field(repr=False, default=None)


def _gate_abe_kp_enc(x: bytes, m: bytes, coins: bytes, cfg: bytes) -> bytes:
    mpk_blob, = unpack_fields(cfg, 1)
    ct = kp_enc(SealedProgram.from_bytes(mpk_blob), x, m, coins)
    return ct.to_bytes()


register_gate("ABE_ENC", _gate_abe_kp_enc)

CPRF_INPUT_BITS = 8


def _build_cprf_program(k: PrfKey, k_tilde: PrfKey, mpk_blob: bytes) -> Program:
    b = ProgramBuilder(1)
    x = b.input(0)
    m = b.host("GGM_EVAL", b.const(ggm_key_blob(k)), x)
    coins = b.host("GGM_EVAL", b.const(ggm_key_blob(k_tilde)), x)
    ct = b.host("ABE_ENC", x, m, coins, consts=(pack_fields(mpk_blob),))
    return b.build([ct])


def cprf_gen(seed) -> CprfKeys:
    drbg = Drbg(seed).child("cprf")
    k = prf_gen(drbg.child("k"), 16)
    k_tilde = prf_gen(drbg.child("ktilde"), 16)
    abe = kp_gen(drbg.child("abe").bytes(16))
    mpk_blob = abe.mpk.to_bytes()
    program = _build_cprf_program(k, k_tilde, mpk_blob)
    fam = cprf_hybrids(k, k_tilde, mpk_blob, attr_wire(0, CPRF_INPUT_BITS),
                       drbg.child("sizing"))
    budget = max(p.size for p in fam.values())
    return CprfKeys(k=k, abe=abe, pp=obf_io(program, budget),
                    escrow={"k": k, "k_tilde": k_tilde, "seed": seed})


def cprf_eval(keys: CprfKeys, x) -> bytes:
    return ggm_eval(keys.k, attr_wire(x, CPRF_INPUT_BITS))


def cprf_constrain(keys: CprfKeys, policy_id: int) -> AbeSecretKey:
    return kp_keygen(keys.abe, policy_id)


def cprf_ceval(pp: SealedProgram, k_q: AbeSecretKey, x, drbg: Drbg):
    """Constrained evaluation: returns the PRF value, or None when the key's
    policy rejects the input."""
    ct_bytes = pp.run(attr_wire(x, CPRF_INPUT_BITS))
    return kp_dec(k_q, AbeCiphertext.from_bytes(ct_bytes), drbg)


def cprf_hybrids(k: PrfKey, k_tilde: PrfKey, mpk_blob: bytes, x_star: bytes,
                 drbg: Drbg) -> dict[str, Program]:
    """pp-circuit variants: puncture the coin key, then the value key, then
    rerandomize and zero the value at the challenge point."""
    kp = punctured_key_to_bytes(ggm_punct(k, x_star))
    ktp = punctured_key_to_bytes(ggm_punct(k_tilde, x_star))
    m_star = ggm_eval(k, x_star)
    coins_star = ggm_eval(k_tilde, x_star)
    u = drbg.child("u").bytes(KEY_LEN)
    cfg = pack_fields(mpk_blob)

    def variant(punct_ktilde: bool, punct_k: bool, at_star_m: bytes,
                at_star_coins: bytes) -> Program:
        b = ProgramBuilder(1)
        x = b.input(0)
        ct_star = b.host("ABE_ENC", b.const(x_star), b.const(at_star_m),
                         b.const(at_star_coins), consts=(cfg,))
        m = (b.host("GGM_EVAL_PUNCT", b.const(kp), x) if punct_k
             else b.host("GGM_EVAL", b.const(ggm_key_blob(k)), x))
        coins = (b.host("GGM_EVAL_PUNCT", b.const(ktp), x) if punct_ktilde
                 else b.host("GGM_EVAL", b.const(ggm_key_blob(k_tilde)), x))
        ct = b.host("ABE_ENC", x, m, coins, consts=(cfg,))
        return b.build([b.ite(b.eq(x, b.const(x_star)), ct_star, ct)])

    return {
        "P": _build_cprf_program(k, k_tilde, mpk_blob),
        "P1": variant(True, False, m_star, coins_star),
        "P2": variant(True, True, m_star, coins_star),
        "P3": variant(True, True, m_star, u),
        "Pstar": variant(True, True, bytes(KEY_LEN), u),
    }


# ---------------------------------------------------------------------------
# secret sharing for monotone access structures


@dataclass
class ShareSet:
    shares: list            # per party: (r_i, shared WE ciphertext)
    commitments: tuple[bytes, ...]
    lang_ref: bytes         # inner access-structure language

    def to_bytes(self) -> bytes:
        body = [self.lang_ref, bytes([len(self.shares)])]
        for r_i, ct in self.shares:
            body += [r_i, ct.to_bytes()]
        body += list(self.commitments)
        return pack_fields(*body)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ShareSet":
        from .wire import Reader
        r = Reader(blob)
        lang_ref = r.field()
        n = r.field()[0]
        shares = []
        for _ in range(n):
            r_i = r.field()
            shares.append((r_i, WeCiphertext.from_bytes(r.field())))
        commitments = tuple(r.field() for _ in range(n))
        return cls(shares, commitments, lang_ref)


def ss_share(L: QmaLanguage, N: int, s: int, seed) -> ShareSet:
    """Party i receives a commitment opening; the secret is witness-encrypted
    to the statement "enough openings verify to form a qualified subset"."""
    if N > 10:
        raise WidthMismatch("at most 10 parties")
    if L.statement_bits != N:
        raise WidthMismatch("access language width must equal the party count")
    drbg = Drbg(seed).child("share")
    openings = [drbg.child(f"r{i}").bytes(KEY_LEN) for i in range(N)]
    commitments = tuple(commit(bytes([i + 1]), openings[i]).payload
                        for i in range(N))
    derived = make_share_language(L, commitments)
    statement = b"".join(commitments)
    ct = we_enc_bytes(derived, statement, bytes([s]), drbg.child("we").bytes(16))
    return ShareSet([(openings[i], ct) for i in range(N)], commitments, L.ref)


def ss_rec(share_set: ShareSet, subset: set[int], witness: Witness, drbg: Drbg):
    """Reconstruct from the shares of `subset` (0-based party indices).
    Returns the secret bit or None."""
    N = len(share_set.shares)
    cw = b"".join(
        share_set.shares[i][0] if i in subset else bytes(KEY_LEN)
        for i in range(N))
    ct = share_set.shares[next(iter(subset))][1] if subset else share_set.shares[0][1]
    from .nullio import we_dec_bytes
    out = we_dec_bytes(ct, witness, drbg, classical_witness=cw)
    return None if out is None else out[0]


_default_policies()
_install_language_hook()
