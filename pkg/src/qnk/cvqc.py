"""Classical verification of quantum computation at desk scale, plus the
trapdoor dual-mode compiler over a shared random oracle.

Two base protocols:

* ORACLE — a modeled designated-verifier argument. The prover boundary holds
  a "quantum judge" that runs the amplified claim on the witness through the
  simulator; on majority-accept it releases a PRF tag that the verifier
  recognizes. Soundness is tag-guessing (2^-128). This is the default base
  for everything downstream.

* TOY — a measurement protocol with verifier secrets, the cryptanalysis
  target. The verifier commits to a basis string x in {0,1}^K. At positions
  with x_i = 1 the prover measures a fresh history-state copy of the claim
  circuit (clock register postselected to the final step, output qubit read
  out; outcome bit 0 means "consistent with an accepting run") and encodes
  the outcome as b_i = e_i XOR <d_i, s_i> for a random d_i and the verifier
  secret s_i. Positions with x_i = 0 are completely ignored by the verifier.
  Verification recomputes e_i at the x_i = 1 positions and accepts when the
  number of mismatches against the calibrated accepting pattern t is at most
  tau (default 0).

The dual-mode layer hashes the base proof: the prover sends (pi, H(pi)); in
trapdoor mode the oracle's last output bit is F(td, pi) XOR Verify(pi), so a
td holder verifies by unmasking; in simulation mode the last bit is F(td, pi)
alone and trapdoor verification rejects everything.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import qfhe
from .errors import (
    DomainMismatch,
    JudgeReject,
    MalformedCiphertext,
    MalformedProof,
    WidthMismatch,
)
from .circuit_ir import ProgramBuilder, SealedProgram, obf_io, register_gate
from .primitives import (
    KEY_LEN,
    MODE_SIMGEN,
    MODE_TDGEN,
    MODE_UNIFORM,
    PrfKey,
    RandomOracle,
    prf_eval,
    prf_gen,
    ro_query,
)
from .qma import QmaLanguage, Witness, amplify, resolve_language
from .qsim import history_state, run_circuit
from .rand import Drbg
from .wire import Reader, pack_bytes, pack_fields, seal, unpack_fields, unseal

PROTO_ORACLE = "ORACLE"
PROTO_TOY = "TOY"

TOY_STANDARD = "standard"   # fixed check set
TOY_STATS = "stats"         # check subset re-derived from a PRF of the proof
TOY_LINEAR = "linear"       # no ignored positions (no basis commitment)

DEFAULT_K = 8
DEFAULT_W = 4
MINI_K = 4
MINI_W = 2
JUDGE_REPS = 5


@dataclass(frozen=True)
class ToyParams:
    K: int = DEFAULT_K
    w: int = DEFAULT_W
    tau: int = 0
    variant: str = TOY_STANDARD


MINI_PARAMS = ToyParams(K=MINI_K, w=MINI_W)


# ---------------------------------------------------------------------------
# claims: the circuit/instance object the protocols verify


@dataclass(frozen=True)
class Claim:
    """A pseudo-deterministic acceptance claim: language instance plus the
    judge's amplification count."""

    lang_ref: bytes
    x: bytes
    reps: int = JUDGE_REPS

    def language(self) -> QmaLanguage:
        lang = resolve_language(self.lang_ref)
        return amplify(lang, self.reps) if self.reps > 1 else lang

    def base_language(self) -> QmaLanguage:
        return resolve_language(self.lang_ref)

    def to_bytes(self) -> bytes:
        return pack_fields(self.lang_ref, self.x, bytes([self.reps]))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "Claim":
        ref, x, reps = unpack_fields(blob, 3)
        return cls(ref, x, reps[0])

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()


def claim_for(lang: QmaLanguage, x: bytes, reps: int = JUDGE_REPS) -> Claim:
    return Claim(lang.ref, x, reps)


# ---------------------------------------------------------------------------
# key material


@dataclass(frozen=True)
class CvqcParams:
    proto: str
    pp: bytes  # sealed prover envelope

    def to_bytes(self) -> bytes:
        return pack_fields(self.proto.encode(), self.pp)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CvqcParams":
        proto, pp = unpack_fields(blob, 2)
        return cls(proto.decode(), pp)


@dataclass(frozen=True)
class OracleVerifyKey:
    km: PrfKey
    claim_digest: bytes


@dataclass(frozen=True)
class ToyVerifyKey:
    bases: tuple[int, ...]        # x in {0,1}^K; 0 computational, 1 hadamard
    secrets: tuple[int, ...]      # s_i, w-bit integers
    target: tuple[int, ...]       # accepting calibration pattern t
    tau: int
    w: int
    variant: str = TOY_STANDARD
    subset_key: bytes = b""       # stats variant only

    @property
    def K(self) -> int:
        return len(self.bases)


@dataclass(frozen=True)
class CvqcVerifyKey:
    proto: str
    body: object  # OracleVerifyKey | ToyVerifyKey

    def to_bytes(self) -> bytes:
        if self.proto == PROTO_ORACLE:
            return pack_fields(b"O", self.body.km.bytes, self.body.claim_digest)
        b = self.body
        return pack_fields(
            b"T", bytes(b.bases), bytes(b.secrets), bytes(b.target),
            bytes([b.tau, b.w]), b.variant.encode(), b.subset_key)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CvqcVerifyKey":
        r = Reader(blob)
        kind = r.field()
        if kind == b"O":
            return cls(PROTO_ORACLE, OracleVerifyKey(PrfKey(r.field()), r.field()))
        bases = tuple(r.field())
        secrets = tuple(r.field())
        target = tuple(r.field())
        tau, w = r.field()
        variant = r.field().decode()
        subset_key = r.field()
        return cls(PROTO_TOY, ToyVerifyKey(bases, secrets, target, tau, w,
                                           variant, subset_key))


@dataclass(frozen=True)
class Trapdoor:
    td: PrfKey


# ---------------------------------------------------------------------------
# proof encodings (canonical layouts in FORMATS.md)

REJECT_MARK = b"R"


def encode_base_proof(proto: str, pi) -> bytes:
    if pi == REJECT_MARK:
        return REJECT_MARK
    if proto == PROTO_ORACLE:
        return b"O" + pi
    out = bytearray(b"T")
    out.append(len(pi))
    for b, d in pi:
        out += bytes([b, d])
    return bytes(out)


def decode_base_proof(proto: str, blob: bytes):
    if blob[:1] == REJECT_MARK:
        raise MalformedProof("prover emitted a reject marker")
    if proto == PROTO_ORACLE:
        if blob[:1] != b"O" or len(blob) != 17:
            raise MalformedProof("bad tag proof encoding")
        return blob[1:]
    if blob[:1] != b"T":
        raise MalformedProof("bad measurement proof encoding")
    k = blob[1]
    if len(blob) != 2 + 2 * k:
        raise MalformedProof("bad measurement proof length")
    return tuple((blob[2 + 2 * i], blob[3 + 2 * i]) for i in range(k))


@dataclass(frozen=True)
class CvqcProof:
    pi: object          # bytes tag (ORACLE) or ((b, d), ...) (TOY)
    h: bytes | None = None  # 17-byte oracle digest in the dual-mode layer

    def encode(self, proto: str) -> bytes:
        return pack_fields(encode_base_proof(proto, self.pi),
                           self.h if self.h is not None else b"")

    @classmethod
    def decode(cls, proto: str, blob: bytes) -> "CvqcProof":
        pi_bytes, h = unpack_fields(blob, 2)
        return cls(decode_base_proof(proto, pi_bytes), h if h else None)


# ---------------------------------------------------------------------------
# the quantum judge (prover-boundary helper shared by both protocols)


def judge_accepts(claim: Claim, witness: Witness, drbg: Drbg,
                  classical_witness: bytes = b"") -> bool:
    """Majority verdict of the amplified claim circuit on the witness."""
    lang = claim.language()
    if witness.state.n_qubits != lang.witness_qubits:
        raise WidthMismatch(
            f"witness has {witness.state.n_qubits} qubits, claim takes {lang.witness_qubits}")
    if witness.copies < lang.reps:
        raise JudgeReject(
            f"only {witness.copies} witness copies for {lang.reps} repetitions")
    circ = lang.verifier(claim.x, classical_witness)
    inp = witness.state if lang.witness_qubits else []
    hits = 0
    for i in range(lang.reps):
        bit, _ = run_circuit(circ, inp, drbg.child(f"judge{i}"))
        hits += bit
    return hits >= lang.threshold


# ---------------------------------------------------------------------------
# ORACLE protocol


def oracle_keygen(claim: Claim, drbg: Drbg) -> tuple[CvqcParams, CvqcVerifyKey]:
    km = prf_gen(drbg.child("km"))
    pp = seal(pack_fields(km.bytes, claim.to_bytes()), b"cvqc-oracle-pp")
    return (CvqcParams(PROTO_ORACLE, pp),
            CvqcVerifyKey(PROTO_ORACLE, OracleVerifyKey(km, claim.digest())))


def _accept_tag(km: PrfKey, claim_digest: bytes) -> bytes:
    return prf_eval(km, claim_digest + b"acc")


def oracle_prove(pp: CvqcParams, witness: Witness, drbg: Drbg,
                 classical_witness: bytes = b"") -> bytes:
    km_bytes, claim_bytes = unpack_fields(unseal(pp.pp, b"cvqc-oracle-pp"), 2)
    claim = Claim.from_bytes(claim_bytes)
    if not judge_accepts(claim, witness, drbg.child("judge"), classical_witness):
        raise JudgeReject("witness failed the amplified check")
    return _accept_tag(PrfKey(km_bytes), claim.digest())


def oracle_verify(claim: Claim, pi: bytes, r: CvqcVerifyKey) -> int:
    body = r.body
    if body.claim_digest != claim.digest():
        return 0
    return 1 if pi == _accept_tag(body.km, body.claim_digest) else 0


# ---------------------------------------------------------------------------
# TOY protocol


def _dot_bits(d: int, s: int) -> int:
    return bin(d & s).count("1") & 1


def _output_check_outcome(claim: Claim, witness: Witness, drbg: Drbg) -> int:
    """Measure one fresh history-state copy: postselect the unary clock onto
    the final step and read the output qubit. Returns the violation bit
    (0 = consistent with an accepting run)."""
    circ = claim.base_language().verifier(claim.x)
    inp = witness.state if circ.n_input else []
    hist = history_state(circ, inp)
    T = len(circ.gates)
    if T:
        hist, p = hist.project({q: 1 for q in range(T)})
        if p < 1e-12:
            return 1
    p1 = hist.prob_of(T, 1)
    u = int.from_bytes(drbg.bytes(8), "big") / 2 ** 64
    out_bit = 1 if u < p1 else 0
    return 1 - out_bit


def toy_keygen(claim: Claim, drbg: Drbg,
               params: ToyParams = ToyParams()) -> tuple[CvqcParams, CvqcVerifyKey]:
    K, w = params.K, params.w
    if w > 8:
        raise DomainMismatch("secret width above 8 bits is not supported")
    bases = tuple(drbg.child("bases").bits(K))
    sd = drbg.child("secrets")
    secrets = tuple(int.from_bytes(sd.bytes(1), "big") % (1 << w) for _ in range(K))
    # accepting calibration: every check reports "no violation"
    target = tuple(0 for _ in range(K))
    subset_key = drbg.child("subset").bytes(KEY_LEN) if params.variant == TOY_STATS else b""
    vk = ToyVerifyKey(bases, secrets, target, params.tau, w, params.variant, subset_key)
    pp = seal(pack_fields(claim.to_bytes(), bytes(bases),
                          bytes(secrets), bytes([K, w, params.tau]),
                          params.variant.encode()), b"cvqc-toy-pp")
    return CvqcParams(PROTO_TOY, pp), CvqcVerifyKey(PROTO_TOY, vk)


def _toy_open_pp(pp: CvqcParams):
    claim_bytes, bases, secrets, kwt, variant = unpack_fields(
        unseal(pp.pp, b"cvqc-toy-pp"), 5)
    claim = Claim.from_bytes(claim_bytes)
    return claim, tuple(bases), tuple(secrets), kwt[0], kwt[1], kwt[2], variant.decode()


def toy_prove(pp: CvqcParams, witness: Witness, drbg: Drbg):
    claim, bases, secrets, K, w, tau, variant = _toy_open_pp(pp)
    pairs = []
    for i in range(K):
        pd = drbg.child(f"pos{i}")
        d = int.from_bytes(pd.bytes(1), "big") % (1 << w)
        checked = bases[i] == 1 or variant == TOY_LINEAR
        if checked:
            e = _output_check_outcome(claim, witness, pd.child("measure"))
            b = e ^ _dot_bits(d, secrets[i])
        else:
            b = pd.bit()
        pairs.append((b, d))
    return tuple(pairs)


def toy_verify(claim: Claim, pi, r: CvqcVerifyKey) -> int:
    vk = r.body
    if not isinstance(pi, tuple) or len(pi) != vk.K:
        raise MalformedProof(f"proof must carry exactly {vk.K} pairs")
    for b, d in pi:
        if b not in (0, 1) or not 0 <= d < (1 << vk.w):
            raise MalformedProof("proof entry out of range")
    if vk.variant == TOY_LINEAR:
        checked = set(range(vk.K))
    else:
        checked = {i for i in range(vk.K) if vk.bases[i] == 1}
    mismatches = 0
    for i in checked:
        b, d = pi[i]
        e = b ^ _dot_bits(d, vk.secrets[i])
        if e != vk.target[i]:
            mismatches += 1
    return 1 if mismatches <= vk.tau else 0


# ---------------------------------------------------------------------------
# unified base API


def base_keygen(claim: Claim, proto: str, drbg: Drbg,
                toy_params: ToyParams = ToyParams()):
    if proto == PROTO_ORACLE:
        return oracle_keygen(claim, drbg)
    return toy_keygen(claim, drbg, toy_params)


def base_prove(pp: CvqcParams, witness: Witness, drbg: Drbg,
               classical_witness: bytes = b""):
    if pp.proto == PROTO_ORACLE:
        return oracle_prove(pp, witness, drbg, classical_witness)
    return toy_prove(pp, witness, drbg)


def base_verify(claim: Claim, pi, r: CvqcVerifyKey) -> int:
    if r.proto == PROTO_ORACLE:
        return oracle_verify(claim, pi, r)
    return toy_verify(claim, pi, r)


# ---------------------------------------------------------------------------
# trapdoor dual-mode layer


@dataclass
class StarSetup:
    claim: Claim
    pp: CvqcParams
    r: CvqcVerifyKey | None
    oracle: RandomOracle
    td: PrfKey | None = None


def _oracle_seed(drbg: Drbg) -> bytes:
    return drbg.child("oracle-seed").bytes(KEY_LEN)


def _base_verify_closure(claim: Claim, r: CvqcVerifyKey):
    def vc(x: bytes) -> int:
        try:
            return base_verify(claim, decode_base_proof(r.proto, x), r)
        except MalformedProof:
            return 0
    return vc


def keygen_star(claim: Claim, proto: str, drbg: Drbg,
                toy_params: ToyParams = ToyParams()) -> StarSetup:
    pp, r = base_keygen(claim, proto, drbg.child("keygen"), toy_params)
    oracle = RandomOracle(_oracle_seed(drbg), MODE_UNIFORM)
    return StarSetup(claim, pp, r, oracle)


def td_gen(claim: Claim, proto: str, drbg: Drbg,
           toy_params: ToyParams = ToyParams()) -> StarSetup:
    """Same (pp, r) sampler as keygen_star; the returned oracle hides the
    verification verdict in its last output bit under the trapdoor PRF."""
    pp, r = base_keygen(claim, proto, drbg.child("keygen"), toy_params)
    td = prf_gen(drbg.child("td"))
    oracle = RandomOracle(_oracle_seed(drbg), MODE_TDGEN, td,
                          _base_verify_closure(claim, r))
    return StarSetup(claim, pp, r, oracle, td)


def sim_gen(claim: Claim, proto: str, drbg: Drbg,
            toy_params: ToyParams = ToyParams()) -> StarSetup:
    """Trapdoor generation with the verdict dropped from the oracle: the last
    bit is the trapdoor PRF alone, so trapdoor verification never accepts."""
    pp, _r = base_keygen(claim, proto, drbg.child("keygen"), toy_params)
    td = prf_gen(drbg.child("td"))
    oracle = RandomOracle(_oracle_seed(drbg), MODE_SIMGEN, td)
    return StarSetup(claim, pp, None, oracle, td)


def star_prove(pp: CvqcParams, witness: Witness, oracle, drbg: Drbg,
               classical_witness: bytes = b"") -> CvqcProof:
    pi = base_prove(pp, witness, drbg, classical_witness)
    return CvqcProof(pi, ro_query(oracle, encode_base_proof(pp.proto, pi)))


def star_verify(claim: Claim, proof: CvqcProof, r: CvqcVerifyKey, oracle) -> int:
    enc = encode_base_proof(r.proto, proof.pi)
    if proof.h is None or ro_query(oracle, enc) != proof.h:
        return 0
    return base_verify(claim, proof.pi, r)


def td_verify(claim: Claim, proof: CvqcProof, td: PrfKey, oracle, proto: str) -> int:
    enc = encode_base_proof(proto, proof.pi)
    if proof.h is None or ro_query(oracle, enc) != proof.h:
        return 0
    return (proof.h[16] & 1) ^ (prf_eval(td, enc)[0] & 1)


# ---------------------------------------------------------------------------
# oracle reconstruction + host gates (sealed verifier circuits embed these)


def oracle_spec(setup: StarSetup) -> bytes:
    td_bytes = setup.td.bytes if setup.td is not None else b""
    r_bytes = setup.r.to_bytes() if setup.r is not None else b""
    return pack_fields(setup.oracle.mode.encode(), setup.oracle.seed, td_bytes,
                       setup.claim.to_bytes(), r_bytes)


def oracle_from_spec(spec: bytes) -> RandomOracle:
    mode, seed, td_bytes, claim_bytes, r_bytes = unpack_fields(spec, 5)
    mode = mode.decode()
    if mode == MODE_UNIFORM:
        return RandomOracle(seed, MODE_UNIFORM)
    td = PrfKey(td_bytes)
    if mode == MODE_SIMGEN:
        return RandomOracle(seed, MODE_SIMGEN, td)
    claim = Claim.from_bytes(claim_bytes)
    r = CvqcVerifyKey.from_bytes(r_bytes)
    return RandomOracle(seed, MODE_TDGEN, td, _base_verify_closure(claim, r))


def star_vk_blob(setup: StarSetup) -> bytes:
    """Hidden constant for the CVQC_VERIFY host gate."""
    return pack_fields(setup.claim.to_bytes(), setup.pp.proto.encode(),
                       setup.r.to_bytes(), oracle_spec(setup))


def star_td_blob(setup: StarSetup) -> bytes:
    """Hidden constant for the CVQC_TDVERIFY host gate."""
    return pack_fields(setup.claim.to_bytes(), setup.pp.proto.encode(),
                       setup.td.bytes, oracle_spec(setup))


def _gate_cvqc_verify(tagged_proof: bytes, vk_blob: bytes) -> bytes:
    from .circuit_ir import unwrap
    plain = unwrap(tagged_proof)
    if plain is None:
        return b"\x00"
    claim_bytes, proto, r_bytes, spec = unpack_fields(vk_blob, 4)
    claim = Claim.from_bytes(claim_bytes)
    r = CvqcVerifyKey.from_bytes(r_bytes)
    oracle = oracle_from_spec(spec)
    try:
        proof = CvqcProof.decode(proto.decode(), plain)
    except (MalformedProof, MalformedCiphertext, IndexError):
        return b"\x00"
    return bytes([star_verify(claim, proof, r, oracle)])


def _gate_cvqc_tdverify(tagged_proof: bytes, td_blob: bytes) -> bytes:
    from .circuit_ir import unwrap
    plain = unwrap(tagged_proof)
    if plain is None:
        return b"\x00"
    claim_bytes, proto, td_bytes, spec = unpack_fields(td_blob, 4)
    claim = Claim.from_bytes(claim_bytes)
    oracle = oracle_from_spec(spec)
    try:
        proof = CvqcProof.decode(proto.decode(), plain)
    except (MalformedProof, MalformedCiphertext, IndexError):
        return b"\x00"
    return bytes([td_verify(claim, proof, PrfKey(td_bytes), oracle, proto.decode())])


def _gate_toy_verify(proof_bytes: bytes, vk_blob: bytes) -> bytes:
    claim_bytes, r_bytes = unpack_fields(vk_blob, 2)
    claim = Claim.from_bytes(claim_bytes)
    r = CvqcVerifyKey.from_bytes(r_bytes)
    try:
        pi = decode_base_proof(PROTO_TOY, proof_bytes)
        return bytes([toy_verify(claim, pi, r)])
    except MalformedProof:
        return b"\x00"


register_gate("CVQC_VERIFY", _gate_cvqc_verify)
register_gate("CVQC_TDVERIFY", _gate_cvqc_tdverify)
register_gate("TOY_VERIFY", _gate_toy_verify)


def sealed_toy_verifier(claim: Claim, r: CvqcVerifyKey, pad_target: int = 8) -> SealedProgram:
    """Public-evaluation-only verdict surface for the cryptanalysis module:
    proof bytes in, verdict byte out, key material hidden inside."""
    b = ProgramBuilder(1)
    proof = b.input(0)
    blob = b.const(pack_fields(claim.to_bytes(), r.to_bytes()))
    out = b.host("TOY_VERIFY", proof, blob)
    return obf_io(b.build([out]), pad_target)


def sealed_star_td_verifier(setup: StarSetup, pad_target: int = 8) -> SealedProgram:
    """Trapdoor-verification surface over dual-mode proofs (pi, h); with a
    simulation-mode setup this rejects every input."""
    b = ProgramBuilder(1)
    proof = b.input(0)
    tagged = b.concat(b.const(b"\x01"), proof)
    out = b.host("CVQC_TDVERIFY", tagged, b.const(star_td_blob(setup)))
    return obf_io(b.build([out]), pad_target)


# ---------------------------------------------------------------------------
# check-subset resampling variant: the verifier re-derives which positions to
# check from a PRF of the whole proof, so the proof carries a free salt field


def stats_encode(salt: bytes, pi) -> bytes:
    return b"S" + salt + encode_base_proof(PROTO_TOY, pi)


def stats_decode(blob: bytes) -> tuple[bytes, tuple]:
    if blob[:1] != b"S" or len(blob) < 1 + KEY_LEN:
        raise MalformedProof("bad salted proof encoding")
    return blob[1:1 + KEY_LEN], decode_base_proof(PROTO_TOY, blob[1 + KEY_LEN:])


def stats_verify(claim: Claim, salt: bytes, pi, r: CvqcVerifyKey) -> int:
    vk = r.body
    if vk.variant != TOY_STATS:
        raise MalformedProof("verification key is not the resampling variant")
    if not isinstance(pi, tuple) or len(pi) != vk.K:
        raise MalformedProof(f"proof must carry exactly {vk.K} pairs")
    mask = prf_eval(PrfKey(vk.subset_key), stats_encode(salt, pi))
    mismatches = 0
    for i in range(vk.K):
        if vk.bases[i] != 1 or not (mask[i // 8] >> (7 - i % 8)) & 1:
            continue
        b, d = pi[i]
        if b ^ _dot_bits(d, vk.secrets[i]) != vk.target[i]:
            mismatches += 1
    return 1 if mismatches <= vk.tau else 0


def toy_prove_stats(pp: CvqcParams, witness: Witness, drbg: Drbg):
    return drbg.child("salt").bytes(KEY_LEN), toy_prove(pp, witness, drbg)


def _gate_toy_verify_stats(proof_bytes: bytes, vk_blob: bytes) -> bytes:
    claim_bytes, r_bytes = unpack_fields(vk_blob, 2)
    claim = Claim.from_bytes(claim_bytes)
    r = CvqcVerifyKey.from_bytes(r_bytes)
    try:
        salt, pi = stats_decode(proof_bytes)
        return bytes([stats_verify(claim, salt, pi, r)])
    except MalformedProof:
        return b"\x00"


register_gate("TOY_VERIFY_STATS", _gate_toy_verify_stats)


def sealed_stats_verifier(claim: Claim, r: CvqcVerifyKey,
                          pad_target: int = 8) -> SealedProgram:
    b = ProgramBuilder(1)
    proof = b.input(0)
    blob = b.const(pack_fields(claim.to_bytes(), r.to_bytes()))
    out = b.host("TOY_VERIFY_STATS", proof, blob)
    return obf_io(b.build([out]), pad_target)


# ---------------------------------------------------------------------------
# blind wrapper: run the prover under QFHE, derive the challenge from the
# oracle (Fiat-Shamir), verify by decrypting with the key folded into r

_PP_PAD_BUCKET = 1024


def _toy_prove1(pp: CvqcParams, witness: Witness, drbg: Drbg):
    """First prover message: raw check outcomes at the checked positions."""
    claim, bases, secrets, K, w, tau, variant = _toy_open_pp(pp)
    outcomes = []
    for i in range(K):
        pd = drbg.child(f"pos{i}")
        checked = bases[i] == 1 or variant == TOY_LINEAR
        if checked:
            outcomes.append(_output_check_outcome(claim, witness, pd.child("measure")))
        else:
            outcomes.append(pd.bit())
    y = bytes(outcomes)
    return y, y  # (public message, prover state)


def _challenge_d(c: bytes, i: int, w: int) -> int:
    return prf_eval(PrfKey(c), b"d" + bytes([i]))[0] % (1 << w)


def _toy_prove2(pp: CvqcParams, y: bytes, c: bytes, state: bytes):
    claim, bases, secrets, K, w, tau, variant = _toy_open_pp(pp)
    pairs = []
    for i in range(K):
        d = _challenge_d(c, i, w)
        pairs.append((state[i] ^ _dot_bits(d, secrets[i]), d))
    return tuple(pairs)


def _toy_verify4(claim: Claim, y: bytes, c: bytes, pi, r: CvqcVerifyKey) -> int:
    vk = r.body
    for i, (b, d) in enumerate(pi):
        if d != _challenge_d(c, i, vk.w):
            return 0
    return toy_verify(claim, pi, r)


@dataclass(frozen=True)
class BlindParams:
    pk: bytes
    ct_pp: qfhe.QfheCiphertext
    proto: str = PROTO_TOY


@dataclass(frozen=True)
class BlindVerifyKey:
    r: CvqcVerifyKey
    sk: bytes


@dataclass(frozen=True)
class BlindProof:
    ct_y: qfhe.QfheCiphertext
    c: bytes
    ct_pi: qfhe.QfheCiphertext


def blind_keygen(claim: Claim, drbg: Drbg,
                 toy_params: ToyParams = ToyParams()) -> tuple[BlindParams, BlindVerifyKey, RandomOracle]:
    pp, r = toy_keygen(claim, drbg.child("keygen"), toy_params)
    keys = qfhe.qfhe_gen(drbg.child("qfhe"))
    pp_bytes = pack_bytes(pp.to_bytes())
    if len(pp_bytes) > _PP_PAD_BUCKET:
        raise MalformedCiphertext("parameter envelope exceeds the padding bucket")
    padded = pp_bytes + b"\x00" * (_PP_PAD_BUCKET - len(pp_bytes))
    ct_pp = qfhe.qfhe_enc(keys.pk, padded, drbg.child("enc"))
    oracle = RandomOracle(_oracle_seed(drbg), MODE_UNIFORM)
    return BlindParams(keys.pk, ct_pp), BlindVerifyKey(r, keys.sk), oracle


def _unpad_pp(padded_pp: bytes) -> CvqcParams:
    return CvqcParams.from_bytes(Reader(padded_pp).field())


def blind_prove(bp: BlindParams, witness: Witness, oracle, drbg: Drbg) -> BlindProof:
    def prove1(padded_pp: bytes) -> bytes:
        y, st = _toy_prove1(_unpad_pp(padded_pp), witness, drbg.child("prove1"))
        return pack_fields(padded_pp, y, st)

    ct_y = qfhe.qfhe_eval(bp.pk, prove1, bp.ct_pp, drbg.child("eval1"))
    transcript = ct_y.payload
    c = ro_query(oracle, b"challenge" + transcript)[:KEY_LEN]

    def prove2(carried: bytes) -> bytes:
        padded_pp, y, st = unpack_fields(carried, 3)
        pi = _toy_prove2(_unpad_pp(padded_pp), y, c, st)
        return pack_fields(y, encode_base_proof(PROTO_TOY, pi))

    ct_pi = qfhe.qfhe_eval(bp.pk, prove2, ct_y, drbg.child("eval2"))
    return BlindProof(ct_y, c, ct_pi)


def blind_verify(claim: Claim, proof: BlindProof, bvk: BlindVerifyKey, oracle) -> int:
    if ro_query(oracle, b"challenge" + proof.ct_y.payload)[:KEY_LEN] != proof.c:
        return 0
    try:
        y, pi_bytes = unpack_fields(qfhe.qfhe_dec(bvk.sk, proof.ct_pi), 2)
        pi = decode_base_proof(PROTO_TOY, pi_bytes)
    except (MalformedCiphertext, MalformedProof):
        return 0
    return _toy_verify4(claim, y, proof.c, pi, bvk.r)
