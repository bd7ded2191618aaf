"""Interface-faithful mock of quantum fully-homomorphic encryption with
classical keys.

Ciphertexts carry the plaintext sealed behind a key-derived pad; Eval opens
the sealing boundary internally, applies the function (classical closure or a
quantum circuit routed through the simulator), and reseals. Semantic security
is modeled, not real: the mock preserves dataflow so that provers can run
under encryption. The scheme is leveled; every Eval ticks a depth counter.
"""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

from .errors import DepthExceeded, KeyMismatch, MalformedCiphertext
from .primitives import KEY_LEN, prg
from .qsim import QuantumCircuit, run_circuit
from .rand import Drbg
from .wire import Reader, pack_bytes, pack_u32, seal, unseal

DEFAULT_MAX_DEPTH = 8


def _hmac(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


@dataclass(frozen=True)
class QfheKeys:
    pk: bytes  # key id (8 bytes) || sealed wrapping key
    sk: bytes  # 16 bytes

    @property
    def key_id(self) -> bytes:
        return self.pk[:8]


@dataclass(frozen=True)
class QfheCiphertext:
    key_id: bytes
    payload: bytes       # nonce || body || tag, pad keyed off the wrapping key
    eval_depth: int = 0
    max_depth: int = DEFAULT_MAX_DEPTH

    def to_bytes(self) -> bytes:
        return (pack_bytes(self.key_id) + pack_bytes(self.payload)
                + pack_u32(self.eval_depth) + pack_u32(self.max_depth))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "QfheCiphertext":
        r = Reader(blob)
        return cls(r.field(), r.field(), r.u32(), r.u32())


def _wrap_key_from_sk(sk: bytes) -> bytes:
    return _hmac(sk, b"wrap")[:KEY_LEN]


def _wrap_key_from_pk(pk: bytes) -> bytes:
    return unseal(pk[8:], b"qfhe-pk")


def qfhe_gen(drbg: Drbg) -> QfheKeys:
    sk = drbg.bytes(KEY_LEN)
    key_id = _hmac(sk, b"id")[:8]
    pk = key_id + seal(_wrap_key_from_sk(sk), b"qfhe-pk")
    return QfheKeys(pk=pk, sk=sk)


def _seal_payload(wrap_key: bytes, m: bytes, nonce: bytes) -> bytes:
    pad = prg(_hmac(wrap_key, b"pad" + nonce)[:KEY_LEN], len(m))
    body = bytes(a ^ b for a, b in zip(m, pad))
    tag = _hmac(wrap_key, b"tag" + nonce + body)[:KEY_LEN]
    return nonce + body + tag


def _open_payload(wrap_key: bytes, payload: bytes) -> bytes:
    if len(payload) < 32:
        raise MalformedCiphertext("ciphertext payload too short")
    nonce, body, tag = payload[:16], payload[16:-16], payload[-16:]
    if _hmac(wrap_key, b"tag" + nonce + body)[:KEY_LEN] != tag:
        raise MalformedCiphertext("ciphertext failed integrity check")
    pad = prg(_hmac(wrap_key, b"pad" + nonce)[:KEY_LEN], len(body))
    return bytes(a ^ b for a, b in zip(body, pad))


def qfhe_enc(pk: bytes, m: bytes, drbg: Drbg) -> QfheCiphertext:
    wrap_key = _wrap_key_from_pk(pk)
    return QfheCiphertext(pk[:8], _seal_payload(wrap_key, m, drbg.bytes(16)))


def qfhe_dec(sk: bytes, ct: QfheCiphertext) -> bytes:
    if _hmac(sk, b"id")[:8] != ct.key_id:
        raise KeyMismatch("secret key does not match ciphertext")
    return _open_payload(_wrap_key_from_sk(sk), ct.payload)


def qfhe_eval(pk: bytes, C, ct: QfheCiphertext, drbg: Drbg | None = None) -> QfheCiphertext:
    """Homomorphic application of C inside the sealing boundary.

    C is either a callable bytes -> bytes or a QuantumCircuit (the plaintext
    is then parsed as input bits; the sampled output bit is the result).
    """
    if pk[:8] != ct.key_id:
        raise KeyMismatch("public key does not match ciphertext")
    if ct.eval_depth + 1 > ct.max_depth:
        raise DepthExceeded(f"evaluation depth {ct.eval_depth + 1} exceeds {ct.max_depth}")
    wrap_key = _wrap_key_from_pk(pk)
    m = _open_payload(wrap_key, ct.payload)
    if isinstance(C, QuantumCircuit):
        bits = [int(b) for b in m.decode()]
        bit, _ = run_circuit(C, bits, drbg if drbg is not None else Drbg(0))
        out = bytes([bit])
    else:
        out = C(m)
    nonce_src = drbg.bytes(16) if drbg is not None else _hmac(wrap_key, b"renonce" + ct.payload)[:16]
    return QfheCiphertext(ct.key_id, _seal_payload(wrap_key, out, nonce_src),
                          ct.eval_depth + 1, ct.max_depth)
