"""Canonical byte encodings, constant-key sealing, and artifact envelopes.

Every serialized field is big-endian length-prefixed (u32). Artifacts that
cross the CLI boundary travel inside an envelope:

    magic "QNK1" | version u16 | type tag (field) | payload (field) | digest

The digest is SHA-256 over everything before it and is verified on load.

Sealing hides embedded constants from casual inspection of serialized
programs. It is keyed by a fixed library constant: opacity here is an API
property (no accessor exposes the plaintext), not a cryptographic boundary,
and a fixed key keeps serialization byte-identical across runs for a fixed
seed.
"""
from __future__ import annotations

import hashlib
import hmac

from .errors import BadDigest, BadMagic, MalformedCiphertext, VersionMismatch
from .primitives import prg

MAGIC = b"QNK1"
VERSION = 1

_SEAL_KEY = hashlib.sha256(b"qnk-seal-v1").digest()[:16]


def _hmac(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


# ---------------------------------------------------------------------------
# field packing


def pack_bytes(b: bytes) -> bytes:
    return len(b).to_bytes(4, "big") + b


def pack_u32(v: int) -> bytes:
    return v.to_bytes(4, "big")


def pack_fields(*fields: bytes) -> bytes:
    return b"".join(pack_bytes(f) for f in fields)


class Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedCiphertext("truncated encoding")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def field(self) -> bytes:
        return self.take(self.u32())

    def done(self) -> bool:
        return self.pos == len(self.data)


def unpack_fields(data: bytes, n: int) -> list[bytes]:
    r = Reader(data)
    out = [r.field() for _ in range(n)]
    if not r.done():
        raise MalformedCiphertext("trailing bytes after final field")
    return out


# ---------------------------------------------------------------------------
# sealing


def seal(data: bytes, context: bytes = b"") -> bytes:
    nonce = _hmac(_SEAL_KEY, b"nonce" + context + data)[:16]
    pad = prg(_hmac(_SEAL_KEY, b"pad" + nonce)[:16], len(data))
    body = bytes(a ^ b for a, b in zip(data, pad))
    tag = _hmac(_SEAL_KEY, b"tag" + nonce + body)[:16]
    return nonce + body + tag


def unseal(blob: bytes, context: bytes = b"") -> bytes:
    if len(blob) < 32:
        raise MalformedCiphertext("sealed blob too short")
    nonce, body, tag = blob[:16], blob[16:-16], blob[-16:]
    if _hmac(_SEAL_KEY, b"tag" + nonce + body)[:16] != tag:
        raise MalformedCiphertext("sealed blob failed integrity check")
    pad = prg(_hmac(_SEAL_KEY, b"pad" + nonce)[:16], len(body))
    return bytes(a ^ b for a, b in zip(body, pad))


# ---------------------------------------------------------------------------
# envelopes


def envelope(type_tag: str, payload: bytes) -> bytes:
    head = MAGIC + VERSION.to_bytes(2, "big") + pack_bytes(type_tag.encode()) + pack_bytes(payload)
    return head + hashlib.sha256(head).digest()


def open_envelope(blob: bytes, expect_tag: str | None = None) -> tuple[str, bytes]:
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagic("missing QNK1 magic")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise BadDigest("envelope digest mismatch")
    r = Reader(body)
    r.take(4)
    version = int.from_bytes(r.take(2), "big")
    if version != VERSION:
        raise VersionMismatch(f"envelope version {version}, expected {VERSION}")
    tag = r.field().decode()
    payload = r.field()
    if expect_tag is not None and tag != expect_tag:
        raise VersionMismatch(f"envelope holds {tag!r}, expected {expect_tag!r}")
    return tag, payload
