"""Deterministic randomness: every sampling operation in the toolkit draws from
an HMAC-SHA256 counter generator so that a seed fully determines all artifacts.
"""
from __future__ import annotations

import hashlib
import hmac


def _hmac(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


class Drbg:
    """Seeded byte generator with labeled child streams.

    Child streams are independent of the parent's consumption order, which lets
    two code paths (e.g. keygen and trapdoor keygen) reproduce byte-identical
    sub-samples from the same seed.
    """

    def __init__(self, seed: bytes | int | str):
        if isinstance(seed, int):
            seed = seed.to_bytes(16, "big", signed=False)
        elif isinstance(seed, str):
            seed = seed.encode()
        self._key = _hmac(b"qnk-drbg-v1", seed)
        self._counter = 0

    def child(self, label: str) -> "Drbg":
        d = Drbg.__new__(Drbg)
        d._key = _hmac(self._key, b"child:" + label.encode())
        d._counter = 0
        return d

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            out += _hmac(self._key, b"blk" + self._counter.to_bytes(8, "big"))
            self._counter += 1
        return bytes(out[:n])

    def bit(self) -> int:
        return self.bytes(1)[0] & 1

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] via rejection sampling."""
        span = hi - lo + 1
        nbytes = (span.bit_length() + 7) // 8
        bound = (256 ** nbytes // span) * span
        while True:
            v = int.from_bytes(self.bytes(nbytes), "big")
            if v < bound:
                return lo + v % span

    def bits(self, n: int) -> list[int]:
        raw = self.bytes((n + 7) // 8)
        return [(raw[i // 8] >> (7 - i % 8)) & 1 for i in range(n)]

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]
