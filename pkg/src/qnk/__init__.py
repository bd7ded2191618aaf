"""qnk: desk-scale dual-mode classical verification of quantum computation,
null obfuscation of quantum circuits, witness encryption for QMA, and the
primitives derived from them (NIZK, ZAPR, ABE, constrained PRF, secret
sharing, lockable and predicate obfuscation), plus runnable cryptanalysis of
the toy verifier."""

__version__ = "0.1.0"
