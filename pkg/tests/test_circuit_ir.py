import pytest

from qnk.circuit_ir import (
    BOTTOM,
    ExhaustiveDomain,
    ExplicitDomain,
    LockSpec,
    Node,
    Program,
    ProgramBuilder,
    RandomDomain,
    SealedProgram,
    equiv_check,
    evaluate,
    lock_pad_target,
    lockobf,
    lockobf_sim,
    obf_io,
    obf_vbb,
    pad,
    program_from_bytes,
    program_to_bytes,
    unwrap,
    validate,
    wrap_some,
)
from qnk.errors import MalformedCircuit, TargetTooSmall, UnknownGate
from qnk.primitives import owf
from qnk.rand import Drbg


def identity_program():
    b = ProgramBuilder(1)
    return b.build([b.input(0)])


class TestValidate:
    def test_identity_ok(self):
        validate(identity_program())

    def test_forward_reference_rejected(self):
        bad = Program((Node("XOR", args=(0, 1)), Node("CONST", value=b"")), (0,), 0)
        with pytest.raises(MalformedCircuit):
            validate(bad)

    def test_unknown_hostgate(self):
        b = ProgramBuilder(1)
        out = b.host("no_such", b.input(0))
        with pytest.raises(UnknownGate):
            validate(b.build([out]))

    def test_bad_input_slot(self):
        b = ProgramBuilder(1)
        out = b.input(3)
        with pytest.raises(MalformedCircuit):
            validate(b.build([out]))


class TestEvaluate:
    def test_eq_reflexive(self):
        b = ProgramBuilder(1)
        x = b.input(0)
        p = b.build([b.eq(x, x)])
        assert evaluate(p, [b"data"]) == [b"\x01"]

    def test_ite_selects(self):
        b = ProgramBuilder(3)
        p = b.build([b.ite(b.input(0), b.input(1), b.input(2))])
        assert evaluate(p, [b"\x01", b"a", b"b"]) == [b"a"]
        assert evaluate(p, [b"\x00", b"a", b"b"]) == [b"b"]

    def test_hostgate_matches_direct_call(self):
        b = ProgramBuilder(1)
        p = b.build([b.host("OWF", b.input(0))])
        d = Drbg(1)
        for _ in range(100):
            x = d.bytes(d.randint(0, 32))
            assert evaluate(p, [x]) == [owf(x)]

    def test_xor_length_mismatch(self):
        b = ProgramBuilder(2)
        p = b.build([b.xor(b.input(0), b.input(1))])
        with pytest.raises(MalformedCircuit):
            evaluate(p, [b"ab", b"a"])

    def test_concat_slice(self):
        b = ProgramBuilder(2)
        cat = b.concat(b.input(0), b.input(1))
        p = b.build([b.slice(cat, 1, 3)])
        assert evaluate(p, [b"ab", b"cd"]) == [b"bc"]

    def test_lazy_ite_skips_failing_branch(self):
        from qnk.circuit_ir import punctured_key_to_bytes
        from qnk.primitives import ggm_punct, prf_gen
        k = prf_gen(Drbg(2), 8)
        kz = punctured_key_to_bytes(ggm_punct(k, 0x10))
        b = ProgramBuilder(1)
        x = b.input(0)
        punct_eval = b.host("GGM_EVAL_PUNCT", b.const(kz), x)
        p = b.build([b.ite(b.eq(x, b.const(b"\x10")), b.const(b"safe"), punct_eval)])
        assert evaluate(p, [b"\x10"]) == [b"safe"]


class TestPad:
    def test_pad_preserves_behavior(self):
        b = ProgramBuilder(1)
        x = b.input(0)
        p = b.build([b.host("OWF", x)])
        padded = pad(p, 40)
        assert padded.size == 40
        d = Drbg(3)
        for _ in range(100):
            v = [d.bytes(4)]
            assert evaluate(p, v) == evaluate(padded, v)

    def test_pad_identity_at_own_size(self):
        p = identity_program()
        assert pad(p, p.size).nodes == p.nodes

    def test_target_too_small(self):
        b = ProgramBuilder(1)
        p = b.build([b.host("OWF", b.input(0))])
        with pytest.raises(TargetTooSmall):
            pad(p, 1)


class TestSealed:
    def test_io_identity_exhaustive(self):
        sealed = obf_io(identity_program(), 8)
        for v in range(256):
            assert sealed.run(bytes([v])) == bytes([v])

    def test_equal_declared_size_for_distinct_constants(self):
        def make(c):
            b = ProgramBuilder(1)
            x = b.input(0)
            k = b.const(c)
            return b.build([b.xor(b.xor(x, k), k)])  # computes identity

        s1 = obf_io(make(b"\x55"), 10)
        s2 = obf_io(make(b"\xaa"), 10)
        assert s1.declared_size == s2.declared_size == 10
        assert s1.run(b"\x42") == s2.run(b"\x42") == b"\x42"

    def test_no_constant_accessor(self):
        sealed = obf_io(identity_program(), 4)
        public = [a for a in vars(sealed) if not a.startswith("_")]
        assert set(public) == {"declared_size", "mode"}

    def test_serialization_roundtrip(self):
        b = ProgramBuilder(1)
        p = b.build([b.host("OWF", b.input(0))])
        sealed = obf_io(p, 12)
        again = SealedProgram.from_bytes(sealed.to_bytes())
        assert again.declared_size == 12
        assert again.run(b"q") == sealed.run(b"q")

    def test_vbb_sim_matches_and_counts(self):
        b = ProgramBuilder(1)
        p = b.build([b.host("OWF", b.input(0))])
        sealed, sim = obf_vbb(p, 9)
        d = Drbg(4)
        for i in range(100):
            x = d.bytes(3)
            assert sim.query(x) == sealed.run(x)
        assert sim.query_count == 100
        assert sim.declared_size == 9
        assert not any(a for a in vars(sim) if not a.startswith("_")
                       if a not in ("declared_size", "query_count"))


class TestLockable:
    def test_identity_lock(self):
        u = bytes(range(16))
        obj = lockobf(LockSpec(u, b"payload", lambda x: x))
        assert unwrap(obj.run(u)) == b"payload"
        assert unwrap(obj.run(b"\x00" * 16)) is None

    def test_exhaustive_and_sim(self):
        b = ProgramBuilder(1)
        x = b.input(0)
        inner = b.build([b.concat(x, b.const(b"\x11" * 15))])
        u = b"\x2a" + b"\x11" * 15
        obj = lockobf(LockSpec(u, b"z!", inner))
        sim = lockobf_sim(inner.size, 2)
        for v in range(256):
            got = unwrap(obj.run(bytes([v])))
            assert got == (b"z!" if v == 0x2A else None)
            assert unwrap(sim.run(bytes([v]))) is None
        assert sim.declared_size == obj.declared_size == lock_pad_target(inner.size, 2)

    def test_bottom_sentinel_distinct_from_payloads(self):
        assert unwrap(BOTTOM) is None
        assert unwrap(wrap_some(b"")) == b""
        assert unwrap(wrap_some(b"\x00")) == b"\x00"


class TestEquivCheck:
    def test_same_function_different_structure(self):
        b1 = ProgramBuilder(1)
        x = b1.input(0)
        p1 = b1.build([b1.xor(x, b1.const(b"\x00"))])
        p2 = identity_program()
        assert equiv_check(p1, p2, ExhaustiveDomain((8,)))

    def test_detects_divergence(self):
        b1 = ProgramBuilder(1)
        x = b1.input(0)
        p1 = b1.build([b1.xor(x, b1.const(b"\x01"))])
        assert not equiv_check(p1, identity_program(), ExhaustiveDomain((8,)))

    def test_random_domain(self):
        assert equiv_check(identity_program(), identity_program(),
                           RandomDomain((16,), 50, seed=5))

    def test_explicit_domain(self):
        dom = ExplicitDomain(((b"\x01",), (b"\x02",)))
        assert equiv_check(identity_program(), identity_program(), dom)


def test_program_serialization_roundtrip():
    b = ProgramBuilder(2)
    x = b.input(0)
    y = b.input(1)
    h = b.host("PRF", b.const(b"\x00" * 16), b.concat(x, y))
    p = b.build([b.ite(b.eq(x, y), h, b.slice(h, 0, 4))])
    again = program_from_bytes(program_to_bytes(p))
    assert again == p
    assert evaluate(again, [b"a", b"a"]) == evaluate(p, [b"a", b"a"])
