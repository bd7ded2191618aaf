"""Classical gate-DAG circuit IR with a host-gate registry, size padding, and
sealed-evaluator obfuscation (functional opacity only).

Programs compute over byte strings. Heavyweight sub-primitives (PRF, WE
encryption, QFHE decryption, CVQC verification, ...) appear as registered
host gates; embedded keys travel as CONST nodes. Evaluation is lazy from the
output nodes, so ITE touches only the selected branch and dead padding nodes
are never executed.

Obfuscation here normalizes size and hides constants behind the evaluator
API. It makes no security claim: all "indistinguishability" content lives in
functional-equivalence checks (equiv_check).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MalformedCircuit, TargetTooSmall, UnknownGate
from .rand import Drbg
from .wire import Reader, pack_bytes, pack_u32, seal, unseal

# distinguished "no output" sentinel, distinct from every released payload:
# released values are tagged 0x01 || payload, bottom is the single byte 0x00
BOTTOM = b"\x00"


def wrap_some(payload: bytes) -> bytes:
    return b"\x01" + payload


def unwrap(value: bytes):
    """Tagged value -> payload bytes, or None for the bottom sentinel."""
    if value[:1] == b"\x01":
        return value[1:]
    return None


OPS = ("CONST", "INPUT", "CONCAT", "SLICE", "XOR", "EQ", "ITE", "HOSTGATE")


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple[int, ...] = ()
    value: bytes = b""                 # CONST payload
    slot: int = 0                      # INPUT slot
    lo: int = 0                        # SLICE range [lo, hi)
    hi: int = 0
    gate: str = ""                     # HOSTGATE name
    consts: tuple[bytes, ...] = ()     # HOSTGATE embedded constants


@dataclass(frozen=True)
class Program:
    nodes: tuple[Node, ...]
    outputs: tuple[int, ...]
    input_arity: int

    @property
    def size(self) -> int:
        return len(self.nodes)


class ProgramBuilder:
    def __init__(self, input_arity: int):
        self.input_arity = input_arity
        self.nodes: list[Node] = []

    def _add(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def const(self, value: bytes) -> int:
        return self._add(Node("CONST", value=value))

    def input(self, slot: int) -> int:
        return self._add(Node("INPUT", slot=slot))

    def concat(self, *args: int) -> int:
        return self._add(Node("CONCAT", args=tuple(args)))

    def slice(self, a: int, lo: int, hi: int) -> int:
        return self._add(Node("SLICE", args=(a,), lo=lo, hi=hi))

    def xor(self, a: int, b: int) -> int:
        return self._add(Node("XOR", args=(a, b)))

    def eq(self, a: int, b: int) -> int:
        return self._add(Node("EQ", args=(a, b)))

    def ite(self, c: int, a: int, b: int) -> int:
        return self._add(Node("ITE", args=(c, a, b)))

    def host(self, gate: str, *args: int, consts: tuple[bytes, ...] = ()) -> int:
        return self._add(Node("HOSTGATE", args=tuple(args), gate=gate, consts=consts))

    def inline(self, sub: "Program", input_ids: list[int]) -> list[int]:
        """Splice another program's nodes in, wiring its INPUT slots to ours."""
        if len(input_ids) != sub.input_arity:
            raise MalformedCircuit("inline input arity mismatch")
        remap: dict[int, int] = {}
        for i, node in enumerate(sub.nodes):
            if node.op == "INPUT":
                remap[i] = input_ids[node.slot]
            else:
                args = tuple(remap[a] for a in node.args)
                remap[i] = self._add(Node(node.op, args, node.value, node.slot,
                                          node.lo, node.hi, node.gate, node.consts))
        return [remap[o] for o in sub.outputs]

    def build(self, outputs: list[int]) -> Program:
        return Program(tuple(self.nodes), tuple(outputs), self.input_arity)


# ---------------------------------------------------------------------------
# host-gate registry

_ARITY = {"CONST": 0, "INPUT": 0, "SLICE": 1, "XOR": 2, "EQ": 2, "ITE": 3}

DEFAULT_REGISTRY: dict[str, object] = {}


def register_gate(name: str, fn) -> None:
    DEFAULT_REGISTRY[name] = fn


def _register_base_gates():
    from . import primitives as pr

    def g_prf(key: bytes, x: bytes) -> bytes:
        return pr.prf_eval(pr.PrfKey(key), x)

    def g_ggm(key_blob: bytes, x: bytes) -> bytes:
        k = pr.PrfKey(key_blob[1:], key_blob[0])
        return pr.ggm_eval(k, int.from_bytes(x, "big"))

    def g_ggm_punct(blob: bytes, x: bytes) -> bytes:
        kz = punctured_key_from_bytes(blob)
        return pr.ggm_eval_punct(kz, int.from_bytes(x, "big"))

    def g_prg(seed: bytes, out_len: bytes) -> bytes:
        return pr.prg(seed, int.from_bytes(out_len, "big"))

    def g_commit(m: bytes, r: bytes) -> bytes:
        return pr.commit(m, r).payload

    register_gate("PRF", g_prf)
    register_gate("GGM_EVAL", g_ggm)
    register_gate("GGM_EVAL_PUNCT", g_ggm_punct)
    register_gate("PRG", g_prg)
    register_gate("OWF", pr.owf)
    register_gate("COMMIT", g_commit)


def ggm_key_blob(k) -> bytes:
    """GGM key as a host-gate constant: domain byte then key bytes."""
    return bytes([k.domain_bits]) + k.bytes


def punctured_key_to_bytes(kz) -> bytes:
    out = bytes([kz.domain_bits]) + kz.point.to_bytes(4, "big") + bytes([len(kz.path_keys)])
    for level, sub in kz.path_keys:
        out += bytes([level]) + sub
    return out


def punctured_key_from_bytes(blob: bytes):
    from .primitives import KEY_LEN, PuncturedKey
    domain = blob[0]
    point = int.from_bytes(blob[1:5], "big")
    count = blob[5]
    path = []
    pos = 6
    for _ in range(count):
        level = blob[pos]
        path.append((level, blob[pos + 1:pos + 1 + KEY_LEN]))
        pos += 1 + KEY_LEN
    return PuncturedKey(tuple(path), point, domain)


# ---------------------------------------------------------------------------
# validation / evaluation / padding


def validate(p: Program, registry: dict | None = None) -> None:
    reg = DEFAULT_REGISTRY if registry is None else registry
    for i, node in enumerate(p.nodes):
        if node.op not in OPS:
            raise MalformedCircuit(f"node {i}: unknown op {node.op!r}")
        for a in node.args:
            if not 0 <= a < i:
                raise MalformedCircuit(f"node {i}: argument {a} not before node")
        if node.op in _ARITY and len(node.args) != _ARITY[node.op]:
            raise MalformedCircuit(f"node {i}: {node.op} wants {_ARITY[node.op]} args")
        if node.op == "CONCAT" and not node.args:
            raise MalformedCircuit(f"node {i}: CONCAT needs at least one argument")
        if node.op == "INPUT" and not 0 <= node.slot < p.input_arity:
            raise MalformedCircuit(f"node {i}: input slot {node.slot} out of range")
        if node.op == "SLICE" and not 0 <= node.lo <= node.hi:
            raise MalformedCircuit(f"node {i}: bad slice range")
        if node.op == "HOSTGATE" and node.gate not in reg:
            raise UnknownGate(f"node {i}: unregistered host gate {node.gate!r}")
    for o in p.outputs:
        if not 0 <= o < len(p.nodes):
            raise MalformedCircuit(f"output {o} out of range")


def evaluate(p: Program, inputs: list[bytes], registry: dict | None = None) -> list[bytes]:
    """Lazy evaluation from the outputs; deterministic given gate determinism."""
    reg = DEFAULT_REGISTRY if registry is None else registry
    if len(inputs) != p.input_arity:
        raise MalformedCircuit(
            f"program takes {p.input_arity} inputs, got {len(inputs)}")
    memo: dict[int, bytes] = {}

    def ev(i: int) -> bytes:
        got = memo.get(i)
        if got is not None:
            return got
        node = p.nodes[i]
        try:
            if node.op == "CONST":
                v = node.value
            elif node.op == "INPUT":
                v = inputs[node.slot]
            elif node.op == "CONCAT":
                v = b"".join(ev(a) for a in node.args)
            elif node.op == "SLICE":
                v = ev(node.args[0])[node.lo:node.hi]
            elif node.op == "XOR":
                a, b = ev(node.args[0]), ev(node.args[1])
                if len(a) != len(b):
                    raise MalformedCircuit("XOR operand lengths differ")
                v = bytes(x ^ y for x, y in zip(a, b))
            elif node.op == "EQ":
                v = b"\x01" if ev(node.args[0]) == ev(node.args[1]) else b"\x00"
            elif node.op == "ITE":
                v = ev(node.args[1]) if ev(node.args[0]) == b"\x01" else ev(node.args[2])
            else:
                fn = reg.get(node.gate)
                if fn is None:
                    raise UnknownGate(f"host gate {node.gate!r} not registered")
                v = fn(*(tuple(ev(a) for a in node.args) + node.consts))
        except (MalformedCircuit, UnknownGate):
            raise
        except RecursionError:
            raise
        except Exception as e:
            raise MalformedCircuit(f"node {i} ({node.op}) failed: {e}") from e
        memo[i] = v
        return v

    return [ev(o) for o in p.outputs]


def pad(p: Program, target: int) -> Program:
    """Append dead constant nodes until the node count reaches `target`."""
    if target < p.size:
        raise TargetTooSmall(f"target {target} below program size {p.size}")
    filler = tuple(Node("CONST", value=b"") for _ in range(target - p.size))
    return Program(p.nodes + filler, p.outputs, p.input_arity)


# ---------------------------------------------------------------------------
# sealed evaluators

MODE_IO = "IO"
MODE_VBB = "VBB"
MODE_LOCK = "LOCK"


class SealedProgram:
    """Opaque evaluator over a padded program. The public surface is
    evaluation plus (declared_size, mode); embedded constants have no
    accessor and serialize sealed."""

    def __init__(self, program: Program, mode: str, registry: dict | None = None):
        self.__program = program
        self.declared_size = program.size
        self.mode = mode
        self.__registry = registry

    def run_all(self, *inputs: bytes) -> list[bytes]:
        return evaluate(self.__program, list(inputs), self.__registry)

    def run(self, *inputs: bytes) -> bytes:
        return self.run_all(*inputs)[0]

    __call__ = run

    def to_bytes(self) -> bytes:
        body = pack_fields_mode(self.mode, self.declared_size,
                                seal(program_to_bytes(self.__program), b"sealed-program"))
        return body

    @classmethod
    def from_bytes(cls, blob: bytes) -> "SealedProgram":
        mode, declared, sealed_prog = unpack_fields_mode(blob)
        sp = cls(program_from_bytes(unseal(sealed_prog, b"sealed-program")), mode)
        sp.declared_size = declared
        return sp


def pack_fields_mode(mode: str, declared: int, sealed_prog: bytes) -> bytes:
    return pack_bytes(mode.encode()) + pack_u32(declared) + pack_bytes(sealed_prog)


def unpack_fields_mode(blob: bytes):
    r = Reader(blob)
    mode = r.field().decode()
    declared = r.u32()
    sealed_prog = r.field()
    return mode, declared, sealed_prog


def obf_io(p: Program, target: int, registry: dict | None = None) -> SealedProgram:
    validate(p, registry)
    return SealedProgram(pad(p, target), MODE_IO, registry)


class SimHandle:
    """Black-box simulator handle: answers queries to the plain program and
    reveals only the declared size as metadata."""

    def __init__(self, program: Program, declared_size: int, registry: dict | None):
        self.__program = program
        self.declared_size = declared_size
        self.query_count = 0
        self.__registry = registry

    def query(self, *inputs: bytes) -> bytes:
        self.query_count += 1
        return evaluate(self.__program, list(inputs), self.__registry)[0]


def obf_vbb(p: Program, target: int,
            registry: dict | None = None) -> tuple[SealedProgram, SimHandle]:
    validate(p, registry)
    padded = pad(p, target)
    return (SealedProgram(padded, MODE_VBB, registry),
            SimHandle(p, padded.size, registry))


# ---------------------------------------------------------------------------
# lockable obfuscation: release z exactly when C(x) = u

_LOCK_BASE_NODES = 6


@dataclass(frozen=True)
class LockSpec:
    lock: bytes               # u, 16 bytes
    payload: bytes            # z
    inner: object             # Program, or a callable bytes -> bytes for tests

    def __post_init__(self):
        if len(self.lock) != 16:
            raise MalformedCircuit("lock value must be 16 bytes")


def lock_pad_target(size_c: int, size_z: int) -> int:
    return _LOCK_BASE_NODES + size_c + (size_z + 15) // 16


def lockobf(spec: LockSpec, registry: dict | None = None) -> SealedProgram:
    if callable(spec.inner):
        fn = spec.inner
        size_c = 1
        inner = None
    else:
        inner = spec.inner
        size_c = inner.size
        fn = None
    target = lock_pad_target(size_c, len(spec.payload))
    b = ProgramBuilder(1)
    x = b.input(0)
    if inner is not None:
        (cx,) = b.inline(inner, [x])
    else:
        name = f"__lock_closure_{id(fn)}"
        register_gate(name, fn)
        cx = b.host(name, x)
    u = b.const(spec.lock)
    hit = b.eq(cx, u)
    z = b.const(wrap_some(spec.payload))
    bot = b.const(BOTTOM)
    out = b.ite(hit, z, bot)
    p = b.build([out])
    validate(p, registry)
    return SealedProgram(pad(p, target), MODE_LOCK, registry)


def lockobf_sim(size_c: int, size_z: int) -> SealedProgram:
    """Input-independent bottom program with the same declared size."""
    b = ProgramBuilder(1)
    b.input(0)
    bot = b.const(BOTTOM)
    p = b.build([bot])
    return SealedProgram(pad(p, lock_pad_target(size_c, size_z)), MODE_LOCK)


# ---------------------------------------------------------------------------
# functional-equivalence checking (the test oracle behind every "functionally
# equivalent, hence indistinguishable" step)


@dataclass(frozen=True)
class ExhaustiveDomain:
    widths_bits: tuple[int, ...]

    def points(self):
        total = 1
        for w in self.widths_bits:
            total *= 1 << w
        if total > 1 << 16:
            raise MalformedCircuit("exhaustive domain larger than 2^16")
        idx = [0] * len(self.widths_bits)
        for v in range(total):
            point = []
            rest = v
            for w in reversed(self.widths_bits):
                point.append(rest % (1 << w))
                rest //= 1 << w
            yield tuple(p.to_bytes((w + 7) // 8, "big")
                        for p, w in zip(reversed(point), self.widths_bits))


@dataclass(frozen=True)
class RandomDomain:
    widths_bits: tuple[int, ...]
    samples: int
    seed: int = 0

    def points(self):
        d = Drbg(self.seed).child("equiv-domain")
        for _ in range(self.samples):
            yield tuple(
                (d.randint(0, (1 << w) - 1)).to_bytes((w + 7) // 8, "big")
                for w in self.widths_bits)


@dataclass(frozen=True)
class ExplicitDomain:
    entries: tuple[tuple[bytes, ...], ...]

    def points(self):
        yield from self.entries


def equiv_check(p1, p2, domain, registry: dict | None = None) -> bool:
    """True iff both programs agree on every tested point. Accepts Programs or
    SealedPrograms on either side."""

    def runner(p):
        if isinstance(p, SealedProgram):
            return p.run_all
        return lambda *inp: evaluate(p, list(inp), registry)

    r1, r2 = runner(p1), runner(p2)
    for point in domain.points():
        if r1(*point) != r2(*point):
            return False
    return True


# ---------------------------------------------------------------------------
# program serialization (versioned binary, documented in FORMATS.md)

_OP_TAGS = {op: i for i, op in enumerate(OPS)}
_TAG_OPS = {i: op for op, i in _OP_TAGS.items()}


def program_to_bytes(p: Program) -> bytes:
    out = bytearray(b"\x01")  # format version
    out += pack_u32(p.input_arity)
    out += pack_u32(len(p.nodes))
    for node in p.nodes:
        out += bytes([_OP_TAGS[node.op]])
        out += pack_u32(len(node.args))
        for a in node.args:
            out += pack_u32(a)
        out += pack_bytes(node.value)
        out += pack_u32(node.slot)
        out += pack_u32(node.lo)
        out += pack_u32(node.hi)
        out += pack_bytes(node.gate.encode())
        out += pack_u32(len(node.consts))
        for c in node.consts:
            out += pack_bytes(c)
    out += pack_u32(len(p.outputs))
    for o in p.outputs:
        out += pack_u32(o)
    return bytes(out)


def program_from_bytes(blob: bytes) -> Program:
    r = Reader(blob)
    if r.take(1) != b"\x01":
        raise MalformedCircuit("unknown program format version")
    input_arity = r.u32()
    nodes = []
    for _ in range(r.u32()):
        op = _TAG_OPS[r.take(1)[0]]
        args = tuple(r.u32() for _ in range(r.u32()))
        value = r.field()
        slot = r.u32()
        lo = r.u32()
        hi = r.u32()
        gate = r.field().decode()
        consts = tuple(r.field() for _ in range(r.u32()))
        nodes.append(Node(op, args, value, slot, lo, hi, gate, consts))
    outputs = tuple(r.u32() for _ in range(r.u32()))
    return Program(tuple(nodes), outputs, input_arity)


_register_base_gates()
