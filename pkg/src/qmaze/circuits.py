"""Reversible-circuit layer: fitness evaluation, comparators, oracle, validity.

Circuits are ordered lists of NOT/CNOT/Toffoli gates over named bit
registers, plus single-bit Z phase markers. Every gate is self-inverse, so
a circuit's inverse is its reversed gate list. Executing a circuit on a
classical basis state is exact: bits map to bits bijectively and the only
quantum effect, the phase marker, is tracked as a +/-1 sign per state.

Scratch registers follow compute-use-uncompute discipline (Bennett
cleanup): on any input whose scratch starts at zero, it ends at zero.

Arithmetic conventions:
  * registers are little-endian (bit k of a register holds value bit k);
  * positions are offset-encoded as i + n so the n unchecked +/-1 updates
    of wall-blind path simulation can never wrap below zero;
  * goal subtraction leaves a two's-complement difference in the position
    register, which is sign-extended before squaring so squares, distance,
    and fitness are exact in one shared arithmetic width.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fitness import FitnessSpec, Formula

# ---------------------------------------------------------------------------
# Gate and circuit data model


@dataclass(frozen=True)
class Gate:
    """X-family gate: 0 controls = NOT, 1 = CNOT, 2 = Toffoli."""

    target: int
    controls: tuple[int, ...] = ()
    stage: str = "main"

    def __post_init__(self):
        if len(self.controls) > 2:
            raise ValueError("gates above two controls must be decomposed")
        if self.target in self.controls or len(set(self.controls)) != len(self.controls):
            raise ValueError(f"gate bits must be distinct: {self}")


@dataclass(frozen=True)
class PhaseMark(Gate):
    """Z on one bit, recorded as a per-basis-state sign flip."""

    def __post_init__(self):
        if self.controls:
            raise ValueError("phase marker takes no controls")


@dataclass(frozen=True)
class Register:
    name: str
    offset: int
    width: int
    role: str

    @property
    def bits(self) -> list[int]:
        return list(range(self.offset, self.offset + self.width))


SCRATCH_ROLES = ("ancilla", "constant")


class RevCircuit:
    """An executable reversible circuit over named registers."""

    def __init__(self, registers: dict[str, Register], gates: list[Gate]):
        self.registers = registers
        self.gates = gates
        self.num_bits = sum(r.width for r in registers.values())

    def bits(self, name: str) -> list[int]:
        return self.registers[name].bits

    def zero_assignment(self) -> dict[str, int]:
        return {name: 0 for name in self.registers}

    def inverse(self) -> "RevCircuit":
        return RevCircuit(self.registers, list(reversed(self.gates)))

    def scratch_registers(self) -> list[Register]:
        return [r for r in self.registers.values() if r.role in SCRATCH_ROLES]

    def to_gate_list(self) -> str:
        """Textual export: one ``GATE target controls...`` line per gate."""
        names = {0: "NOT", 1: "CNOT", 2: "TOFFOLI"}
        lines = [
            f"# {r.name} bits {r.offset}..{r.offset + r.width - 1} role {r.role}"
            for r in self.registers.values()
        ]
        for g in self.gates:
            if isinstance(g, PhaseMark):
                lines.append(f"Z {g.target}")
            else:
                lines.append(" ".join([names[len(g.controls)], str(g.target), *map(str, g.controls)]))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GateCounts:
    """Exact gate tallies plus dependency-chain depth and scratch width."""

    toffoli: int = 0
    cnot: int = 0
    nots: int = 0
    phase: int = 0
    depth: int = 0
    ancilla: int = 0

    def __add__(self, other: "GateCounts") -> "GateCounts":
        # Gate counts are additive; depth adds as a sequential upper bound.
        return GateCounts(
            toffoli=self.toffoli + other.toffoli,
            cnot=self.cnot + other.cnot,
            nots=self.nots + other.nots,
            phase=self.phase + other.phase,
            depth=self.depth + other.depth,
            ancilla=max(self.ancilla, other.ancilla),
        )

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def count_gates(circuit: RevCircuit, stage: str | None = None) -> GateCounts:
    """Tally a circuit's gates, optionally restricted to one stage label."""
    tof = cnot = nots = phase = 0
    depth_at = [0] * circuit.num_bits
    depth = 0
    for g in circuit.gates:
        if stage is not None and g.stage != stage:
            continue
        if isinstance(g, PhaseMark):
            phase += 1
        elif len(g.controls) == 2:
            tof += 1
        elif len(g.controls) == 1:
            cnot += 1
        else:
            nots += 1
        touched = (g.target, *g.controls)
        d = 1 + max(depth_at[b] for b in touched)
        for b in touched:
            depth_at[b] = d
        depth = max(depth, d)
    ancilla = sum(r.width for r in circuit.scratch_registers())
    return GateCounts(toffoli=tof, cnot=cnot, nots=nots, phase=phase, depth=depth, ancilla=ancilla)


# ---------------------------------------------------------------------------
# Execution on classical basis states


def pack_rows(circuit: RevCircuit, values: dict[str, int | np.ndarray], batch: int) -> np.ndarray:
    """Bit matrix (batch, num_bits) from per-register values (scalar or array)."""
    rows = np.zeros((batch, circuit.num_bits), dtype=np.uint8)
    for name, reg in circuit.registers.items():
        v = np.asarray(values.get(name, 0), dtype=np.int64)
        if np.any(v < 0) or np.any(v >> reg.width):
            raise ValueError(f"value out of range for {reg.width}-bit register '{name}'")
        for k in range(reg.width):
            rows[:, reg.offset + k] = (v >> k) & 1
    return rows


def unpack_column(circuit: RevCircuit, rows: np.ndarray, name: str) -> np.ndarray:
    """Integer values of one register across a batch of bit rows."""
    reg = circuit.registers[name]
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for k in range(reg.width):
        out |= rows[:, reg.offset + k].astype(np.int64) << k
    return out


def run_batch(circuit: RevCircuit, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Execute on many basis states at once; returns (bits, signs)."""
    bits = rows.copy()
    signs = np.ones(bits.shape[0], dtype=np.int8)
    for g in circuit.gates:
        if isinstance(g, PhaseMark):
            signs[bits[:, g.target] == 1] *= -1
        elif len(g.controls) == 2:
            bits[:, g.target] ^= bits[:, g.controls[0]] & bits[:, g.controls[1]]
        elif len(g.controls) == 1:
            bits[:, g.target] ^= bits[:, g.controls[0]]
        else:
            bits[:, g.target] ^= 1
    return bits, signs


def run_on_basis(circuit: RevCircuit, assignment: dict[str, int]) -> tuple[dict[str, int], int]:
    """Execute on one basis state given as register values.

    Every register must be assigned a value within its width; returns the
    output assignment and the accumulated phase sign (+1 or -1).
    """
    missing = set(circuit.registers) - set(assignment)
    extra = set(assignment) - set(circuit.registers)
    if missing or extra:
        raise ValueError(f"assignment mismatch: missing {sorted(missing)}, unknown {sorted(extra)}")
    rows = pack_rows(circuit, assignment, batch=1)
    out_rows, signs = run_batch(circuit, rows)
    out = {name: int(unpack_column(circuit, out_rows, name)[0]) for name in circuit.registers}
    return out, int(signs[0])


# ---------------------------------------------------------------------------
# Builder and arithmetic primitives


class _Builder:
    def __init__(self):
        self.registers: dict[str, Register] = {}
        self.gates: list[Gate] = []
        self._offset = 0
        self.stage = "main"

    @classmethod
    def from_circuit(cls, circuit: RevCircuit) -> "_Builder":
        b = cls()
        b.registers = dict(circuit.registers)
        b.gates = list(circuit.gates)
        b._offset = circuit.num_bits
        return b

    def reg(self, name: str, width: int, role: str) -> Register:
        if width <= 0:
            raise ValueError(f"register '{name}' must have positive width")
        if name in self.registers:
            raise ValueError(f"duplicate register '{name}'")
        r = Register(name, self._offset, width, role)
        self.registers[name] = r
        self._offset += width
        return r

    def maybe_reg(self, name: str, width: int, role: str) -> list[int]:
        """Allocate only when width > 0; returns the (possibly empty) bit list."""
        if width == 0:
            return []
        return self.reg(name, width, role).bits

    def x(self, t: int):
        self.gates.append(Gate(t, (), self.stage))

    def cx(self, c: int, t: int):
        self.gates.append(Gate(t, (c,), self.stage))

    def ccx(self, c1: int, c2: int, t: int):
        self.gates.append(Gate(t, (c1, c2), self.stage))

    def z(self, t: int):
        self.gates.append(PhaseMark(t, (), self.stage))

    def mark(self) -> int:
        return len(self.gates)

    def uncompute_range(self, lo: int, hi: int, stage: str):
        """Append the inverse of gates[lo:hi] (all gates are self-inverse)."""
        for g in reversed(self.gates[lo:hi]):
            if isinstance(g, PhaseMark):
                raise ValueError("phase markers are not part of uncomputation")
            self.gates.append(Gate(g.target, g.controls, stage))

    def build(self) -> RevCircuit:
        return RevCircuit(self.registers, self.gates)


def _xor_const(b: _Builder, bits: list[int], value: int):
    for k, bit in enumerate(bits):
        if (value >> k) & 1:
            b.x(bit)


def _increment(b: _Builder, bits: list[int], chain: list[int], ctrl: int | None = None):
    """+1 mod 2**w on ``bits``, optionally controlled; ripple carry via ``chain``."""
    w = len(bits)
    if w == 1:
        b.cx(ctrl, bits[0]) if ctrl is not None else b.x(bits[0])
        return
    # chain[k] accumulates ctrl AND bits[0] AND ... AND bits[k].
    if ctrl is not None:
        b.ccx(ctrl, bits[0], chain[0])
    else:
        b.cx(bits[0], chain[0])
    for k in range(1, w - 1):
        b.ccx(chain[k - 1], bits[k], chain[k])
    for k in range(w - 1, 0, -1):
        b.cx(chain[k - 1], bits[k])
        if k >= 2:
            b.ccx(chain[k - 2], bits[k - 1], chain[k - 1])
        elif ctrl is not None:
            b.ccx(ctrl, bits[0], chain[0])
        else:
            b.cx(bits[0], chain[0])
    b.cx(ctrl, bits[0]) if ctrl is not None else b.x(bits[0])


def _decrement(b: _Builder, bits: list[int], chain: list[int], ctrl: int | None = None):
    """-1 mod 2**w: conjugate an increment by NOT on every bit."""
    for bit in bits:
        b.x(bit)
    _increment(b, bits, chain, ctrl)
    for bit in bits:
        b.x(bit)


def _add(b: _Builder, a: list[int], t: list[int], carry: int):
    """Ripple-carry t += a mod 2**w (equal widths); ``carry`` is borrowed scratch."""
    w = len(a)
    if w != len(t):
        raise ValueError("adder operands must have equal width")
    if w == 1:
        b.cx(a[0], t[0])
        b.cx(carry, t[0])
        return
    carries = [carry] + a[:-1]
    for k in range(w - 1):  # majority blocks leave carry k+1 in a[k]
        b.cx(a[k], t[k])
        b.cx(a[k], carries[k])
        b.ccx(carries[k], t[k], a[k])
    b.cx(a[w - 1], t[w - 1])
    b.cx(a[w - 2], t[w - 1])
    for k in range(w - 2, -1, -1):  # unmajority blocks restore a and emit sums
        b.ccx(carries[k], t[k], a[k])
        b.cx(a[k], carries[k])
        b.cx(carries[k], t[k])


def _sub(b: _Builder, a: list[int], t: list[int], carry: int):
    """t -= a mod 2**w via t = ~(~t + a)."""
    for bit in t:
        b.x(bit)
    _add(b, a, t, carry)
    for bit in t:
        b.x(bit)


def _add_const(b: _Builder, value: int, t: list[int], const: list[int], carry: int, subtract: bool = False):
    """t +/-= value using a temporarily loaded constant register."""
    _xor_const(b, const, value)
    (_sub if subtract else _add)(b, const, t, carry)
    _xor_const(b, const, value)


def _masked_copy(b: _Builder, ctrl: int, src: list[int], dst: list[int]):
    """dst ^= src AND ctrl, bitwise; tolerates ctrl being one of the src bits."""
    for s, d in zip(src, dst):
        if s == ctrl:
            b.cx(ctrl, d)
        else:
            b.ccx(ctrl, s, d)


def _add_masked(
    b: _Builder,
    ctrl: int,
    a: list[int],
    t: list[int],
    tmp: list[int],
    carry: int,
    subtract: bool = False,
):
    """Controlled t +/-= a: route a through a masked temporary register."""
    _masked_copy(b, ctrl, a, tmp[: len(a)])
    (_sub if subtract else _add)(b, tmp[: len(a)], t, carry)
    _masked_copy(b, ctrl, a, tmp[: len(a)])


def _square(b: _Builder, src: list[int], out: list[int], tmp: list[int], carry: int):
    """out += src**2 truncated to len(out) bits (schoolbook shift-and-add).

    Each partial product is masked into ``tmp`` and added into the full
    remaining window of ``out`` so carries propagate; ``tmp`` needs
    len(out) bits (its upper bits stay zero and act as the zero-extension).
    """
    w, p = len(src), len(out)
    for i in range(min(w, p)):
        window = p - i
        span = min(w, window)
        _masked_copy(b, src[i], src[:span], tmp[:span])
        _add(b, tmp[:window], out[i:], carry)
        _masked_copy(b, src[i], src[:span], tmp[:span])


def _gt_const(b: _Builder, a: list[int], cutoff: int, out: int, eq: list[int]):
    """out ^= (a > cutoff) for a classical cutoff, scanning MSB to LSB.

    A prefix-equality ancilla chain tracks "all higher bits match"; the
    disjuncts [a_i AND NOT c_i AND equal-above-i] are mutually exclusive,
    so their OR is realized as XORs into ``out``. The chain is uncomputed.
    """
    w = len(a)
    if cutoff < 0:
        b.x(out)
        return
    if cutoff >= 2**w - 1:
        return  # no w-bit value exceeds the cutoff
    chain_mark = []
    e_prev: int | None = None
    next_eq = 0
    for i in range(w - 1, -1, -1):
        c_i = (cutoff >> i) & 1
        if c_i == 0:
            if e_prev is None:
                b.cx(a[i], out)
            else:
                b.ccx(e_prev, a[i], out)
        if i > 0:
            e_new = eq[next_eq]
            next_eq += 1
            lo = b.mark()
            if c_i == 0:
                b.x(a[i])
            if e_prev is None:
                b.cx(a[i], e_new)
            else:
                b.ccx(e_prev, a[i], e_new)
            if c_i == 0:
                b.x(a[i])
            chain_mark.append((lo, b.mark()))
            e_prev = e_new
    for lo, hi in reversed(chain_mark):
        b.uncompute_range(lo, hi, b.stage)


def _gt_register(b: _Builder, a: list[int], c: list[int], out: int, eq: list[int], scratch: int):
    """out ^= (a > c) where the cutoff lives in a register (restored)."""
    w = len(a)
    for j in range(w):
        b.cx(a[j], c[j])  # c temporarily holds a XOR c
    chain_mark = []
    e_prev: int | None = None
    next_eq = 0
    for i in range(w - 1, -1, -1):
        # Disjunct i: higher bits equal AND a_i AND NOT c_i == a_i AND xor_i.
        if e_prev is None:
            b.ccx(a[i], c[i], out)
        else:
            b.ccx(a[i], c[i], scratch)
            b.ccx(e_prev, scratch, out)
            b.ccx(a[i], c[i], scratch)
        if i > 0:
            e_new = eq[next_eq]
            next_eq += 1
            lo = b.mark()
            b.x(c[i])
            if e_prev is None:
                b.cx(c[i], e_new)
            else:
                b.ccx(e_prev, c[i], e_new)
            b.x(c[i])
            chain_mark.append((lo, b.mark()))
            e_prev = e_new
    for lo, hi in reversed(chain_mark):
        b.uncompute_range(lo, hi, b.stage)
    for j in range(w):
        b.cx(a[j], c[j])


def _gt_subtract(
    b: _Builder, a: list[int], cutoff: int, out: int, tmp: list[int], const: list[int], carry: int
):
    """Subtractor comparator: out ^= (a > cutoff) via the sign of a - cutoff - 1.

    The difference is formed in a (w+1)-bit two's-complement temporary, so
    the top bit is a true sign bit; subtracting cutoff+1 makes the test
    strict. Everything but ``out`` is uncomputed.
    """
    w = len(a)
    if cutoff < 0:
        b.x(out)
        return
    if cutoff >= 2**w - 1:
        return
    lo = b.mark()
    for j in range(w):
        b.cx(a[j], tmp[j])
    _add_const(b, cutoff + 1, tmp, const, carry, subtract=True)
    hi = b.mark()
    b.x(tmp[w])
    b.cx(tmp[w], out)
    b.x(tmp[w])
    b.uncompute_range(lo, hi, b.stage)


# ---------------------------------------------------------------------------
# Width planning (shared with the resource model)


def position_width(m: int, n: int) -> int:
    """Offset position register width: ceil(log2(m + 2n)) + 1."""
    return (m + 2 * n - 1).bit_length() + 1


def max_offset_distance(m: int, n: int) -> int:
    """Largest squared goal distance reachable wall-blind: 2*(m-1+n)**2."""
    return 2 * (m - 1 + n) ** 2


def arith_width(m: int, n: int, spec: FitnessSpec) -> int:
    """Shared width of the square, distance, and fitness registers.

    Chosen so the distance fits unsigned, the fitness fits two's complement
    over [C - d_max, C], and the sign-extended coordinate difference fits.
    """
    c = spec.offset
    d_max = max_offset_distance(m, n)
    w = 1
    while not (2**w > d_max and 2 ** (w - 1) > c and 2 ** (w - 1) >= d_max - c):
        w += 1
    return max(w, position_width(m, n))


def signed_register_value(value: int, width: int) -> int:
    """Interpret a register's integer content as two's complement."""
    return value - (1 << width) if (value >> (width - 1)) & 1 else value


# ---------------------------------------------------------------------------
# Standalone arithmetic builders


def build_adder(
    width: int, *, subtract: bool = False, controls: int = 0, constant: int | None = None
) -> RevCircuit:
    """In-place adder: t +/-= a (or a classical constant), optionally controlled.

    Registers: ``a`` (absent when adding a constant), ``t``, ``ctrl`` (one bit
    per control), plus scratch. Exact modulo 2**width; with any control bit
    at zero the circuit is the identity.
    """
    if width < 1:
        raise ValueError("adder width must be >= 1")
    if controls < 0:
        raise ValueError("control count must be >= 0")
    if constant is not None and not 0 <= constant < 2**width:
        raise ValueError("constant out of register range")
    b = _Builder()
    a_bits = b.reg("a", width, "operand").bits if constant is None else None
    t_bits = b.reg("t", width, "operand").bits
    ctrl_bits = b.maybe_reg("ctrl", controls, "operand")
    carry = b.reg("carry", 1, "ancilla").bits[0]
    const_bits = b.reg("k", width, "constant").bits if constant is not None else None
    tmp_bits = b.reg("tmp", width, "ancilla").bits if controls >= 1 else None
    and_bits = b.maybe_reg("andc", max(0, controls - 1), "ancilla")

    def gated(src: list[int]):
        if controls == 0:
            (_sub if subtract else _add)(b, src, t_bits, carry)
            return
        if controls == 1:
            gate_bit = ctrl_bits[0]
        else:
            b.ccx(ctrl_bits[0], ctrl_bits[1], and_bits[0])
            for k in range(2, controls):
                b.ccx(and_bits[k - 2], ctrl_bits[k], and_bits[k - 1])
            gate_bit = and_bits[controls - 2]
        _add_masked(b, gate_bit, src, t_bits, tmp_bits, carry, subtract=subtract)
        if controls >= 2:
            for k in range(controls - 1, 1, -1):
                b.ccx(and_bits[k - 2], ctrl_bits[k], and_bits[k - 1])
            b.ccx(ctrl_bits[0], ctrl_bits[1], and_bits[0])

    if constant is None:
        gated(a_bits)
    else:
        _xor_const(b, const_bits, constant)
        gated(const_bits)
        _xor_const(b, const_bits, constant)
    return b.build()


def build_squarer(width: int, out_width: int | None = None) -> RevCircuit:
    """Out-of-place squarer |a>|0> -> |a>|a**2>; output must hold 2*width bits."""
    if width < 1:
        raise ValueError("squarer width must be >= 1")
    out_width = 2 * width if out_width is None else out_width
    if out_width < 2 * width:
        raise ValueError(f"output register needs >= {2 * width} bits, got {out_width}")
    b = _Builder()
    a = b.reg("a", width, "operand").bits
    out = b.reg("sq", out_width, "operand").bits
    tmp = b.reg("tmp", out_width, "ancilla").bits
    carry = b.reg("carry", 1, "ancilla").bits[0]
    _square(b, a, out, tmp, carry)
    return b.build()


def build_gt_comparator(
    width: int,
    cutoff: int | None = None,
    *,
    source: str = "constant",
    variant: str = "prefix",
) -> RevCircuit:
    """Greater-than comparator: flag ^= (f > cutoff), strict.

    ``source='constant'`` hardwires a classical cutoff; ``source='register'``
    compares against a cutoff register ``c`` (restored afterwards). The
    default realization follows the prefix-equality formula; ``variant=
    'subtract'`` cross-checks it via the sign bit of f - cutoff - 1
    (constant source only). Internal scratch is uncomputed.
    """
    if width < 1:
        raise ValueError("comparator width must be >= 1")
    if source not in ("constant", "register"):
        raise ValueError(f"unknown cutoff source '{source}'")
    if variant not in ("prefix", "subtract"):
        raise ValueError(f"unknown comparator variant '{variant}'")
    b = _Builder()
    f = b.reg("f", width, "fitness").bits
    c_bits = b.reg("c", width, "operand").bits if source == "register" else None
    flag = b.reg("flag", 1, "flag").bits[0]
    if source == "constant":
        if cutoff is None:
            raise ValueError("constant-source comparator needs a cutoff value")
        if variant == "prefix":
            eq = b.maybe_reg("eq", width - 1, "ancilla")
            _gt_const(b, f, cutoff, flag, eq)
        else:
            tmp = b.reg("tmp", width + 1, "ancilla").bits
            const = b.reg("k", width + 1, "constant").bits
            carry = b.reg("carry", 1, "ancilla").bits[0]
            _gt_subtract(b, f, cutoff, flag, tmp, const, carry)
    else:
        if variant != "prefix":
            raise ValueError("register-source comparator supports only the prefix variant")
        eq = b.maybe_reg("eq", width - 1, "ancilla")
        scratch = b.reg("u", 1, "ancilla").bits[0]
        _gt_register(b, f, c_bits, flag, eq, scratch)
    return b.build()


# ---------------------------------------------------------------------------
# Fitness, oracle, and validity circuits


def _emit_walk_step(
    b: _Builder,
    path_bits: list[int],
    step: int,
    n: int,
    pos_i: list[int],
    pos_j: list[int],
    ctl: int,
    chain: list[int],
):
    """Direction-controlled coordinate updates for one path step (1-based)."""
    hi = path_bits[2 * (n - step) + 1]
    lo = path_bits[2 * (n - step)]
    cases = [
        (0b00, pos_i, _decrement),  # N
        (0b01, pos_j, _increment),  # E
        (0b10, pos_i, _increment),  # S
        (0b11, pos_j, _decrement),  # W
    ]
    for code, reg_bits, op in cases:
        conj = [bit for bit, want in ((hi, code >> 1), (lo, code & 1)) if want == 0]

        def control_toggle():
            for bit in conj:
                b.x(bit)
            b.ccx(hi, lo, ctl)
            for bit in conj:
                b.x(bit)

        control_toggle()
        op(b, reg_bits, chain, ctl)
        control_toggle()


def build_fitness_circuit(m: int, n: int, spec: FitnessSpec, start=None, goal=None) -> RevCircuit:
    """Reversible fitness evaluation: |x>|0...0> -> |x>|fitness(x)>.

    Simulates the path wall-blind on offset coordinates, squares the goal
    differences, and writes C - distance into the fitness register in two's
    complement; every other register is uncomputed to zero. ``start`` and
    ``goal`` default to (0, 0) and (m-1, m-1).
    """
    if spec.formula is not Formula.MAIN:
        raise ValueError("gate-level fitness requires the power-of-two formula")
    if n < 1:
        raise ValueError("circuit path length must be >= 1")
    if m < 2:
        raise ValueError("maze size must be >= 2")
    start = (0, 0) if start is None else tuple(start)
    goal = (m - 1, m - 1) if goal is None else tuple(goal)
    w_pos = position_width(m, n)
    wa = arith_width(m, n, spec)

    b = _Builder()
    path = b.reg("path", 2 * n, "path").bits
    pos_i = b.reg("pos_i", w_pos, "position-i").bits
    pos_j = b.reg("pos_j", w_pos, "position-j").bits
    ext_i = b.maybe_reg("ext_i", wa - w_pos, "ancilla")
    ext_j = b.maybe_reg("ext_j", wa - w_pos, "ancilla")
    sq_i = b.reg("sq_i", wa, "ancilla").bits
    sq_j = b.reg("sq_j", wa, "ancilla").bits
    dist = b.reg("dist", wa, "distance").bits
    fit = b.reg("fit", wa, "fitness").bits
    kconst = b.reg("k", w_pos, "constant").bits
    ctl = b.reg("ctl", 1, "ancilla").bits[0]
    carry = b.reg("carry", 1, "ancilla").bits[0]
    chain = b.maybe_reg("chain", w_pos - 1, "ancilla")
    tmp = b.reg("tmp", wa, "ancilla").bits

    compute_lo = b.mark()
    b.stage = "init"
    _xor_const(b, pos_i, start[0] + n)
    _xor_const(b, pos_j, start[1] + n)
    b.stage = "walk"
    for step in range(1, n + 1):
        _emit_walk_step(b, path, step, n, pos_i, pos_j, ctl, chain)
    b.stage = "diff"
    _add_const(b, goal[0] + n, pos_i, kconst, carry, subtract=True)
    _add_const(b, goal[1] + n, pos_j, kconst, carry, subtract=True)
    b.stage = "extend"
    for bit in ext_i:
        b.cx(pos_i[w_pos - 1], bit)
    for bit in ext_j:
        b.cx(pos_j[w_pos - 1], bit)
    b.stage = "square"
    _square(b, pos_i + ext_i, sq_i, tmp, carry)
    _square(b, pos_j + ext_j, sq_j, tmp, carry)
    b.stage = "distance"
    _add(b, sq_i, dist, carry)
    _add(b, sq_j, dist, carry)
    compute_hi = b.mark()

    b.stage = "fitness"
    _xor_const(b, fit, spec.offset)
    _sub(b, dist, fit, carry)

    b.uncompute_range(compute_lo, compute_hi, "uncompute")
    return b.build()


def build_oracle_circuit(
    m: int, n: int, spec: FitnessSpec, cutoff: int, start=None, goal=None
) -> RevCircuit:
    """Phase oracle: |x> -> (-1)^[fitness(x) > cutoff] |x>, scratch restored.

    Wraps the fitness circuit in a compute / flag / phase / uncompute
    sandwich. The comparator result is ANDed with NOT(sign bit) so paths
    whose wall-blind fitness went negative are never marked; the sign then
    agrees with the classical reference for every basis state and any
    cutoff >= 0.
    """
    wa = arith_width(m, n, spec)
    if not 0 <= cutoff < 2 ** (wa - 1):
        raise ValueError(f"cutoff must lie in [0, {2 ** (wa - 1)}) for width {wa}")
    fitness_circ = build_fitness_circuit(m, n, spec, start=start, goal=goal)
    fitness_gate_count = len(fitness_circ.gates)

    b = _Builder.from_circuit(fitness_circ)
    flag = b.reg("flag", 1, "flag").bits[0]
    gsc = b.reg("gsc", 1, "ancilla").bits[0]
    eq = b.maybe_reg("eq", wa - 1, "ancilla")
    fit = fitness_circ.registers["fit"].bits
    sign_bit = fit[-1]

    b.stage = "compare"
    cmp_lo = b.mark()
    _gt_const(b, fit, cutoff, gsc, eq)
    b.x(sign_bit)
    b.ccx(gsc, sign_bit, flag)
    b.x(sign_bit)
    cmp_hi = b.mark()
    b.stage = "phase"
    b.z(flag)
    b.uncompute_range(cmp_lo, cmp_hi, "uncompare")
    b.stage = "unfitness"
    for g in reversed(b.gates[:fitness_gate_count]):
        b.gates.append(Gate(g.target, g.controls, "unfitness"))
    return b.build()


def build_validity_circuit(m: int, n: int, start=None) -> RevCircuit:
    """Bounds validity flag: |x>|0> -> |x>|valid(x)>, valid = 1 iff every
    intermediate position stays inside the grid (walls ignored).

    Per step, two comparators bracket each offset coordinate inside
    [n, n+m-1]; a Toffoli chain accumulates the conjunction over steps, the
    result is copied out, and the whole computation is reversed.
    """
    if n < 1:
        raise ValueError("circuit path length must be >= 1")
    if m < 2:
        raise ValueError("maze size must be >= 2")
    start = (0, 0) if start is None else tuple(start)
    w_pos = position_width(m, n)

    b = _Builder()
    path = b.reg("path", 2 * n, "path").bits
    pos_i = b.reg("pos_i", w_pos, "position-i").bits
    pos_j = b.reg("pos_j", w_pos, "position-j").bits
    vout = b.reg("valid", 1, "flag").bits[0]
    vchain = b.reg("vchain", n, "ancilla").bits
    inb_i = b.reg("inb_i", 1, "ancilla").bits[0]
    inb_j = b.reg("inb_j", 1, "ancilla").bits[0]
    phi = b.reg("phi", 1, "ancilla").bits[0]
    g_hi = b.reg("g_hi", 1, "ancilla").bits[0]
    g_lo = b.reg("g_lo", 1, "ancilla").bits[0]
    eq = b.maybe_reg("eq", w_pos - 1, "ancilla")
    ctl = b.reg("ctl", 1, "ancilla").bits[0]
    chain = b.maybe_reg("chain", w_pos - 1, "ancilla")

    def bounds_flag(pos: list[int], out: int):
        # out ^= [n <= pos <= n+m-1]  ==  GT(pos, n-1) AND NOT GT(pos, n+m-1)
        _gt_const(b, pos, n + m - 1, g_hi, eq)
        _gt_const(b, pos, n - 1, g_lo, eq)
        b.x(g_hi)
        b.ccx(g_lo, g_hi, out)
        b.x(g_hi)
        _gt_const(b, pos, n - 1, g_lo, eq)  # self-inverse at block level
        _gt_const(b, pos, n + m - 1, g_hi, eq)

    compute_lo = b.mark()
    b.stage = "init"
    _xor_const(b, pos_i, start[0] + n)
    _xor_const(b, pos_j, start[1] + n)
    b.stage = "walk"
    for step in range(1, n + 1):
        _emit_walk_step(b, path, step, n, pos_i, pos_j, ctl, chain)
        b.stage = "bounds"
        bounds_flag(pos_i, inb_i)
        bounds_flag(pos_j, inb_j)
        b.ccx(inb_i, inb_j, phi)
        if step == 1:
            b.cx(phi, vchain[0])
        else:
            b.ccx(vchain[step - 2], phi, vchain[step - 1])
        b.ccx(inb_i, inb_j, phi)
        bounds_flag(pos_j, inb_j)
        bounds_flag(pos_i, inb_i)
        b.stage = "walk"
    compute_hi = b.mark()
    b.stage = "out"
    b.cx(vchain[n - 1], vout)
    b.uncompute_range(compute_lo, compute_hi, "uncompute")
    return b.build()
