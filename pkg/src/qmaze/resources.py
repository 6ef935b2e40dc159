"""Qubit and gate-cost model for the reversible circuits, checked against
actual constructions.

``predict`` computes register widths and per-stage gate counts from closed
formulas that mirror the builders in :mod:`qmaze.circuits`; ``measured``
builds the circuits and tallies them. Tests pin the two against each
other, and ``check_asymptotics`` turns the scaling claims (comparator
linear in width, path simulation linear in length) into least-squares
fits with explicit residual thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import circuits
from .circuits import arith_width, build_gt_comparator, build_oracle_circuit, count_gates, position_width
from .fitness import FitnessSpec, make_spec

RESIDUAL_THRESHOLD = 0.05


@dataclass(frozen=True)
class StageCounts:
    toffoli: int
    cnot: int
    nots: int


@dataclass(frozen=True)
class ResourceReport:
    n: int
    m: int
    cutoff: int
    register_widths: dict[str, int]
    ancilla: int
    stages: dict[str, StageCounts]
    depth: int  # measured dependency-chain depth, or a gate-count upper bound

    @property
    def total_qubits(self) -> int:
        return sum(self.register_widths.values()) + self.ancilla

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "cutoff": self.cutoff,
            "register_widths": dict(self.register_widths),
            "ancilla": self.ancilla,
            "total_qubits": self.total_qubits,
            "stages": {k: vars(v) for k, v in self.stages.items()},
            "depth": self.depth,
        }


# ---------------------------------------------------------------------------
# Closed-form per-stage counts (mirror the gate emitters exactly)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _add_counts(w: int) -> StageCounts:
    if w == 1:
        return StageCounts(0, 2, 0)
    return StageCounts(2 * (w - 1), 4 * (w - 1) + 2, 0)


def _increment_counts(w: int) -> StageCounts:
    if w == 1:
        return StageCounts(0, 1, 0)
    return StageCounts(2 * (w - 1), w, 0)


def walk_stage_counts(n: int, m: int) -> StageCounts:
    """Path-simulation stage: 4 doubly-controlled +/-1 updates per step."""
    w = position_width(m, n)
    inc = _increment_counts(w)
    tof = n * 4 * (2 + inc.toffoli)
    cnot = n * 4 * inc.cnot
    nots = n * (16 + 2 * (2 * w))  # control-polarity toggles + decrement conjugation
    return StageCounts(tof, cnot, nots)


def _square_counts(w: int) -> StageCounts:
    tof = cnot = 0
    for i in range(w):
        span = w - i
        diag = 1 if i < span else 0
        tof += 2 * (span - diag)
        cnot += 2 * diag
        add = _add_counts(span)
        tof += add.toffoli
        cnot += add.cnot
    return StageCounts(tof, cnot, 0)


def distance_fitness_stage_counts(n: int, m: int, spec: FitnessSpec, goal=None) -> StageCounts:
    """Goal subtraction, sign extension, squaring, distance sum, C - d."""
    w = position_width(m, n)
    wa = arith_width(m, n, spec)
    goal = (m - 1, m - 1) if goal is None else tuple(goal)
    tof = cnot = nots = 0
    for coord in goal:  # two constant subtractions
        add = _add_counts(w)
        tof += add.toffoli
        cnot += add.cnot
        nots += 2 * _popcount(coord + n) + 2 * w
    cnot += 2 * (wa - w)  # sign extension
    sq = _square_counts(wa)
    tof += 2 * sq.toffoli
    cnot += 2 * sq.cnot
    add = _add_counts(wa)  # two distance accumulations
    tof += 2 * add.toffoli
    cnot += 2 * add.cnot
    add = _add_counts(wa)  # fitness subtraction
    tof += add.toffoli
    cnot += add.cnot
    nots += _popcount(spec.offset) + 2 * wa
    return StageCounts(tof, cnot, nots)


def init_stage_counts(n: int, start=None) -> StageCounts:
    start = (0, 0) if start is None else tuple(start)
    return StageCounts(0, 0, _popcount(start[0] + n) + _popcount(start[1] + n))


def comparator_counts(width: int, cutoff: int) -> StageCounts:
    """Prefix-equality comparator cost for one classical cutoff."""
    if cutoff < 0:
        return StageCounts(0, 0, 1)
    if cutoff >= 2**width - 1:
        return StageCounts(0, 0, 0)
    tof = cnot = nots = 0
    have_chain = False
    for i in range(width - 1, -1, -1):
        c_i = (cutoff >> i) & 1
        if c_i == 0:
            if have_chain:
                tof += 1
            else:
                cnot += 1
        if i > 0:
            if c_i == 0:
                nots += 4
            if have_chain:
                tof += 2
            else:
                cnot += 2
            have_chain = True
    return StageCounts(tof, cnot, nots)


def _combine(*parts: StageCounts) -> StageCounts:
    return StageCounts(
        sum(p.toffoli for p in parts), sum(p.cnot for p in parts), sum(p.nots for p in parts)
    )


def _scale(part: StageCounts, k: int) -> StageCounts:
    return StageCounts(k * part.toffoli, k * part.cnot, k * part.nots)


def predict(n: int, m: int, spec: FitnessSpec | None = None, cutoff: int | None = None) -> ResourceReport:
    """Predicted oracle-circuit resources for default start/goal placement."""
    if n < 1 or m < 2:
        raise ValueError("need n >= 1 and m >= 2")
    spec = make_spec(m) if spec is None else spec
    cutoff = spec.offset // 2 if cutoff is None else cutoff
    w = position_width(m, n)
    wa = arith_width(m, n, spec)
    widths = {
        "path": 2 * n,
        "pos_i": w,
        "pos_j": w,
        "dist": wa,
        "fit": wa,
        "flag": 1,
    }
    ancilla = (
        2 * (wa - w)  # sign extensions
        + 2 * wa  # squares
        + w  # loaded constant
        + 1  # walk control
        + 1  # adder carry
        + (w - 1)  # increment carry chain
        + wa  # masked addend
        + 1  # comparator output
        + (wa - 1)  # comparator equality chain
    )
    path_sim = walk_stage_counts(n, m)
    dist_fit = distance_fitness_stage_counts(n, m, spec)
    init = init_stage_counts(n)
    cmp_counts = comparator_counts(wa, cutoff)
    guard = StageCounts(1, 0, 2)  # sign-bit AND around the flag write
    # Fitness circuit = forward compute + fitness write + mirrored uncompute;
    # the fitness write itself is inside dist_fit, whose non-write parts mirror.
    forward = _combine(init, path_sim, dist_fit)
    fitness_write = _combine(_add_counts(wa), StageCounts(0, 0, _popcount(spec.offset) + 2 * wa))
    fitness_total = _combine(_scale(forward, 2), _scale(fitness_write, -1))
    oracle_total = _combine(
        _scale(fitness_total, 2), _scale(_combine(cmp_counts, guard), 2)
    )
    stages = {
        "path_sim": path_sim,
        "distance_fitness": dist_fit,
        "comparator": cmp_counts,
        "oracle_total": oracle_total,
    }
    depth_bound = oracle_total.toffoli + oracle_total.cnot + oracle_total.nots + 1
    return ResourceReport(
        n=n, m=m, cutoff=cutoff, register_widths=widths, ancilla=ancilla,
        stages=stages, depth=depth_bound,
    )


def measured(n: int, m: int, spec: FitnessSpec | None = None, cutoff: int | None = None) -> ResourceReport:
    """Resources tallied from actually built circuits."""
    spec = make_spec(m) if spec is None else spec
    cutoff = spec.offset // 2 if cutoff is None else cutoff
    oracle = build_oracle_circuit(m, n, spec, cutoff)
    widths = {
        name: reg.width
        for name, reg in oracle.registers.items()
        if reg.role not in circuits.SCRATCH_ROLES
    }
    ancilla = sum(r.width for r in oracle.scratch_registers())
    by_stage = {}
    for label in ("init", "walk", "diff", "extend", "square", "distance", "fitness"):
        c = count_gates(oracle, stage=label)
        by_stage[label] = StageCounts(c.toffoli, c.cnot, c.nots)
    comparator = count_gates(build_gt_comparator(arith_width(m, n, spec), cutoff))
    total = count_gates(oracle)
    stages = {
        "path_sim": by_stage["walk"],
        "distance_fitness": _combine(
            by_stage["diff"], by_stage["extend"], by_stage["square"],
            by_stage["distance"], by_stage["fitness"],
        ),
        "comparator": StageCounts(comparator.toffoli, comparator.cnot, comparator.nots),
        "oracle_total": StageCounts(total.toffoli, total.cnot, total.nots),
    }
    return ResourceReport(
        n=n, m=m, cutoff=cutoff, register_widths=widths, ancilla=ancilla,
        stages=stages, depth=total.depth,
    )


# ---------------------------------------------------------------------------
# Scaling-claim fits


@dataclass(frozen=True)
class FitClaim:
    slope: float
    intercept: float
    residual_ratio: float
    points: list[tuple[float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.residual_ratio < RESIDUAL_THRESHOLD


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> FitClaim:
    """Least-squares a*x + b with residual ratio ||y - yhat|| / ||y||."""
    if len(xs) < 3:
        raise ValueError("need at least 3 points for a fit")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    ratio = float(np.linalg.norm(resid) / np.linalg.norm(y))
    return FitClaim(slope=float(a), intercept=float(b), residual_ratio=ratio,
                    points=list(zip(x.tolist(), y.tolist())))


def comparator_fit_cutoff(width: int) -> int:
    """Fixed-shape cutoff (100...01) used when fitting comparator cost vs width."""
    return 2 ** (width - 1) + 1 if width >= 2 else 0


def check_asymptotics(
    points: Iterable[tuple[int, int]],
    comparator_widths: Sequence[int] = tuple(range(2, 9)),
) -> dict[str, FitClaim]:
    """Fit measured Toffoli counts against the linear scaling claims.

    ``points`` are (n, m) pairs sharing one m (path-simulation cost vs n);
    comparator cost is fit against register width. Raises on fewer than
    three points per claim.
    """
    pts = sorted(set(points))
    if len(pts) < 3:
        raise ValueError("need at least 3 (n, m) points")
    if len({m for _, m in pts}) != 1:
        raise ValueError("path-simulation fit wants a fixed maze size m")
    walk_tof = [measured(n, m).stages["path_sim"].toffoli for n, m in pts]
    claims = {
        "path_sim_linear_in_n": linear_fit([n for n, _ in pts], walk_tof),
    }
    widths = sorted(set(comparator_widths))
    if len(widths) < 3:
        raise ValueError("need at least 3 comparator widths")
    cmp_tof = [
        count_gates(build_gt_comparator(w, comparator_fit_cutoff(w))).toffoli for w in widths
    ]
    claims["comparator_linear_in_width"] = linear_fit(widths, cmp_tof)
    return claims
