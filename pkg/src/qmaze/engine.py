"""Exact amplitude-amplification simulator over the path register.

Holds 4**n complex amplitudes indexed by encoded paths. The oracle is
diagonal (marked amplitudes get a sign flip), the diffuser is inversion
about the mean, and their composition rotates the state by 2*theta inside
the two-dimensional span of the marked and unmarked superpositions, with
theta = arcsin(sqrt(k/N)). All operations return new states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import codec


@dataclass(frozen=True)
class PathState:
    """Amplitudes over all 4**n basis paths; L2 norm 1."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (codec.path_count(self.n),):
            raise ValueError(f"state must have 4**{self.n} amplitudes")

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def marked_probability(self, marked: np.ndarray) -> float:
        return float(np.sum(np.abs(self.amps[np.asarray(marked, dtype=np.int64)]) ** 2))


@dataclass(frozen=True)
class GroverGeometry:
    """The (N, k, theta) triple governing the rotation dynamics."""

    num_states: int
    num_marked: int

    def __post_init__(self):
        if not 0 <= self.num_marked <= self.num_states:
            raise ValueError("marked count must lie in [0, N]")

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.num_marked / self.num_states))

    @property
    def degenerate(self) -> bool:
        return self.num_marked == 0

    def success_probability(self, rounds: int) -> float:
        """Closed-form marked probability after ``rounds`` iterations."""
        return math.sin((2 * rounds + 1) * self.theta) ** 2


class DegenerateGeometryError(ValueError):
    """Nothing is marked: the oracle is the identity and rotation is undefined."""


def prepare_uniform(n: int) -> PathState:
    """Uniform superposition: every amplitude exactly 1/2**n."""
    total = codec.path_count(n)
    amps = np.full(total, 1.0 / 2**n, dtype=np.complex128)
    return PathState(n=n, amps=amps)


def apply_oracle(state: PathState, marked) -> PathState:
    """Negate the amplitudes of the marked basis states."""
    idx = np.asarray(marked, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= state.dim):
        raise ValueError("marked index out of range")
    amps = state.amps.copy()
    amps[idx] = -amps[idx]
    return PathState(n=state.n, amps=amps)


def apply_diffuser(state: PathState) -> PathState:
    """Inversion about the mean: a -> 2*mean(a) - a."""
    mean = state.amps.mean()
    return PathState(n=state.n, amps=2 * mean - state.amps)


def grover_iterate(state: PathState, marked, rounds: int) -> PathState:
    """Apply (diffuser . oracle) ``rounds`` times."""
    if rounds < 0:
        raise ValueError("round count must be >= 0")
    idx = np.asarray(marked, dtype=np.int64)
    current = state
    for _ in range(rounds):
        current = apply_diffuser(apply_oracle(current, idx))
    return current


def optimal_rounds(geometry: GroverGeometry) -> int:
    """Iteration count maximizing the marked probability: floor(pi/(4*theta) - 1/2).

    A 1e-9 nudge keeps exact-rotation cases (e.g. k = N/4, theta = pi/6,
    where the argument is the integer 1) from flooring one step low on a
    one-ulp rounding error.
    """
    if geometry.degenerate:
        raise DegenerateGeometryError("no marked states: rotation angle is zero")
    return max(0, math.floor(math.pi / (4 * geometry.theta) - 0.5 + 1e-9))


def measure(state: PathState, rng: np.random.Generator | int) -> int:
    """Sample one basis index with Born-rule probabilities."""
    return int(measure_shots(state, rng, 1)[0])


def measure_shots(state: PathState, rng: np.random.Generator | int, shots: int) -> np.ndarray:
    """Sample many basis indices; deterministic for a seeded generator."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    probs = state.probabilities()
    probs = probs / probs.sum()  # guard rounding drift at the 1e-16 level
    return gen.choice(state.dim, size=shots, p=probs)


def rotation_block(geometry: GroverGeometry) -> np.ndarray:
    """The 2x2 matrix of one Grover iterate on span{|perp>, |T>}.

    Built from the simulated action of the iterate on the two basis
    vectors (synthetic marked set of the right size), not from the closed
    form; in this basis order it equals [[cos2t, -sin2t], [sin2t, cos2t]].
    """
    if geometry.degenerate or geometry.num_marked == geometry.num_states:
        raise DegenerateGeometryError("rotation block needs 1 <= k < N")
    big_n, k = geometry.num_states, geometry.num_marked
    n = round(math.log(big_n, 4))
    if 4**n != big_n:
        raise ValueError("state count must be a power of four")
    marked = np.arange(k, dtype=np.int64)
    target = np.zeros(big_n, dtype=np.complex128)
    target[:k] = 1 / math.sqrt(k)
    perp = np.zeros(big_n, dtype=np.complex128)
    perp[k:] = 1 / math.sqrt(big_n - k)
    basis = (perp, target)
    block = np.empty((2, 2), dtype=np.complex128)
    for col, vec in enumerate(basis):
        out = grover_iterate(PathState(n=n, amps=vec), marked, 1).amps
        block[0, col] = np.vdot(basis[0], out)
        block[1, col] = np.vdot(basis[1], out)
    return block


def rotation_spectrum(geometry: GroverGeometry) -> np.ndarray:
    """Eigenvalues of the iterate's 2x2 block; equals exp(+/-2i*theta)."""
    eig = np.linalg.eigvals(rotation_block(geometry))
    return eig[np.argsort(eig.imag)]  # e^{-2i theta} first, e^{+2i theta} second


def state_to_csv(state: PathState) -> str:
    """CSV dump ``index,real,imag,probability`` of the full state."""
    lines = ["index,real,imag,probability"]
    probs = state.probabilities()
    for u in range(state.dim):
        a = state.amps[u]
        lines.append(f"{u},{float(a.real)!r},{float(a.imag)!r},{float(probs[u])!r}")
    return "\n".join(lines) + "\n"
