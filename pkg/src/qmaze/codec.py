"""Binary path encoding: direction sequences <-> 2n-bit integers.

Every register in the search artifact indexes basis states by this code.
Each direction occupies two bits (N=00, E=01, S=10, W=11) and the first
move sits in the most significant pair, so the binary literal of an
encoded path reads left to right in move order (e.g. (S, E) -> 0b1001).
"""

from __future__ import annotations

from .maze import Direction

# Largest supported path length; 4**12 amplitudes is the desk-scale ceiling.
MAX_PATH_LENGTH = 12

_DIR_CODE = {Direction.N: 0b00, Direction.E: 0b01, Direction.S: 0b10, Direction.W: 0b11}
_CODE_DIR = {v: k for k, v in _DIR_CODE.items()}


def encode_direction(d: Direction) -> int:
    """Two-bit code of a single direction (N=0, E=1, S=2, W=3)."""
    return _DIR_CODE[d]


def decode_direction(code: int) -> Direction:
    """Inverse of :func:`encode_direction`."""
    try:
        return _CODE_DIR[code]
    except KeyError:
        raise ValueError(f"direction code must be in 0..3, got {code}") from None


def encode_path(path) -> int:
    """Concatenate two-bit direction codes, first move in the MSB pair."""
    value = 0
    for d in path:
        value = (value << 2) | _DIR_CODE[d]
    return value


def decode_index(value: int, n: int) -> tuple[Direction, ...]:
    """Direction sequence of length ``n`` encoded by ``value``.

    Raises ValueError if ``value`` is outside [0, 4**n).
    """
    if n < 0:
        raise ValueError(f"path length must be >= 0, got {n}")
    if not 0 <= value < 4**n:
        raise ValueError(f"path index {value} out of range for length {n}")
    return tuple(_CODE_DIR[(value >> (2 * (n - 1 - k))) & 0b11] for k in range(n))


def path_count(n: int) -> int:
    """Number of candidate paths of length n, i.e. 4**n."""
    if n < 0:
        raise ValueError(f"path length must be >= 0, got {n}")
    if n > MAX_PATH_LENGTH:
        raise ValueError(f"path length {n} exceeds cap {MAX_PATH_LENGTH}")
    return 4**n


def path_letters(path) -> str:
    """Render a direction sequence as letters, e.g. 'SE'."""
    return "".join(d.name for d in path)


def path_bits(value: int, n: int) -> str:
    """Render an encoded path as its 2n-bit binary string."""
    if n == 0:
        return ""
    return format(value, f"0{2 * n}b")
