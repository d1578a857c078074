"""Exact N-qubit Pauli-string algebra in symplectic bitmask form.

Qubit ``j`` (0-based, leftmost in text) is stored at bit ``n_qubits - 1 - j``
of each mask, so an N-bit basis string read as an integer is also the index
of that basis state in a dense state vector built with ``np.kron`` in qubit
order.  Phases are quartic roots of unity stored as an integer ``p`` meaning
``i**p``; ``Y`` on a qubit is the Hermitian Pauli-Y (both mask bits set).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ModelError

_LETTERS = "IXZY"  # index = x + 2*z
_SIGN_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def popcount(value: int) -> int:
    return bin(value).count("1")


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of ``i`` picked up by the qubit-wise product of two strings."""
    y1, xo1, zo1 = x1 & z1, x1 & ~z1, z1 & ~x1
    y2, xo2, zo2 = x2 & z2, x2 & ~z2, z2 & ~x2
    # XY=iZ, YZ=iX, ZX=iY and the reverses pick up -i
    plus = popcount(xo1 & y2) + popcount(y1 & zo2) + popcount(zo1 & xo2)
    minus = popcount(y1 & xo2) + popcount(xo1 & zo2) + popcount(zo1 & y2)
    return (plus - minus) % 4


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of I/X/Y/Z on ``n_qubits`` qubits."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if (self.x_mask | self.z_mask) & ~full:
            raise ValueError("mask has bits beyond n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse ``"+XZY"``, ``"-IYX"``, ``"iXX"`` or a bare ``"XZY"``."""
        text = text.strip()
        phase = 0
        if text.startswith("-"):
            phase, text = 2, text[1:]
        elif text.startswith("+"):
            text = text[1:]
        if text.startswith("i"):
            phase, text = (phase + 1) % 4, text[1:]
        text = text.upper()
        if not text or any(c not in _LETTERS for c in text):
            raise ValueError(f"invalid Pauli string {text!r}")
        n = len(text)
        x = z = 0
        for j, c in enumerate(text):
            code = _LETTERS.index(c)
            bit = 1 << (n - 1 - j)
            if code & 1:
                x |= bit
            if code & 2:
                z |= bit
        return cls(n, x, z, phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    def letters(self) -> str:
        n = self.n_qubits
        return "".join(
            _LETTERS[((self.x_mask >> (n - 1 - j)) & 1) | (((self.z_mask >> (n - 1 - j)) & 1) << 1)]
            for j in range(n)
        )

    def __str__(self) -> str:
        return _SIGN_TEXT[self.phase] + self.letters()

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return popcount(self.support)

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian():
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, self.phase + 2)

    def to_matrix(self) -> np.ndarray:
        mat = reduce(np.kron, [_SINGLE[c] for c in self.letters()])
        return (1j ** self.phase) * mat


@dataclass(frozen=True)
class XYString:
    """A tensor product of sigma_x / sigma_y only; bit set means sigma_y there."""

    n_qubits: int
    y_mask: int

    def __post_init__(self):
        if self.y_mask >> self.n_qubits:
            raise ValueError("y_mask has bits beyond n_qubits")

    @classmethod
    def from_str(cls, text: str) -> "XYString":
        text = text.strip().lower()
        if not text or any(c not in "xy" for c in text):
            raise ValueError(f"invalid x/y string {text!r}")
        n = len(text)
        return cls(n, sum(1 << (n - 1 - j) for j, c in enumerate(text) if c == "y"))

    @property
    def y_count(self) -> int:
        return popcount(self.y_mask)

    @property
    def is_even(self) -> bool:
        return self.y_count % 2 == 0

    def __str__(self) -> str:
        n = self.n_qubits
        return "".join("y" if (self.y_mask >> (n - 1 - j)) & 1 else "x" for j in range(n))

    def to_pauli(self) -> PauliString:
        full = (1 << self.n_qubits) - 1
        return PauliString(self.n_qubits, full, self.y_mask)


def _check_sizes(a, b):
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b`` with the exact quartic phase."""
    _check_sizes(a, b)
    phase = a.phase + b.phase + _product_phase(a.x_mask, a.z_mask, b.x_mask, b.z_mask)
    return PauliString(a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return popcount((a.x_mask & b.z_mask) ^ (a.z_mask & b.x_mask)) % 2 == 0


def apply_to_basis_state(l: XYString, k: int, n_qubits: int | None = None) -> tuple[int, int]:
    """Action of sigma_l on the basis state |k>.

    Returns ``(phase, k_prime)`` with ``sigma_l |k> = i**phase |k_prime>``.  Every
    factor flips its qubit; each sigma_y adds ``i`` on |0> and ``-i`` on |1>.
    """
    n = l.n_qubits if n_qubits is None else n_qubits
    if n != l.n_qubits:
        raise DimensionError(f"size mismatch: {l.n_qubits} vs {n} qubits")
    full = (1 << n) - 1
    if k < 0 or k > full:
        raise DimensionError(f"basis index {k} out of range for {n} qubits")
    phase = (l.y_count + 2 * popcount(k & l.y_mask)) % 4
    return phase, k ^ full


def subset_product(generators: Sequence[PauliString], subset: int) -> PauliString:
    """Ordered product of the generators whose bit is set in ``subset``.

    Bit ``i`` of ``subset`` selects ``generators[i]``.  The generators must
    pairwise commute, so the order only fixes the phase convention.
    """
    if not generators:
        raise ModelError("empty generator list")
    check_commuting(generators)
    out = PauliString.identity(generators[0].n_qubits)
    for i, g in enumerate(generators):
        if (subset >> i) & 1:
            out = multiply(out, g)
    return out


def check_commuting(generators: Iterable[PauliString]) -> None:
    gens = list(generators)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not commutes(gens[i], gens[j]):
                raise ModelError(f"generators {gens[i]} and {gens[j]} do not commute")


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of integers read as bit vectors."""
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in basis:
                basis[top] = row
                break
            row ^= basis[top]
    return len(basis)


def symplectic_vector(p: PauliString) -> int:
    return (p.x_mask << p.n_qubits) | p.z_mask


# Per-qubit codes used by the vectorised group tables: code = x + 2*z,
# i.e. 0=I, 1=X, 2=Z, 3=Y.  _CODE_PHASE[a, b] is the i-exponent of (a)(b).
_CODE_PHASE = np.array(
    [
        [0, 0, 0, 0],
        [0, 0, 3, 1],  # X*Z = -iY, X*Y = iZ
        [0, 1, 0, 3],  # Z*X = iY,  Z*Y = -iX
        [0, 3, 1, 0],  # Y*X = -iZ, Y*Z = iX
    ],
    dtype=np.int64,
)


def codes_of(p: PauliString) -> np.ndarray:
    n = p.n_qubits
    shifts = np.arange(n - 1, -1, -1)
    x = (p.x_mask >> shifts) & 1 if n <= 62 else np.array([(p.x_mask >> int(s)) & 1 for s in shifts])
    z = (p.z_mask >> shifts) & 1 if n <= 62 else np.array([(p.z_mask >> int(s)) & 1 for s in shifts])
    return (np.asarray(x) + 2 * np.asarray(z)).astype(np.int8)


def group_table(generators: Sequence[PauliString]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Enumerate all 2**g products of a commuting generator list.

    Returns ``(codes, phases, sizes)``: row ``s`` of ``codes`` holds the per-qubit
    code (0=I, 1=X, 2=Z, 3=Y) of the product selected by subset bit mask ``s``,
    ``phases[s]`` its i-exponent and ``sizes[s]`` the number of factors.
    """
    check_commuting(generators)
    n = generators[0].n_qubits
    codes = np.zeros((1, n), dtype=np.int8)
    phases = np.zeros(1, dtype=np.int64)
    sizes = np.zeros(1, dtype=np.int64)
    for g in generators:
        gc = codes_of(g)
        extra = _CODE_PHASE[codes, gc[None, :]].sum(axis=1)
        codes = np.concatenate([codes, codes ^ gc[None, :]])
        phases = np.concatenate([phases, (phases + g.phase + extra) % 4])
        sizes = np.concatenate([sizes, sizes + 1])
    return codes, phases, sizes
