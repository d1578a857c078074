"""Density-operator backends and x/y correlator evaluation.

Three backends share one correlator interface:

* :class:`StabilizerThermalState` -- Gibbs state of ``H = -1/2 sum_n K_n`` for
  commuting Pauli generators; correlators come from the stabilizer group and
  never touch a 2**N matrix when the frame is a Clifford frame.
* :class:`DenseState` -- an explicit 2**N density matrix.
* :class:`RingExcitationState` -- one particle hopping on an N-site ring,
  stored as its N x N positional matrix.

A correlator is ``T_l = Tr(U sigma_l U^dagger rho)`` for an x/y string ``l``
and a :class:`~ghz_witness.frames.LocalFrame` ``U``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence, TextIO, Union

import numpy as np
from scipy.special import softmax

from .errors import CapExceededError, DimensionError, ModelError, UnsupportedFrameError
from .frames import AXIS_CODE, LocalFrame
from .pauli import (
    PauliString,
    XYString,
    check_commuting,
    codes_of,
    gf2_rank,
    group_table,
    multiply,
    popcount,
    subset_product,
    symplectic_vector,
)

DEFAULT_DENSE_CAP = 10


def tanh_half(beta: float) -> float:
    """``tanh(beta / 2)``; saturates to 1 for huge or infinite beta."""
    return float(np.tanh(0.5 * beta))


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform: ``out[l] = sum_k (-1)**(k.l) v[k]``."""
    a = np.array(values)
    n = a.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        h *= 2
    return a.reshape(n)


def _even_mask(n_qubits: int) -> np.ndarray:
    counts = np.bitwise_count(np.arange(1 << n_qubits, dtype=np.uint64))
    return counts % 2 == 0


def _xy_key(key, n_qubits: int) -> int:
    if isinstance(key, str):
        key = XYString.from_str(key)
    if isinstance(key, XYString):
        if key.n_qubits != n_qubits:
            raise DimensionError(f"size mismatch: {key.n_qubits} vs {n_qubits} qubits")
        return key.y_mask
    return int(key)


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """Correlators ``T_l`` over the 2**(N-1) x/y strings with an even y-count.

    ``values`` has length 2**N and is indexed by the y-mask; odd entries are
    held at zero.
    """

    n_qubits: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != (1 << self.n_qubits,):
            raise DimensionError(f"expected {1 << self.n_qubits} entries, got {v.shape}")
        if np.any(v[~_even_mask(self.n_qubits)] != 0):
            raise ValueError("odd y-count strings carry no correlator")
        if np.any(np.abs(v) > 1 + 1e-12):
            raise ValueError("correlators must lie in [-1, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_mapping(cls, n_qubits: int, entries: Mapping) -> "CorrelatorTable":
        v = np.zeros(1 << n_qubits)
        for key, value in entries.items():
            v[_xy_key(key, n_qubits)] = value
        return cls(n_qubits, v)

    @classmethod
    def zeros(cls, n_qubits: int) -> "CorrelatorTable":
        return cls(n_qubits, np.zeros(1 << n_qubits))

    def __getitem__(self, key) -> float:
        return float(self.values[_xy_key(key, self.n_qubits)])

    def __len__(self) -> int:
        return 1 << (self.n_qubits - 1)

    def items(self) -> Iterator[tuple[XYString, float]]:
        for mask in np.flatnonzero(_even_mask(self.n_qubits)):
            yield XYString(self.n_qubits, int(mask)), float(self.values[mask])

    def nonzero(self, atol: float = 1e-15) -> dict[str, float]:
        return {str(k): v for k, v in self.items() if abs(v) > atol}

    def to_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["l", "T"])
        for key, value in self.items():
            writer.writerow([str(key), f"{value:.12g}"])

    @classmethod
    def from_csv(cls, fh: TextIO) -> "CorrelatorTable":
        rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError("empty correlator CSV")
        n = len(rows[0]["l"])
        return cls.from_mapping(n, {r["l"]: float(r["T"]) for r in rows})


@dataclass(frozen=True, eq=False)
class StabilizerThermalState:
    """Thermal state ``2**-N prod_n (1 + tanh(beta/2) K_n)`` of N commuting generators."""

    generators: tuple[PauliString, ...]
    beta: float

    def __post_init__(self):
        gens = tuple(PauliString.from_str(g) if isinstance(g, str) else g for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ModelError("need at least one generator")
        n = gens[0].n_qubits
        if any(g.n_qubits != n for g in gens):
            raise DimensionError("generators act on different numbers of qubits")
        if len(gens) != n:
            raise ModelError(f"need exactly {n} generators for {n} qubits, got {len(gens)}")
        for g in gens:
            if not g.is_hermitian():
                raise ModelError(f"generator {g} is not Hermitian")
            if g.support == 0:
                raise ModelError("identity generator is not traceless")
        check_commuting(gens)
        # a dependent set would leave a degenerate ground space
        if gf2_rank(symplectic_vector(g) for g in gens) != n:
            raise ModelError("generators are not independent")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits

    @property
    def t(self) -> float:
        return tanh_half(self.beta)

    @cached_property
    def group(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(codes, signs, sizes)`` over all 2**N subset products."""
        codes, phases, sizes = group_table(self.generators)
        return codes, np.where(phases == 0, 1, -1), sizes

    @cached_property
    def _elimination(self) -> dict[int, tuple[int, int]]:
        basis: dict[int, tuple[int, int]] = {}
        for i, g in enumerate(self.generators):
            vec, combo = symplectic_vector(g), 1 << i
            while vec:
                top = vec.bit_length() - 1
                if top not in basis:
                    basis[top] = (vec, combo)
                    break
                bvec, bcombo = basis[top]
                vec, combo = vec ^ bvec, combo ^ bcombo
        return basis

    def decompose(self, p: PauliString) -> tuple[int, int] | None:
        """Find ``(subset, sign)`` with ``prod_subset K = sign * p``, or None."""
        vec, combo = symplectic_vector(p), 0
        basis = self._elimination
        while vec:
            top = vec.bit_length() - 1
            if top not in basis:
                return None
            bvec, bcombo = basis[top]
            vec, combo = vec ^ bvec, combo ^ bcombo
        prod = subset_product(self.generators, combo)
        rel = (prod.phase - p.phase) % 4
        return combo, 1 if rel == 0 else -1

    def expectation(self, p: PauliString) -> float:
        """``Tr(p rho)`` for a Hermitian Pauli string ``p``."""
        found = self.decompose(p)
        if found is None:
            return 0.0
        subset, sign = found
        return sign * self.t ** popcount(subset)

    def to_dense(self, cap: int = DEFAULT_DENSE_CAP) -> "DenseState":
        n = self.n_qubits
        _check_cap(n, cap)
        rho = np.eye(1 << n, dtype=complex)
        t = self.t
        for g in self.generators:
            rho = rho @ (np.eye(1 << n) + t * g.to_matrix())
        return DenseState(rho / (1 << n), cap=cap)


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds the dense cap of {cap}")


@dataclass(frozen=True, eq=False)
class DenseState:
    """An explicit density matrix on ``n_qubits`` qubits (qubit 0 most significant)."""

    matrix: np.ndarray
    cap: int = DEFAULT_DENSE_CAP
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("density matrix must be square")
        dim = m.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n or n < 1:
            raise DimensionError(f"dimension {dim} is not a power of two")
        _check_cap(n, self.cap)
        if not np.allclose(m, m.conj().T, atol=1e-10):
            raise ValueError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if abs(np.trace(m).real - 1) > 1e-12:
            raise ValueError(f"trace {np.trace(m).real!r} is not 1")
        if np.linalg.eigvalsh(m)[0] < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_vector(cls, psi, cap: int = DEFAULT_DENSE_CAP) -> "DenseState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), cap=cap)

    @classmethod
    def maximally_mixed(cls, n_qubits: int, cap: int = DEFAULT_DENSE_CAP) -> "DenseState":
        _check_cap(n_qubits, cap)
        return cls(np.eye(1 << n_qubits) / (1 << n_qubits), cap=cap)

    def to_dense(self, cap: int | None = None) -> "DenseState":
        if cap is not None:
            _check_cap(self.n_qubits, cap)
        return self


@dataclass(frozen=True, eq=False)
class RingExcitationState:
    """Thermal state of one particle hopping on an N-site ring.

    Site ``r`` occupied is the computational basis state with only qubit ``r``
    in |1>.  Band energies are ``E_m = 2 cos(2 pi m / N)``.
    """

    n_sites: int
    beta: float

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError("a ring needs at least 3 sites")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def n_qubits(self) -> int:
        return self.n_sites

    @property
    def energies(self) -> np.ndarray:
        return 2 * np.cos(2 * np.pi * np.arange(self.n_sites) / self.n_sites)

    @cached_property
    def weights(self) -> np.ndarray:
        """Boltzmann weights of the band states, normalised to sum to one."""
        if np.isinf(self.beta):
            e = self.energies
            w = np.isclose(e, e.min()).astype(float)
            return w / w.sum()
        return softmax(-self.beta * self.energies)

    @cached_property
    def matrix(self) -> np.ndarray:
        n = self.n_sites
        diff = np.subtract.outer(np.arange(n), np.arange(n))
        phases = np.exp(2j * np.pi * np.multiply.outer(diff, np.arange(n)) / n)
        rho = phases @ self.weights / n
        rho = 0.5 * (rho + rho.conj().T)
        rho.setflags(write=False)
        return rho

    def to_dense(self, cap: int = DEFAULT_DENSE_CAP) -> DenseState:
        n = self.n_sites
        _check_cap(n, cap)
        idx = 1 << (n - 1 - np.arange(n))
        full = np.zeros((1 << n, 1 << n), dtype=complex)
        full[np.ix_(idx, idx)] = self.matrix
        return DenseState(full, cap=cap)


StateBackend = Union[StabilizerThermalState, DenseState, RingExcitationState]


def rotated_density(matrix: np.ndarray, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """``U^dagger rho U`` for ``U`` the tensor product of per-qubit unitaries."""
    n = len(unitaries)
    dim = 1 << n
    t = np.asarray(matrix).reshape((2,) * (2 * n))
    for j, u in enumerate(unitaries):
        # row index j: contract with U^dagger; column index n+j: contract with U
        t = np.moveaxis(np.tensordot(u.conj().T, t, axes=([1], [j])), 0, j)
        t = np.moveaxis(np.tensordot(t, u, axes=([n + j], [0])), -1, n + j)
    return t.reshape(dim, dim)


def antidiagonal(matrix: np.ndarray) -> np.ndarray:
    """``a[k] = matrix[k, k']`` with ``k'`` the bitwise complement of ``k``."""
    return np.fliplr(matrix).diagonal().copy()


def _rotated_pauli(l: XYString, frame: LocalFrame) -> PauliString:
    n = l.n_qubits
    codes = []
    sign = 1
    for j, tag in enumerate(frame.tags):
        if (l.y_mask >> (n - 1 - j)) & 1:
            codes.append(AXIS_CODE[tag.y_axis])
            sign *= tag.y_sign
        else:
            codes.append(AXIS_CODE[tag.x_axis])
            sign *= tag.x_sign
    x = sum(1 << (n - 1 - j) for j, c in enumerate(codes) if c & 1)
    z = sum(1 << (n - 1 - j) for j, c in enumerate(codes) if c & 2)
    return PauliString(n, x, z, 0 if sign > 0 else 2)


def _check_frame(state: StateBackend, frame: LocalFrame) -> None:
    if frame.n_qubits != state.n_qubits:
        raise DimensionError(f"frame has {frame.n_qubits} qubits, state has {state.n_qubits}")


def _dense_for(state: StateBackend, cap: int | None) -> DenseState:
    if isinstance(state, DenseState):
        return state
    cap = DEFAULT_DENSE_CAP if cap is None else cap
    if isinstance(state, StabilizerThermalState) and state.n_qubits > cap:
        raise UnsupportedFrameError(
            f"non-Clifford frame on {state.n_qubits} stabilizer qubits exceeds dense cap {cap}"
        )
    return state.to_dense(cap)


def _ring_correlator(state: RingExcitationState, l: XYString, unitaries) -> float:
    n = state.n_sites
    paulis = (np.array([[0, 1], [1, 0]], dtype=complex), np.array([[0, -1j], [1j, 0]]))
    ops = [
        u @ paulis[(l.y_mask >> (n - 1 - j)) & 1] @ u.conj().T for j, u in enumerate(unitaries)
    ]
    d = np.array([a[0, 0] for a in ops])
    # excl[r, s] = product of d_j over j outside {r, s}; built in O(N^2)
    prefix = np.concatenate([[1], np.cumprod(d)])
    suffix = np.concatenate([np.cumprod(d[::-1])[::-1], [1]])
    excl = np.zeros((n, n), dtype=complex)
    for r in range(n):
        mid = 1.0 + 0j
        excl[r, r] = prefix[r] * suffix[r + 1]
        for s in range(r + 1, n):
            excl[r, s] = excl[s, r] = prefix[r] * mid * suffix[s + 1]
            mid *= d[s]
    rho = state.matrix
    total = 0j
    for r in range(n):
        total += rho[r, r] * ops[r][1, 1] * excl[r, r]
        for s in range(n):
            if s != r:
                # <s| P |r> with the excitation moving from r to s
                total += rho[r, s] * ops[s][1, 0] * ops[r][0, 1] * excl[r, s]
    return float(total.real)


def correlator(state: StateBackend, l: XYString | str, frame: LocalFrame, cap: int | None = None) -> float:
    """``T_l = Tr(U sigma_l U^dagger rho)``."""
    if isinstance(l, str):
        l = XYString.from_str(l)
    if l.n_qubits != state.n_qubits:
        raise DimensionError(f"string has {l.n_qubits} qubits, state has {state.n_qubits}")
    _check_frame(state, frame)
    if isinstance(state, StabilizerThermalState) and frame.is_clifford:
        return state.expectation(_rotated_pauli(l, frame))
    if isinstance(state, RingExcitationState):
        return _ring_correlator(state, l, frame.unitaries())
    dense = _dense_for(state, cap)
    rho_f = rotated_density(dense.matrix, frame.unitaries())
    n = l.n_qubits
    k = np.arange(1 << n, dtype=np.uint64)
    phase = (l.y_count + 2 * np.bitwise_count(k & np.uint64(l.y_mask))) % 4
    # sigma_l|k> = i**phase |k'>  =>  Tr(sigma_l rho) = sum_k conj(i**phase) rho[k', k]
    vals = np.conj(1j ** phase.astype(np.int64)) * antidiagonal(rho_f)[::-1]
    # antidiagonal(rho)[::-1][k] = rho[k', k]
    return float(vals.sum().real)


def _stabilizer_table(state: StabilizerThermalState, frame: LocalFrame) -> CorrelatorTable:
    n = state.n_qubits
    codes, signs, sizes = state.group
    x_codes = np.array([AXIS_CODE[t.x_axis] for t in frame.tags], dtype=np.int8)
    y_codes = np.array([AXIS_CODE[t.y_axis] for t in frame.tags], dtype=np.int8)
    in_x = codes == x_codes[None, :]
    in_y = codes == y_codes[None, :]
    keep = np.all(in_x | in_y, axis=1)
    weights = 1 << np.arange(n - 1, -1, -1)
    masks = (in_y[keep] * weights[None, :]).sum(axis=1)
    x_signs = np.array([t.x_sign for t in frame.tags])
    y_signs = np.array([t.y_sign for t in frame.tags])
    frame_sign = np.prod(np.where(in_y[keep], y_signs[None, :], x_signs[None, :]), axis=1)
    vals = signs[keep] * frame_sign * state.t ** sizes[keep].astype(float)
    table = np.zeros(1 << n)
    even = np.bitwise_count(masks.astype(np.uint64)) % 2 == 0
    table[masks[even]] = vals[even]
    return CorrelatorTable(n, table)


def dense_table(matrix: np.ndarray, unitaries: Sequence[np.ndarray]) -> CorrelatorTable:
    n = len(unitaries)
    rho_f = rotated_density(matrix, unitaries)
    # T_l = i**-|l| sum_k (-1)**(k.l) rho_f[k', k]
    spectrum = fwht(antidiagonal(rho_f)[::-1])
    counts = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    vals = (spectrum * (1j ** (-counts))).real
    vals[counts % 2 == 1] = 0.0
    return CorrelatorTable(n, np.clip(vals, -1.0, 1.0))


def full_xy_table(state: StateBackend, frame: LocalFrame, cap: int | None = None) -> CorrelatorTable:
    """All even-y correlators at ``frame``."""
    _check_frame(state, frame)
    if isinstance(state, StabilizerThermalState) and frame.is_clifford:
        return _stabilizer_table(state, frame)
    if isinstance(state, RingExcitationState):
        n = state.n_sites
        unitaries = frame.unitaries()
        vals = np.zeros(1 << n)
        for mask in np.flatnonzero(_even_mask(n)):
            vals[mask] = _ring_correlator(state, XYString(n, int(mask)), unitaries)
        return CorrelatorTable(n, np.clip(vals, -1.0, 1.0))
    dense = _dense_for(state, cap)
    return dense_table(dense.matrix, frame.unitaries())


def postselect_pair(state: RingExcitationState, r: int) -> np.ndarray:
    """Two-site state left on sites ``r, r+1`` after finding all other sites empty."""
    n = state.n_sites
    idx = [r % n, (r + 1) % n]
    block = state.matrix[np.ix_(idx, idx)]
    return block / np.trace(block).real


def singlet_fidelity(state: RingExcitationState, r: int = 0) -> float:
    """Overlap of the post-selected pair with ``(|r> - |r+1>)/sqrt(2)``."""
    psi = np.array([1.0, -1.0]) / np.sqrt(2)
    return float((psi @ postselect_pair(state, r) @ psi).real)
