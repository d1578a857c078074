"""GHZ-projector witness values and the strata they certify.

The witness family is ``W = 1/2 sum_k b_k (Q+_k - Q-_k)`` with ``Q+-_k`` the
projectors on ``(|k> +- |k'>)/sqrt(2)``.  At a fixed local frame everything
is a function of the spectrum

    lambda_k = sum_l (-1)**(k.l) cos(pi |l| / 2) T_l = 2**N Re <k| rho_f |k'>,

where ``rho_f`` is the state seen in the frame.  W_A keeps the single best
``k``; W_B is the operational sum of squared even correlators.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import CapExceededError, DimensionError
from .frames import LocalFrame
from .states import (
    DEFAULT_DENSE_CAP,
    CorrelatorTable,
    DenseState,
    RingExcitationState,
    StabilizerThermalState,
    StateBackend,
    antidiagonal,
    full_xy_table,
    fwht,
    rotated_density,
)

NORM_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class LambdaVector:
    n_qubits: int
    values: np.ndarray

    @property
    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    @property
    def sum_squares(self) -> float:
        return float(np.dot(self.values, self.values))

    def best(self) -> tuple[int, float]:
        """Index and value of the entry with the largest magnitude (lowest index on ties)."""
        k = int(np.argmax(np.abs(self.values)))
        return k, float(self.values[k])


def _parity_signs(n_qubits: int) -> np.ndarray:
    """cos(pi |l| / 2): +1, 0, -1, 0 for |l| = 0, 1, 2, 3 (mod 4)."""
    counts = np.bitwise_count(np.arange(1 << n_qubits, dtype=np.uint64)).astype(np.int64)
    return np.array([1.0, 0.0, -1.0, 0.0])[counts % 4]


def lambda_from_table(table: CorrelatorTable) -> LambdaVector:
    n = table.n_qubits
    return LambdaVector(n, fwht(_parity_signs(n) * table.values))


def w_b_value(table: CorrelatorTable) -> float:
    """Sum of squared even correlators at the table's frame."""
    return float(np.dot(table.values, table.values))


def w_b_exact(table: CorrelatorTable) -> float:
    """``Tr(W rho)`` for ``b_k = 2**N lambda_k / sum|lambda|``, i.e. ``sum lambda^2 / sum |lambda|``.

    This is never below :func:`w_b_value` for a physical state, and equals it
    when ``sum |lambda| = 2**N``.
    """
    lam = lambda_from_table(table)
    return lam.sum_squares / lam.l1 if lam.l1 > 0 else 0.0


def w_c_value(table: CorrelatorTable) -> float:
    return math.sqrt(w_b_value(table))


def w_a_from_table(table: CorrelatorTable) -> float:
    return float(np.abs(lambda_from_table(table).values).max())


def w_a_fixed_frame(state: StateBackend, frame: LocalFrame, cap: int | None = None) -> float:
    """``2**N max_k |Re <k| rho_f |k'>|`` at ``frame``.

    Clifford frames on stabilizer states go through the correlator table and
    never build a dense matrix; at a frame aligned with the stabilizer group
    this equals the sum of the absolute correlators.
    """
    if frame.n_qubits != state.n_qubits:
        raise DimensionError(f"frame has {frame.n_qubits} qubits, state has {state.n_qubits}")
    cap = DEFAULT_DENSE_CAP if cap is None else cap
    if isinstance(state, StabilizerThermalState) and frame.is_clifford:
        return w_a_from_table(full_xy_table(state, frame))
    if isinstance(state, RingExcitationState) and state.n_qubits > cap:
        return w_a_from_table(full_xy_table(state, frame))
    dense = state if isinstance(state, DenseState) else state.to_dense(cap)
    rho_f = rotated_density(dense.matrix, frame.unitaries())
    return float((1 << state.n_qubits) * np.abs(antidiagonal(rho_f).real).max())


def w_b_fixed_frame(state: StateBackend, frame: LocalFrame, cap: int | None = None) -> float:
    return w_b_value(full_xy_table(state, frame, cap))


@dataclass(frozen=True, eq=False)
class WitnessCoefficients:
    """Coefficients ``b_k`` over all 2**N strings, each pair {k, k'} counted twice."""

    n_qubits: int
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).copy()
        if b.shape != (1 << self.n_qubits,):
            raise DimensionError(f"expected {1 << self.n_qubits} coefficients, got {b.shape}")
        if np.abs(b).sum() > (1 << self.n_qubits) * (1 + NORM_SLACK):
            raise ValueError("sum |b_k| exceeds 2**N; the operator is not a witness")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @classmethod
    def single(cls, n_qubits: int, k: int, sign: int = 1) -> "WitnessCoefficients":
        """The W_A choice: ``b_k = +-2**N`` and zero elsewhere."""
        b = np.zeros(1 << n_qubits)
        b[k] = sign * (1 << n_qubits)
        return cls(n_qubits, b)

    @classmethod
    def from_lambda(cls, lam: LambdaVector) -> "WitnessCoefficients":
        """The W_B choice ``b_k = 2**N lambda_k / sum |lambda|``."""
        if lam.l1 == 0:
            return cls(lam.n_qubits, np.zeros_like(lam.values))
        return cls(lam.n_qubits, (1 << lam.n_qubits) * lam.values / lam.l1)

    def expectation(self, lam: LambdaVector) -> float:
        """``Tr(W rho) = 2**-N sum_k b_k lambda_k``."""
        return float(np.dot(self.b, lam.values)) / (1 << self.n_qubits)


def separable_bound(coeffs: WitnessCoefficients) -> float:
    """Upper bound on ``<psi|W|psi>`` over fully separable states: ``2**-N sum |b_k|``."""
    return float(np.abs(coeffs.b).sum()) / (1 << coeffs.n_qubits)


def build_witness_matrix(coeffs: WitnessCoefficients, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """``1/2 sum_k b_k (|k><k'| + |k'><k|)`` as a dense matrix."""
    n = coeffs.n_qubits
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds the dense cap of {cap}")
    dim = 1 << n
    k = np.arange(dim)
    w = np.zeros((dim, dim))
    np.add.at(w, (k, k ^ (dim - 1)), 0.5 * coeffs.b)
    return w + w.T


def entangled_threshold(m: int) -> float:
    """W_A above ``2**(M-1)`` means at least M+1 qubits are entangled."""
    return float(2 ** (m - 1))


def partite_threshold(m: int, n_qubits: int) -> float:
    """W_A above this means the entanglement is at least (M+1)-partite."""
    if n_qubits % m == 0:
        return float(2 ** (n_qubits - n_qubits // m))
    return float(2 ** (n_qubits - 1 - n_qubits // m))


@dataclass(frozen=True)
class StrataReport:
    n_qubits: int
    value_wa: float | None
    value_wb: float
    value_wc: float
    min_entangled_qubits: int
    min_partiteness: int
    two_setting_wwzb_excluded: bool
    multi_setting_wwzb_violated: bool

    @property
    def driving_value(self) -> float:
        return self.value_wb if self.value_wa is None else self.value_wa

    def to_record(self) -> str:
        """One ``key=value`` line per field."""
        return "\n".join(f"{k}={_fmt(v)}" for k, v in asdict(self).items())

    @staticmethod
    def csv_header() -> list[str]:
        return [f.name for f in fields(StrataReport)]

    def csv_row(self) -> list[str]:
        return [_fmt(v) for v in asdict(self).values()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_header())
        writer.writerow(self.csv_row())
        return buf.getvalue()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def strata(value: float, n_qubits: int, *, value_wb: float | None = None) -> StrataReport:
    """Classify a witness value into entanglement strata.

    ``value`` drives the qubit-count and partiteness thresholds (strict
    inequalities).  Pass ``value_wb`` when ``value`` is a W_A value; otherwise
    ``value`` is itself taken as W_B.
    """
    if value < 0 or (value_wb is not None and value_wb < 0):
        raise ValueError("witness values are non-negative")
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    value_wa = None if value_wb is None else float(value)
    wb = float(value if value_wb is None else value_wb)
    min_entangled = max(
        (m + 1 for m in range(1, n_qubits) if value > entangled_threshold(m)), default=0
    )
    min_partite = max(
        (m + 1 for m in range(1, n_qubits) if value > partite_threshold(m, n_qubits)), default=0
    )
    wc = math.sqrt(wb)
    return StrataReport(
        n_qubits=n_qubits,
        value_wa=value_wa,
        value_wb=wb,
        value_wc=wc,
        min_entangled_qubits=min_entangled,
        min_partiteness=min_partite,
        two_setting_wwzb_excluded=wc <= 1,
        multi_setting_wwzb_violated=wb > 1,
    )
