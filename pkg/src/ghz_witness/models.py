"""GHZ and 1D cluster stabilizer models, closed-form witness values, critical temperatures.

Closed forms are written in ``u``, where ``u = tanh(beta/2)`` for W_A and
``u = tanh(beta/2)**2`` for W_B (every correlator is a power of the thermal
factor, and W_B squares them).

For the cluster chain with ``N = 3m + 2r`` the W_A value factors as::

    u**(m+r) (1+u^2)**(m+r-1) (1+u)**(2-r)
        = [u (1+u^2)]**(m+r) * (1+u)**(2-r) / (1+u^2)

so as ``m -> inf`` the per-cell factor ``u (1 + u^2)`` decides whether the
value grows without bound or decays to zero; the critical point of the long
chain is the real root of ``u**3 + u - 1 = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import numpy as np
from scipy.optimize import bisect

from .errors import ModelError, NoRootError
from .pauli import PauliString
from .states import StabilizerThermalState, tanh_half

Kind = Literal["wa", "wb"]

BETA_ABSOLUTE_TOL = 1e-9


def _pauli(n: int, ops: dict[int, str]) -> PauliString:
    return PauliString.from_str("".join(ops.get(j, "I") for j in range(n)))


def ghz_generators(n: int) -> list[PauliString]:
    """``X...X`` and ``Z_1 Z_n`` for n = 2..N; the ground state is the GHZ state."""
    if n < 2:
        raise ModelError("the GHZ model needs at least 2 qubits")
    return [PauliString.from_str("X" * n)] + [_pauli(n, {0: "Z", j: "Z"}) for j in range(1, n)]


def cluster_generators(n: int) -> list[PauliString]:
    """Open-chain cluster stabilizers ``Z_{n-1} X_n Z_{n+1}`` (truncated at the ends)."""
    if n < 2:
        raise ModelError("the cluster model needs at least 2 qubits")
    gens = []
    for j in range(n):
        ops = {j: "X"}
        if j > 0:
            ops[j - 1] = "Z"
        if j < n - 1:
            ops[j + 1] = "Z"
        gens.append(_pauli(n, ops))
    return gens


def ghz_state(n: int, beta: float) -> StabilizerThermalState:
    return StabilizerThermalState(tuple(ghz_generators(n)), beta)


def cluster_state(n: int, beta: float) -> StabilizerThermalState:
    return StabilizerThermalState(tuple(cluster_generators(n)), beta)


@dataclass(frozen=True)
class ClusterShape:
    """Chain length decomposed as ``N = 3m + 2r`` with ``r`` in {0, 1, 2}."""

    n_qubits: int
    m: int
    r: int

    @classmethod
    def of(cls, n: int) -> "ClusterShape":
        if n < 2:
            raise ModelError("chain length must be at least 2")
        r = (2 * (n % 3)) % 3
        return cls(n, (n - 2 * r) // 3, r)

    @property
    def min_product_size(self) -> int:
        return self.m + self.r


def _u(beta: float, kind: Kind) -> float:
    t = tanh_half(beta)
    if kind == "wa":
        return t
    if kind == "wb":
        return t * t
    raise ValueError(f"kind must be 'wa' or 'wb', not {kind!r}")


def ghz_closed_form(n: int, beta: float, kind: Kind = "wa") -> float:
    if n < 2:
        raise ModelError("the GHZ model needs at least 2 qubits")
    u = _u(beta, kind)
    return u * (1 + u) ** (n - 1)


def cluster_closed_form(n: int, beta: float, kind: Kind = "wa") -> float:
    shape = ClusterShape.of(n)
    if shape.m == 0 and shape.r == 1:
        # two distinct minimal products; the formula does not cover it
        raise ModelError("the N=2 cluster chain is a special case with no closed form here")
    u = _u(beta, kind)
    p = shape.m + shape.r
    return u**p * (1 + u * u) ** (p - 1) * (1 + u) ** (2 - shape.r)


def cluster_limit_value(beta: float, kind: Kind = "wa") -> float:
    """Per-cell growth factor ``u (1 + u^2)`` of a long cluster chain."""
    u = _u(beta, kind)
    return u * (1 + u * u)


@dataclass(frozen=True)
class Model:
    """A named model whose witness value is a closed form in beta."""

    name: str
    value: Callable[[float, Kind], float]


def parse_model(spec: str) -> Model:
    """``ghz:N``, ``cluster:N`` or ``cluster-limit``."""
    spec = spec.strip().lower()
    if spec == "cluster-limit":
        return Model(spec, cluster_limit_value)
    family, _, size = spec.partition(":")
    try:
        n = int(size)
    except ValueError:
        raise ValueError(f"unrecognised model {spec!r}") from None
    if family == "ghz":
        ghz_closed_form(n, 0.0)
        return Model(spec, lambda b, k: ghz_closed_form(n, b, k))
    if family == "cluster":
        cluster_closed_form(n, 0.0)
        return Model(spec, lambda b, k: cluster_closed_form(n, b, k))
    raise ValueError(f"unrecognised model {spec!r}")


def critical_beta(model: Model | str, kind: Kind = "wa", threshold: float = 1.0) -> float:
    """Inverse temperature at which the closed form crosses ``threshold``."""
    if isinstance(model, str):
        model = parse_model(model)
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    f = lambda b: model.value(b, kind) - threshold  # noqa: E731
    top = model.value(np.inf, kind)
    if top <= threshold:
        raise NoRootError(f"{model.name} {kind} saturates at {top:.6g} <= {threshold:g}")
    if f(0.0) >= 0:
        return 0.0
    hi = 1.0
    while f(hi) <= 0:
        hi *= 2
        if hi > 1e4:
            raise NoRootError(f"{model.name} {kind} does not reach {threshold:g}")
    grid = np.linspace(0.0, hi, 65)
    if np.any(np.diff([model.value(b, kind) for b in grid]) < 0):
        raise ValueError(f"{model.name} {kind} is not increasing in beta")
    return float(bisect(f, 0.0, hi, xtol=BETA_ABSOLUTE_TOL, maxiter=200))


def ghz_critical_scaling(sizes: Iterable[int], kind: Kind = "wa") -> list[tuple[int, float]]:
    return [(n, critical_beta(f"ghz:{n}", kind)) for n in sizes]


def scaling_exponent(points: list[tuple[int, float]]) -> float:
    """Least-squares slope of log(tanh(beta_crit/2)) against log(N)."""
    ns = np.log([n for n, _ in points])
    ts = np.log([tanh_half(b) for _, b in points])
    return float(np.polyfit(ns, ts, 1)[0])
