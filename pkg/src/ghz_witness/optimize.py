"""Maximisation of witness values over local frames.

Two search strategies are combined:

* a discrete *Clifford prescan* for stabilizer states, which chooses on every
  qubit an ordered pair of Pauli axes and keeps the best aligned frame.  It is
  a lexicographic depth-first branch and bound over the full-support elements
  of the stabilizer group, so ties resolve to the lexicographically smallest
  tag sequence;
* a continuous multi-start Nelder-Mead search over 3N Euler angles on the
  dense path, seeded from the prescan frame when one exists.

Whatever the search, the reported value is re-evaluated exactly at the
returned frame, so it is always a valid lower bound on the true maximum.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import reduce
from typing import Literal, TextIO

import numpy as np
from scipy.optimize import minimize

from .errors import UnsupportedFrameError
from .frames import AXIS_CODE, CliffordTag, LocalFrame, su2_from_euler
from .states import (
    DEFAULT_DENSE_CAP,
    DenseState,
    RingExcitationState,
    StabilizerThermalState,
    StateBackend,
    antidiagonal,
    fwht,
    rotated_density,
)
from .witness import w_a_fixed_frame, w_b_fixed_frame

Kind = Literal["wa", "wb"]

# lexicographic order of the ordered axis pairs (x-slot, y-slot)
AXIS_PAIRS = [("X", "Y"), ("X", "Z"), ("Y", "X"), ("Y", "Z"), ("Z", "X"), ("Z", "Y")]
TIE_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8  # continuous restarts; 0 keeps only the Clifford prescan
    max_iterations: int = 6000
    tolerance: float = 1e-12
    x_tolerance: float = 1e-10
    seed: int = 0
    clifford_prescan: bool = True
    cap: int = DEFAULT_DENSE_CAP
    node_budget: int = 2_000_000

    def __post_init__(self):
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not (self.tolerance > 0 and self.x_tolerance > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class PrescanResult:
    frame: LocalFrame
    value_wa: float
    value_wb: float
    truncated: bool = False
    nodes: int = 0


@dataclass(frozen=True)
class SearchResult:
    frame: LocalFrame
    value: float
    trace: list[tuple[int, int, float]] = field(default_factory=list)
    prescan: PrescanResult | None = None

    def __iter__(self):
        yield self.frame
        yield self.value

    def write_trace(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["restart", "iterations", "value"])
        for restart, iterations, value in self.trace:
            writer.writerow([restart, iterations, f"{value:.12g}"])


def _leaf_values(n: int, masks: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    table = np.zeros(1 << n)
    table[masks] = vals
    counts = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    lam = fwht(np.array([1.0, 0.0, -1.0, 0.0])[counts % 4] * table)
    return float(np.abs(lam).max()), float(np.dot(vals, vals))


def clifford_prescan(
    state: StabilizerThermalState, objective: Kind = "wa", node_budget: int = 2_000_000
) -> PrescanResult:
    """Best Clifford-aligned frame for a stabilizer thermal state.

    Only full-support group elements whose Pauli on every qubit lies in the
    chosen axis pair contribute an x/y correlator, so the sum of their thermal
    weights (squared for W_B) bounds every completion of a partial frame.
    Axis signs are irrelevant: they only relabel ``k`` and the overall sign.
    """
    if not isinstance(state, StabilizerThermalState):
        raise UnsupportedFrameError("the Clifford prescan needs a stabilizer state")
    if objective not in ("wa", "wb"):
        raise ValueError(f"objective must be 'wa' or 'wb', not {objective!r}")
    n = state.n_qubits
    codes, signs, sizes = state.group
    full = np.all(codes != 0, axis=1)
    codes, signs = codes[full], signs[full]
    weights = state.t ** sizes[full].astype(float)
    bound_w = weights if objective == "wa" else weights**2
    pair_codes = [(AXIS_CODE[a], AXIS_CODE[b]) for a, b in AXIS_PAIRS]
    place = 1 << np.arange(n - 1, -1, -1)

    best = {"value": 0.0, "pairs": None, "wa": 0.0, "wb": 0.0}
    nodes = 0
    truncated = False

    def visit(j: int, alive: np.ndarray, masks: np.ndarray, chosen: list[int]):
        nonlocal nodes, truncated
        if truncated:
            return
        nodes += 1
        if nodes > node_budget:
            truncated = True
            return
        if j == n:
            even = np.bitwise_count(masks.astype(np.uint64)) % 2 == 0
            wa, wb = _leaf_values(n, masks[even], (signs[alive] * weights[alive])[even])
            value = wa if objective == "wa" else wb
            if best["pairs"] is None or value > best["value"] + TIE_TOL * max(1.0, best["value"]):
                best.update(value=value, pairs=list(chosen), wa=wa, wb=wb)
            return
        for p, (cx, cy) in enumerate(pair_codes):
            col = codes[alive, j]
            keep = (col == cx) | (col == cy)
            sub = alive[keep]
            bound = bound_w[sub].sum()
            if best["pairs"] is not None and bound <= best["value"] + TIE_TOL * max(1.0, best["value"]):
                continue
            sub_masks = masks[keep] + np.where(col[keep] == cy, place[j], 0)
            chosen.append(p)
            visit(j + 1, sub, sub_masks, chosen)
            chosen.pop()

    visit(0, np.arange(codes.shape[0]), np.zeros(codes.shape[0], dtype=np.int64), [])
    if best["pairs"] is None:
        best["pairs"] = [0] * n
    tags = tuple(CliffordTag(AXIS_PAIRS[p][0], 1, AXIS_PAIRS[p][1], 1) for p in best["pairs"])
    return PrescanResult(LocalFrame(tags=tags), best["wa"], best["wb"], truncated, nodes)


def _objective(matrix: np.ndarray, n: int, kind: Kind):
    dim = 1 << n

    def unitaries(x):
        return [su2_from_euler(*x[3 * j : 3 * j + 3]) for j in range(n)]

    if kind == "wb":

        def f(x):
            anti = antidiagonal(rotated_density(matrix, unitaries(x))).real
            return -dim * float(np.dot(anti, anti))

    else:
        # with full frame freedom the best k can be rotated onto k = 0...0

        def f(x):
            us = unitaries(x)
            a = reduce(np.kron, [u[:, 0] for u in us])
            b = reduce(np.kron, [u[:, 1] for u in us])
            return -dim * abs((a.conj() @ matrix @ b).real)

    return f


def _exact_value(state: StateBackend, frame: LocalFrame, kind: Kind, cap: int) -> float:
    if kind == "wa":
        return w_a_fixed_frame(state, frame, cap)
    return w_b_fixed_frame(state, frame, cap)


def _dense_matrix(state: StateBackend, cap: int) -> np.ndarray | None:
    if isinstance(state, DenseState):
        return state.matrix
    if state.n_qubits > cap:
        return None
    return state.to_dense(cap).matrix


def _maximize(
    state: StateBackend, config: OptimizerConfig, kind: Kind, initial_frame: LocalFrame | None
) -> SearchResult:
    n = state.n_qubits
    candidates: list[tuple[float, int, tuple, LocalFrame]] = []
    prescan = None
    if isinstance(state, StabilizerThermalState) and config.clifford_prescan:
        prescan = clifford_prescan(state, kind, config.node_budget)
        value = _exact_value(state, prescan.frame, kind, config.cap)
        candidates.append((value, 0, (), prescan.frame))

    matrix = _dense_matrix(state, config.cap) if config.restarts else None
    if matrix is None and not candidates:
        raise UnsupportedFrameError(
            f"no search possible for {type(state).__name__} on {n} qubits"
            f" (cap {config.cap}, restarts {config.restarts})"
        )
    trace: list[tuple[int, int, float]] = []
    if matrix is not None:
        f = _objective(matrix, n, kind)
        options = {"maxiter": config.max_iterations, "xatol": config.x_tolerance, "fatol": config.tolerance, "adaptive": True}
        starts = [fr.to_angles().ravel() for fr in (prescan and prescan.frame, initial_frame) if fr]
        for restart in range(config.restarts):
            if restart < len(starts):
                x0 = starts[restart]
            else:
                x0 = np.random.default_rng(config.seed + restart).uniform(0, 2 * np.pi, 3 * n)
            res = minimize(f, x0, method="Nelder-Mead", options=options)
            iterations = res.nit
            # restart the simplex once from its own optimum to undo premature collapse
            res2 = minimize(f, res.x, method="Nelder-Mead", options=options)
            iterations += res2.nit
            x = res2.x if res2.fun <= res.fun else res.x
            frame = LocalFrame.from_angles(np.mod(x, 4 * np.pi).reshape(n, 3))
            value = _exact_value(state, frame, kind, config.cap)
            trace.append((restart, int(iterations), value))
            candidates.append((value, 1, tuple(frame.angles.ravel()), frame))

    top = max(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] >= top - TIE_TOL * max(1.0, abs(top))]
    value, _, _, frame = min(ties, key=lambda c: (c[1], c[2]))
    return SearchResult(frame, value, trace, prescan)


def maximize_w_b(
    state: StateBackend, config: OptimizerConfig | None = None, initial_frame: LocalFrame | None = None
) -> SearchResult:
    """Best frame found for the sum of squared even correlators.

    ``initial_frame`` seeds one restart (after the prescan frame, if any).
    """
    return _maximize(state, config or OptimizerConfig(), "wb", initial_frame)


def maximize_w_a(
    state: StateBackend, config: OptimizerConfig | None = None, initial_frame: LocalFrame | None = None
) -> SearchResult:
    """Best frame found for ``2**N max_k |Re <k| rho_f |k'>|``."""
    return _maximize(state, config or OptimizerConfig(), "wa", initial_frame)
