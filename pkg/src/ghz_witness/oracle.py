"""Brute-force verifiers, built independently of the main evaluation paths.

Everything here works on explicit ``2**N`` matrices assembled with ``np.kron``
from literal single-qubit matrices: witness operators from the GHZ projectors
themselves, correlators from explicit traces, thermal states from a matrix
exponential.  The only shared code is the optimiser (for W-state scans) and the
functions under test.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from . import pauli
from .errors import CapExceededError
from .frames import CliffordTag, LocalFrame
from .optimize import OptimizerConfig, maximize_w_a, maximize_w_b
from .states import CorrelatorTable, DenseState, RingExcitationState, correlator
from .witness import WitnessCoefficients, lambda_from_table, separable_bound, w_b_fixed_frame

ORACLE_CAP = 8

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_LETTER = {"I": _I, "X": _X, "Y": _Y, "Z": _Z, "x": _X, "y": _Y}


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def pauli_matrix(text: str) -> np.ndarray:
    """Matrix of ``"+XZY"``-style text, or of an x/y string such as ``"xyy"``."""
    sign = 1
    if text[0] in "+-":
        sign, text = (1 if text[0] == "+" else -1), text[1:]
    return sign * kron_all([_LETTER[c] for c in text])


def basis_bits(k: int, n: int) -> str:
    return format(k, f"0{n}b")


def ghz_vector(k: int, n: int, sign: int) -> np.ndarray:
    dim = 1 << n
    v = np.zeros(dim)
    v[k] += 1
    v[k ^ (dim - 1)] += sign
    return v / np.sqrt(2)


def witness_from_projectors(b: np.ndarray) -> np.ndarray:
    """``1/2 sum_k b_k (Q+_k - Q-_k)`` from explicit GHZ projectors."""
    b = np.asarray(b, dtype=float)
    n = b.size.bit_length() - 1
    if n > ORACLE_CAP:
        raise CapExceededError(f"oracle cap is {ORACLE_CAP} qubits")
    w = np.zeros((1 << n, 1 << n))
    for k, bk in enumerate(b):
        if bk:
            gp, gm = ghz_vector(k, n, 1), ghz_vector(k, n, -1)
            w += 0.5 * bk * (np.outer(gp, gp) - np.outer(gm, gm))
    return w


def product_state(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return kron_all([np.array([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)]) for t, p in zip(theta, phi)])


def max_over_product_states(b, restarts: int = 16, seed: int = 0) -> float:
    """Numerical maximum of ``<psi|W|psi>`` over fully separable pure states."""
    b = np.asarray(b.b if isinstance(b, WitnessCoefficients) else b, dtype=float)
    n = b.size.bit_length() - 1
    w = witness_from_projectors(b)
    if not np.any(b):
        return 0.0

    def f(x):
        psi = product_state(x[:n], x[n:])
        return -float((psi.conj() @ w @ psi).real)

    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(restarts):
        x0 = rng.uniform(0, 2 * np.pi, 2 * n)
        res = minimize(f, x0, method="BFGS", options={"gtol": 1e-10})
        res = minimize(f, res.x, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        best = max(best, -res.fun)
    return float(best)


def explicit_correlator(rho: np.ndarray, l: str, unitaries: Sequence[np.ndarray]) -> float:
    """``Tr(U sigma_l U^dagger rho)`` by full matrix products."""
    u = kron_all(unitaries)
    return float(np.trace(u @ pauli_matrix(l) @ u.conj().T @ rho).real)


def explicit_table(rho: np.ndarray, unitaries: Sequence[np.ndarray]) -> dict[str, float]:
    n = len(unitaries)
    out = {}
    for mask in range(1 << n):
        l = basis_bits(mask, n).replace("0", "x").replace("1", "y")
        if l.count("y") % 2 == 0:
            out[l] = explicit_correlator(rho, l, unitaries)
    return out


def explicit_lambda(table: dict[str, float], n: int) -> np.ndarray:
    """Double sum ``sum_l (-1)**(k.l) cos(pi |l|/2) T_l`` term by term."""
    lam = np.zeros(1 << n)
    for k in range(1 << n):
        kb = basis_bits(k, n)
        for l, t in table.items():
            dot = sum(1 for a, c in zip(kb, l) if a == "1" and c == "y")
            lam[k] += (-1) ** dot * np.cos(np.pi * l.count("y") / 2) * t
    return lam


def explicit_w_a(rho: np.ndarray, unitaries: Sequence[np.ndarray]) -> float:
    """max over k and sign of ``Tr(W rho_f)`` with the single-k witness from projectors."""
    n = len(unitaries)
    u = kron_all(unitaries)
    rho_f = u.conj().T @ rho @ u
    best = 0.0
    for k in range(1 << (n - 1)):
        b = np.zeros(1 << n)
        b[k] = 1 << n
        best = max(best, abs(np.trace(witness_from_projectors(b) @ rho_f).real))
    return best


def thermal_stabilizer_matrix(generators: Sequence[str], beta: float) -> np.ndarray:
    """``exp(-beta H) / Z`` for ``H = -1/2 sum K_n`` by matrix exponential."""
    h = -0.5 * sum(pauli_matrix(g) for g in generators)
    rho = expm(-beta * h)
    return rho / np.trace(rho).real


def partial_trace_keep(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    n = rho.shape[0].bit_length() - 1
    keep = list(keep)
    drop = [j for j in range(n) if j not in keep]
    t = rho.reshape((2,) * (2 * n))
    t = np.transpose(t, keep + drop + [n + j for j in keep] + [n + j for j in drop])
    dk, dd = 1 << len(keep), 1 << len(drop)
    return np.einsum("adbd->ab", t.reshape(dk, dd, dk, dd))


def wishart_state(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitaries(n: int, rng: np.random.Generator) -> list[np.ndarray]:
    from .frames import su2_from_euler

    return [su2_from_euler(*rng.uniform(0, 2 * np.pi, 3)) for _ in range(n)]


def w_state(m: int) -> np.ndarray:
    v = np.zeros(1 << m)
    v[[1 << j for j in range(m)]] = 1
    return v / np.sqrt(m)


@dataclass
class WScanResult:
    estimate: int
    full_value: float
    values: list[float]
    positions: list[int]
    low_confidence: bool


CHANGE_THRESHOLD = 0.05
# the scan only has to separate values that differ by at least one
SCAN_CONFIG = OptimizerConfig(restarts=3, tolerance=1e-7, x_tolerance=1e-4, clifford_prescan=False)


def w_state_scan(
    m: int, n: int, seed: int = 0, config: OptimizerConfig | None = None
) -> WScanResult:
    """Recover the size of a hidden W state by leave-one-out W_A evaluations.

    The N-qubit state is an M-qubit W state on randomly chosen qubits with
    every other qubit in |0>.  W_A is maximised once on the full state; then
    each qubit is traced out in turn and W_A of the remaining N-1 qubits is
    re-maximised from the inherited frame.  A |0> qubit is a product factor
    and leaves the value unchanged, while removing a W qubit lowers it by at
    least one, so the number of changed values is M.  ``values[j]`` is the
    value with qubit ``j`` removed.
    """
    if not 2 <= m <= n <= ORACLE_CAP:
        raise ValueError("need 2 <= M <= N <= 8")
    config = config or SCAN_CONFIG
    rng = np.random.default_rng(seed)
    positions = sorted(int(p) for p in rng.choice(n, size=m, replace=False))
    psi = np.zeros(1 << n)
    for p in positions:
        psi[1 << (n - 1 - p)] = 1 / np.sqrt(m)
    rho = np.outer(psi, psi)

    full = maximize_w_a(DenseState(rho, cap=ORACLE_CAP), config)
    angles = full.frame.to_angles()
    refine = replace(config, restarts=1)
    values = []
    changes = 0
    ambiguous = False
    for j in range(n):
        keep = [i for i in range(n) if i != j]
        reduced = DenseState(partial_trace_keep(rho, keep), cap=ORACLE_CAP)
        # the inherited frame can be off by phases that the removed qubit absorbed
        warm = LocalFrame.from_angles(angles[keep])
        value = float(maximize_w_a(reduced, refine, initial_frame=warm).value)
        values.append(value)
        delta = abs(value - full.value)
        if delta > CHANGE_THRESHOLD:
            changes += 1
        elif delta > 1e-4:
            ambiguous = True
    return WScanResult(changes, full.value, values, positions, ambiguous)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    count: int


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"{'check':<{width}}  result  max_deviation  cases"]
        for c in self.checks:
            lines.append(
                f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.max_deviation:13.3e}  {c.count:5d}"
            )
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def check_phase_relation(n: int, rng: np.random.Generator, samples: int | None = None) -> CheckResult:
    """``sigma_l |k> = (-1)**(k.l) i**|l| |k'>`` against explicit matrix action."""
    masks = range(1 << n) if samples is None else rng.integers(0, 1 << n, size=samples)
    worst, count = 0.0, 0
    for mask in masks:
        l = pauli.XYString(n, int(mask))
        mat = pauli_matrix(str(l))
        for k in range(1 << n):
            phase, kp = pauli.apply_to_basis_state(l, k)
            e = np.zeros(1 << n)
            e[k] = 1
            expected = np.zeros(1 << n, dtype=complex)
            expected[kp] = 1j**phase
            predicted = (-1) ** bin(k & int(mask)).count("1") * 1j ** l.y_count
            worst = max(worst, np.abs(mat @ e - expected).max(), abs(1j**phase - predicted))
            count += 1
    return CheckResult(f"phase relation N={n}", worst <= 1e-12, float(worst), count)


def check_parseval(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        vals = rng.uniform(-1, 1, 1 << n)
        vals[np.bitwise_count(np.arange(1 << n, dtype=np.uint64)) % 2 == 1] = 0
        table = CorrelatorTable(n, vals)
        lam = lambda_from_table(table).values
        worst = max(worst, abs(np.dot(lam, lam) - (1 << n) * np.dot(vals, vals)))
    return CheckResult(f"Parseval N={n}", worst <= tol, float(worst), trials)


def check_lambda_bound(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-9) -> CheckResult:
    """``sum |lambda| <= 2**N`` on random full-rank states at random frames."""
    worst = -np.inf
    for _ in range(trials):
        rho = wishart_state(n, rng)
        lam = explicit_lambda(explicit_table(rho, random_unitaries(n, rng)), n)
        worst = max(worst, np.abs(lam).sum() - (1 << n))
    return CheckResult(f"sum|lambda| <= 2^N N={n}", worst <= tol, float(max(worst, 0.0)), trials)


def check_correlators(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-10) -> CheckResult:
    """Main-path correlators against explicit traces on random states and frames."""
    worst = 0.0
    for _ in range(trials):
        rho = wishart_state(n, rng)
        angles = rng.uniform(0, 2 * np.pi, (n, 3))
        frame = LocalFrame.from_angles(angles)
        state = DenseState(rho)
        oracle = explicit_table(rho, frame.unitaries())
        for l, t in oracle.items():
            worst = max(worst, abs(correlator(state, l, frame) - t))
    return CheckResult(f"correlators N={n}", worst <= tol, float(worst), trials)


def check_separable_soundness(n: int, trials: int, rng: np.random.Generator, tol: float = 1e-9) -> CheckResult:
    worst = -np.inf
    for _ in range(trials):
        b = rng.normal(size=1 << n)
        b *= (1 << n) / np.abs(b).sum()
        coeffs = WitnessCoefficients(n, b)
        worst = max(worst, max_over_product_states(coeffs, restarts=4, seed=int(rng.integers(1 << 31))) - separable_bound(coeffs))
    return CheckResult(f"separable soundness N={n}", worst <= tol, float(max(worst, 0.0)), trials)


def verify_appendix_identities(n: int, trials: int = 20, seed: int = 0, tol: float = 1e-10) -> VerifyReport:
    """Phase relation, Parseval identity and the lambda bound on ``n`` qubits."""
    if n > 6:
        raise ValueError("appendix checks are limited to N <= 6")
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    report.checks.append(check_phase_relation(n, rng, None if n <= 4 else 8))
    report.checks.append(check_parseval(n, trials, rng, tol))
    report.checks.append(check_lambda_bound(n, trials, rng, tol))
    return report


def default_verification(seed: int = 0, tol: float = 1e-10) -> VerifyReport:
    """The suite run by ``ghz-witness verify``."""
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    for n in range(1, 5):
        report.checks.append(check_phase_relation(n, rng))
    for n in (5, 6):
        report.checks.append(check_phase_relation(n, rng, samples=8))
    for n in (2, 3, 4):
        report.checks.append(check_parseval(n, 50, rng, tol))
        report.checks.append(check_lambda_bound(n, 10, rng, tol))
        report.checks.append(check_correlators(n, 3, rng, tol))
    for n in (1, 2, 3):
        report.checks.append(check_separable_soundness(n, 3, rng, tol))
    report.checks.append(check_closed_forms(tol=max(tol, 1e-8)))
    return report


def check_closed_forms(tol: float = 1e-8) -> CheckResult:
    """GHZ (N=3..5) and cluster (N=3, 6) closed forms against expm thermal states."""
    from .models import cluster_closed_form, ghz_closed_form

    worst, count = 0.0, 0
    cases = [("ghz", n) for n in (3, 4, 5)] + [("cluster", n) for n in (3, 6)]
    for family, n in cases:
        if family == "ghz":
            gens = ["X" * n] + ["Z" + "I" * (j - 1) + "Z" + "I" * (n - j - 1) for j in range(1, n)]
            tags, closed = [("X", "Y")] * n, ghz_closed_form
        else:
            gens = ["".join({j - 1: "Z", j: "X", j + 1: "Z"}.get(i, "I") for i in range(n)) for j in range(n)]
            tags, closed = _cluster_r0_basis(n), cluster_closed_form
        us = LocalFrame.from_tags([CliffordTag(a, 1, c, 1) for a, c in tags]).unitaries()
        for beta in (0.2, 0.5, 1.0, 2.0, 5.0):
            rho = thermal_stabilizer_matrix(gens, beta)
            wa = explicit_w_a(rho, us)
            wb = sum(t * t for t in explicit_table(rho, us).values())
            worst = max(worst, abs(wa - closed(n, beta, "wa")), abs(wb - closed(n, beta, "wb")))
            count += 1
    return CheckResult("closed forms vs expm", worst <= tol, float(worst), count)


def _cluster_r0_basis(n: int) -> list[tuple[str, str]]:
    """(z,y) at the ends, (x,y) at 1-based positions 3s+2, (z,x) elsewhere."""
    out = []
    for j in range(1, n + 1):
        if j in (1, n):
            out.append(("Z", "Y"))
        elif j % 3 == 2:
            out.append(("X", "Y"))
        else:
            out.append(("Z", "X"))
    return out


def ring_wb_exceeds_one(n: int, beta: float, config: OptimizerConfig | None = None) -> tuple[float, bool]:
    """W_B of the ring state from a frame with z in every measured plane, then refined."""
    if not 3 <= n <= ORACLE_CAP:
        raise ValueError("need 3 <= N <= 8")
    state = RingExcitationState(n, beta)
    start = LocalFrame.from_tags([CliffordTag("Z", 1, "X", 1)] * n)
    value = w_b_fixed_frame(state, start)
    config = config or OptimizerConfig(restarts=1, clifford_prescan=False)
    refined = maximize_w_b(state, config, initial_frame=start)
    value = max(value, refined.value)
    return value, value > 1
