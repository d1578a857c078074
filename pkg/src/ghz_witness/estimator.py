"""Scikit-learn style wrapper: learn a witness from one state, score others with it."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DimensionError
from .optimize import OptimizerConfig, maximize_w_a, maximize_w_b
from .states import DEFAULT_DENSE_CAP, full_xy_table
from .validation import check_kind, check_state, check_states
from .witness import (
    StrataReport,
    WitnessCoefficients,
    lambda_from_table,
    strata,
    w_b_value,
)


class GHZWitness(TransformerMixin, BaseEstimator):
    """Optimised GHZ-projector witness.

    ``fit`` searches local frames for the largest witness value on a training
    state and freezes the resulting operator: the frame, and for ``kind="wa"``
    the best index ``k`` with its sign.  ``transform`` then measures other
    states with that fixed operator.

    Parameters
    ----------
    kind : {"wa", "wb"}
        Which value drives the frame search.
    restarts : int
        Continuous Nelder-Mead restarts (0 uses the Clifford prescan only).
    max_iter : int
        Iteration cap per local search.
    tol : float
        Objective tolerance of the local search.
    seed : int
        Base seed; restart ``r`` uses ``seed + r``.
    clifford_prescan : bool
        Seed the search with the best Clifford frame for stabilizer states.
    cap : int
        Largest qubit count for which dense matrices may be built.

    Attributes
    ----------
    frame_ : LocalFrame
    k_ : int
        Index of the single witness term kept by W_A at ``frame_``.
    sign_ : int
    coefficients_ : WitnessCoefficients
    value_wa_, value_wb_ : float
        Values on the training state at ``frame_``.
    report_ : StrataReport
    n_qubits_ : int
    """

    def __init__(
        self,
        kind: str = "wa",
        restarts: int = 8,
        max_iter: int = 6000,
        tol: float = 1e-12,
        seed: int = 0,
        clifford_prescan: bool = True,
        cap: int = DEFAULT_DENSE_CAP,
    ):
        self.kind = kind
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.clifford_prescan = clifford_prescan
        self.cap = cap

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(
            restarts=self.restarts,
            max_iterations=self.max_iter,
            tolerance=self.tol,
            seed=self.seed,
            clifford_prescan=self.clifford_prescan,
            cap=self.cap,
        )

    def fit(self, X, y=None):
        """Search frames on the state ``X``; ``y`` is ignored."""
        kind = check_kind(self.kind)
        state = check_state(X, self.cap)
        search = maximize_w_a if kind == "wa" else maximize_w_b
        result = search(state, self._config())
        table = full_xy_table(state, result.frame, self.cap)
        lam = lambda_from_table(table)
        k, value = lam.best()
        self.frame_ = result.frame
        self.k_ = k
        self.sign_ = 1 if value >= 0 else -1
        self.coefficients_ = WitnessCoefficients.single(state.n_qubits, k, self.sign_)
        self.value_wa_ = abs(value)
        self.value_wb_ = w_b_value(table)
        self.report_ = strata(self.value_wa_, state.n_qubits, value_wb=self.value_wb_)
        self.n_qubits_ = state.n_qubits
        return self

    def transform(self, X) -> np.ndarray:
        """Rows ``[Tr(W_A rho), W_B, W_C]`` at the fitted frame, one per state.

        The first column uses the frozen single-term operator, so it can be
        negative or smaller than the state's own optimum.
        """
        check_is_fitted(self, "frame_")
        rows = []
        for state in check_states(X, self.cap):
            if state.n_qubits != self.n_qubits_:
                raise DimensionError(f"fitted on {self.n_qubits_} qubits, got {state.n_qubits}")
            table = full_xy_table(state, self.frame_, self.cap)
            wb = w_b_value(table)
            rows.append([self.coefficients_.expectation(lambda_from_table(table)), wb, np.sqrt(wb)])
        return np.array(rows)

    def reports(self, X) -> list[StrataReport]:
        return [strata(max(wa, 0.0), self.n_qubits_, value_wb=wb) for wa, wb, _ in self.transform(X)]

    def predict(self, X) -> np.ndarray:
        """Certified minimum number of entangled qubits (0 when nothing is certified)."""
        return np.array([r.min_entangled_qubits for r in self.reports(X)])

    def score(self, X, y=None) -> float:
        """Mean witness expectation over ``X``."""
        return float(self.transform(X)[:, 0].mean())
