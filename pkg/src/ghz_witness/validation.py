"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .states import (
    DEFAULT_DENSE_CAP,
    DenseState,
    RingExcitationState,
    StabilizerThermalState,
    StateBackend,
)

_BACKENDS = (StabilizerThermalState, DenseState, RingExcitationState)


def check_state(state, cap: int = DEFAULT_DENSE_CAP) -> StateBackend:
    """Return a state backend for ``state``.

    Backends pass through unchanged.  A 2-d array is read as a density
    matrix and a 1-d array as a pure state vector; both are validated.
    """
    if isinstance(state, _BACKENDS):
        return state
    arr = np.asarray(state)
    if arr.ndim == 1:
        if not np.isfinite(arr).all() or not np.any(arr):
            raise ValueError("state vector must be finite and non-zero")
        return DenseState.from_vector(arr, cap=cap)
    if arr.ndim == 2:
        if not np.isfinite(arr).all():
            raise ValueError("density matrix contains non-finite entries")
        return DenseState(arr, cap=cap)
    raise TypeError(f"cannot interpret {type(state).__name__} with shape {arr.shape} as a state")


def check_states(states, cap: int = DEFAULT_DENSE_CAP) -> list[StateBackend]:
    """Validate one state or a sequence of states; all must share a qubit count."""
    if isinstance(states, _BACKENDS) or (isinstance(states, np.ndarray) and states.ndim <= 2):
        states = [states]
    out = [check_state(s, cap) for s in _as_list(states)]
    if not out:
        raise ValueError("no states given")
    sizes = {s.n_qubits for s in out}
    if len(sizes) > 1:
        raise ValueError(f"states have different qubit counts: {sorted(sizes)}")
    return out


def _as_list(states) -> list:
    if isinstance(states, Iterable):
        return list(states)
    raise TypeError(f"expected a state or a sequence of states, got {type(states).__name__}")


def check_kind(kind: str) -> str:
    if kind not in ("wa", "wb"):
        raise ValueError(f"kind must be 'wa' or 'wb', not {kind!r}")
    return kind
