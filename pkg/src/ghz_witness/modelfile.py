"""Model identifiers and INI model files.

A model file has one ``[model]`` section::

    [model]
    kind = stabilizer          ; stabilizer | ghz | cluster | ring | dense
    generators = XXX, ZZI, ZIZ ; stabilizer only
    n = 5                      ; ghz, cluster, ring
    matrix = rho.npy           ; dense only, relative to the file
    beta = 1.0                 ; optional default for --beta

``matrix`` must hold a density matrix or a state vector.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ModelError
from .models import cluster_state, ghz_state
from .states import DEFAULT_DENSE_CAP, RingExcitationState, StabilizerThermalState, StateBackend
from .validation import check_state

KINDS = ("stabilizer", "ghz", "cluster", "ring", "dense")


@dataclass(frozen=True)
class ModelSource:
    """A named family of states indexed by beta.

    ``closed_form`` names the closed-form model when one exists (``ghz:N`` or
    ``cluster:N``); ``beta_dependent`` is false for dense models.
    """

    name: str
    build: Callable[[float], StateBackend]
    closed_form: str | None = None
    default_beta: float | None = None
    beta_dependent: bool = True

    def state(self, beta: float | None) -> StateBackend:
        if beta is None:
            beta = self.default_beta
        if beta is None:
            if self.beta_dependent:
                raise ModelError(f"model {self.name} needs a beta")
            beta = 0.0
        if beta < 0:
            raise ValueError("beta must be non-negative")
        return self.build(beta)


def _size(text: str, family: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ModelError(f"{family} needs an integer size, got {text!r}") from None


def family_source(family: str, n: int, default_beta: float | None = None, name: str | None = None) -> ModelSource:
    name = name or f"{family}:{n}"
    if family == "ghz":
        ghz_state(n, 0.0)
        return ModelSource(name, lambda b: ghz_state(n, b), f"ghz:{n}", default_beta)
    if family == "cluster":
        cluster_state(n, 0.0)
        return ModelSource(name, lambda b: cluster_state(n, b), f"cluster:{n}" if n > 2 else None, default_beta)
    if family == "ring":
        RingExcitationState(n, 0.0)
        return ModelSource(name, lambda b: RingExcitationState(n, b), None, default_beta)
    raise ModelError(f"unknown model family {family!r}")


def parse_source(spec: str, cap: int = DEFAULT_DENSE_CAP) -> ModelSource:
    """``ghz:N``, ``cluster:N``, ``ring:N`` or ``file:<path>``."""
    spec = spec.strip()
    family, sep, rest = spec.partition(":")
    if not sep:
        raise ModelError(f"unrecognised model {spec!r}")
    if family == "file":
        return load_model(rest, cap)
    return family_source(family.lower(), _size(rest, family), name=spec.lower())


def load_model(path: str | Path, cap: int = DEFAULT_DENSE_CAP) -> ModelSource:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not parser.read(path):
        raise FileNotFoundError(f"cannot read model file {path}")
    if not parser.has_section("model"):
        raise ModelError(f"{path}: missing [model] section")
    sec = parser["model"]
    kind = sec.get("kind", "").strip().lower()
    if kind not in KINDS:
        raise ModelError(f"{path}: kind must be one of {', '.join(KINDS)}")
    default_beta = sec.getfloat("beta") if "beta" in sec else None
    name = f"file:{path}"
    if kind == "stabilizer":
        gens = tuple(g.strip() for g in sec.get("generators", "").split(",") if g.strip())
        StabilizerThermalState(gens, 0.0)
        return ModelSource(name, lambda b: StabilizerThermalState(gens, b), None, default_beta)
    if kind == "dense":
        if "matrix" not in sec:
            raise ModelError(f"{path}: dense models need a matrix entry")
        state = check_state(np.load(path.parent / sec["matrix"]), cap)
        return ModelSource(name, lambda b: state, None, default_beta, beta_dependent=False)
    if "n" not in sec:
        raise ModelError(f"{path}: {kind} models need n")
    return family_source(kind, _size(sec["n"], kind), default_beta, name)
