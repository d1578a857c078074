"""Local measurement frames: one SU(2) rotation per qubit.

A frame ``U = U_1 (x) ... (x) U_N`` fixes, on each qubit, the two measured spin
directions ``O x`` and ``O y`` where ``U sigma_v U^dagger = (O v).sigma``.  A
frame is stored either as ZYZ Euler angles or as a discrete Clifford tag per
qubit naming the signed Pauli axes measured in the x- and y-slots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

_AXES = "XYZ"
_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# per-qubit code shared with pauli.group_table: 1=X, 2=Z, 3=Y
AXIS_CODE = {"X": 1, "Z": 2, "Y": 3}


class CliffordTag(NamedTuple):
    """Signed Pauli axes measured in the x-slot and y-slot of one qubit."""

    x_axis: str
    x_sign: int
    y_axis: str
    y_sign: int

    @classmethod
    def parse(cls, text: str) -> "CliffordTag":
        text = text.strip().upper()
        if len(text) != 4 or text[0] not in "+-" or text[2] not in "+-":
            raise ValueError(f"invalid Clifford tag {text!r}; expected e.g. '+X+Y'")
        tag = cls(text[1], 1 if text[0] == "+" else -1, text[3], 1 if text[2] == "+" else -1)
        tag.validate()
        return tag

    def validate(self) -> None:
        if self.x_axis not in _AXES or self.y_axis not in _AXES or self.x_axis == self.y_axis:
            raise ValueError(f"invalid axis pair {self.x_axis}/{self.y_axis}")
        if self.x_sign not in (1, -1) or self.y_sign not in (1, -1):
            raise ValueError("axis signs must be +1 or -1")

    def __str__(self) -> str:
        s = lambda v: "+" if v > 0 else "-"  # noqa: E731
        return f"{s(self.x_sign)}{self.x_axis}{s(self.y_sign)}{self.y_axis}"

    def rotation(self) -> np.ndarray:
        u = self.x_sign * np.eye(3)[_AXES.index(self.x_axis)]
        v = self.y_sign * np.eye(3)[_AXES.index(self.y_axis)]
        return np.column_stack([u, v, np.cross(u, v)])


ALIGNED = CliffordTag("X", 1, "Y", 1)


def su2_from_euler(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """``Rz(alpha) Ry(beta) Rz(gamma)`` with ``Rz(t) = exp(-i t Z / 2)``."""
    ea, eg = np.exp(-0.5j * alpha), np.exp(-0.5j * gamma)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    return np.array([[ea * eg * c, -ea * np.conj(eg) * s], [np.conj(ea) * eg * s, np.conj(ea * eg) * c]])


def euler_from_su2(u: np.ndarray) -> np.ndarray:
    """Inverse of :func:`su2_from_euler` up to the global sign of ``u``."""
    beta = 2 * np.arctan2(abs(u[1, 0]), abs(u[0, 0]))
    # at beta = 0 or pi only one of alpha +/- gamma is defined; pin the other to 0
    plus = -2 * np.angle(u[0, 0]) if abs(u[0, 0]) > 1e-12 else 0.0
    minus = 2 * np.angle(u[1, 0]) if abs(u[1, 0]) > 1e-12 else 0.0
    return np.array([(plus + minus) / 2, beta, (plus - minus) / 2])


def su2_from_rotation(o: np.ndarray) -> np.ndarray:
    rotvec = Rotation.from_matrix(o).as_rotvec()
    theta = np.linalg.norm(rotvec)
    if theta < 1e-15:
        return np.eye(2, dtype=complex)
    n = rotvec / theta
    gen = n[0] * _PAULI["X"] + n[1] * _PAULI["Y"] + n[2] * _PAULI["Z"]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * gen


def rotation_from_su2(u: np.ndarray) -> np.ndarray:
    """The orthogonal matrix O with ``u sigma_j u^dagger = sum_i O_ij sigma_i``."""
    paulis = [_PAULI[a] for a in _AXES]
    return np.array([[0.5 * np.trace(pi @ u @ pj @ u.conj().T).real for pj in paulis] for pi in paulis])


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Product of per-qubit rotations, given by Euler angles or Clifford tags."""

    angles: np.ndarray | None = None
    tags: tuple[CliffordTag, ...] | None = None

    def __post_init__(self):
        if (self.angles is None) == (self.tags is None):
            raise ValueError("give exactly one of angles or tags")
        if self.angles is not None:
            a = np.array(self.angles, dtype=float).reshape(-1, 3)
            a.setflags(write=False)
            object.__setattr__(self, "angles", a)
        else:
            for t in self.tags:
                t.validate()

    @classmethod
    def from_angles(cls, angles) -> "LocalFrame":
        return cls(angles=np.asarray(angles, dtype=float))

    @classmethod
    def from_tags(cls, tags: Sequence[CliffordTag | str]) -> "LocalFrame":
        return cls(tags=tuple(t if isinstance(t, CliffordTag) else CliffordTag.parse(t) for t in tags))

    @classmethod
    def aligned(cls, n_qubits: int) -> "LocalFrame":
        """Measure sigma_x and sigma_y on every qubit (the identity frame)."""
        return cls(tags=(ALIGNED,) * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.tags) if self.tags is not None else self.angles.shape[0]

    @property
    def is_clifford(self) -> bool:
        return self.tags is not None

    def unitaries(self) -> list[np.ndarray]:
        if self.tags is not None:
            return [su2_from_rotation(t.rotation()) for t in self.tags]
        return [su2_from_euler(*row) for row in self.angles]

    def rotations(self) -> list[np.ndarray]:
        if self.tags is not None:
            return [t.rotation() for t in self.tags]
        return [rotation_from_su2(u) for u in self.unitaries()]

    def to_angles(self) -> np.ndarray:
        if self.angles is not None:
            return np.array(self.angles)
        return np.array([euler_from_su2(u) for u in self.unitaries()])

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, self.unitaries())

    def describe(self) -> str:
        if self.tags is not None:
            return " ".join(str(t) for t in self.tags)
        return " ".join("({:.6f},{:.6f},{:.6f})".format(*row) for row in self.angles)

    def __eq__(self, other):
        if not isinstance(other, LocalFrame):
            return NotImplemented
        if self.tags is not None or other.tags is not None:
            return self.tags == other.tags
        return np.array_equal(self.angles, other.angles)

    def __hash__(self):
        return hash(self.tags if self.tags is not None else self.angles.tobytes())
