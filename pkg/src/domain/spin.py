"""
Spin-1/2 states and observables in the sigma_z basis.
"""

import math
from dataclasses import dataclass
from typing import Any, List, Mapping, Sequence, Tuple

import numpy as np

from ..config.settings import (HERMITIAN_ATOL, NORMALIZATION_ATOL,
                               ORTHOGONALITY_THRESHOLD)
from .errors import ConfigError, OrthogonalSelection


@dataclass(frozen=True)
class Spinor:
    up: complex
    down: complex

    def __post_init__(self):
        object.__setattr__(self, "up", complex(self.up))
        object.__setattr__(self, "down", complex(self.down))
        norm = abs(self.up) ** 2 + abs(self.down) ** 2
        if abs(norm - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"spinor is not normalized (|up|^2 + |down|^2 = {norm!r})")

    @classmethod
    def from_vector(cls, vec: Sequence[complex], normalize: bool = True) -> "Spinor":
        v = np.asarray(vec, dtype=complex).reshape(2)
        if normalize:
            length = np.linalg.norm(v)
            if length == 0:
                raise ValueError("cannot normalize the zero vector")
            v = v / length
        return cls(complex(v[0]), complex(v[1]))

    def as_vector(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)

    def inner(self, other: "Spinor") -> complex:
        """<self|other>"""
        return self.up.conjugate() * other.up + self.down.conjugate() * other.down


@dataclass(frozen=True, eq=False)
class SpinOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"spin operator must be 2x2, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=HERMITIAN_ATOL, rtol=0.0):
            raise ValueError("spin operator must be Hermitian")
        object.__setattr__(self, "matrix", m)

    def apply(self, chi: Spinor) -> np.ndarray:
        return self.matrix @ chi.as_vector()

    def matrix_element(self, bra: Spinor, ket: Spinor) -> complex:
        return complex(bra.as_vector().conj() @ self.matrix @ ket.as_vector())

    def power(self, n: int) -> "SpinOperator":
        return SpinOperator(np.linalg.matrix_power(self.matrix, n))

    def eigenbasis(self) -> List[Tuple[float, Spinor]]:
        """(eigenvalue, eigenvector) pairs, largest eigenvalue first, canonical phase."""
        values, vectors = np.linalg.eigh(self.matrix)
        basis = []
        for idx in np.argsort(values)[::-1]:
            basis.append((float(values[idx]), _canonical_phase(vectors[:, idx])))
        return basis


def _canonical_phase(vec: np.ndarray) -> Spinor:
    # first non-negligible component real and positive
    for component in vec:
        if abs(component) > 1e-9:
            vec = vec * (abs(component) / component)
            break
    return Spinor.from_vector(vec)


SIGMA_X = SpinOperator(np.array([[0, 1], [1, 0]], dtype=complex))
SIGMA_Y = SpinOperator(np.array([[0, -1j], [1j, 0]], dtype=complex))
SIGMA_Z = SpinOperator(np.array([[1, 0], [0, -1]], dtype=complex))

UP_Z = Spinor(1.0, 0.0)
DOWN_Z = Spinor(0.0, 1.0)
UP_X = Spinor(1 / math.sqrt(2), 1 / math.sqrt(2))
DOWN_X = Spinor(1 / math.sqrt(2), -1 / math.sqrt(2))


def sigma_n(theta: float, phi: float = 0.0) -> SpinOperator:
    """Pauli operator along the Bloch direction (theta, phi)."""
    n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    return SpinOperator(n[0] * SIGMA_X.matrix + n[1] * SIGMA_Y.matrix + n[2] * SIGMA_Z.matrix)


def bloch_state(theta: float, phi: float = 0.0) -> Spinor:
    """(cos theta/2, e^{i phi} sin theta/2)"""
    return Spinor(math.cos(theta / 2),
                  complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2))


def orthogonal(chi: Spinor) -> Spinor:
    """The state orthogonal to chi, (-conj(down), conj(up))."""
    return Spinor(-chi.down.conjugate(), chi.up.conjugate())


def alpha_beta(theta: float) -> Tuple[complex, complex]:
    """Coefficients of |up_theta> on |up_x>, |down_x>."""
    chi = bloch_state(theta)
    return UP_X.inner(chi), DOWN_X.inner(chi)


def postselect_prob(chi_in: Spinor, chi_f: Spinor) -> float:
    return min(abs(chi_f.inner(chi_in)) ** 2, 1.0)


def weak_value(chi_in: Spinor, chi_f: Spinor, A: SpinOperator) -> complex:
    """<chi_f|A|chi_in> / <chi_f|chi_in>"""
    overlap = chi_f.inner(chi_in)
    if abs(overlap) <= ORTHOGONALITY_THRESHOLD:
        raise OrthogonalSelection(abs(overlap))
    return A.matrix_element(chi_f, chi_in) / overlap


def parse_spinor(value: Any, field: str = "spinor") -> Spinor:
    """
    Accepts {"theta_deg": .., "phi_deg": ..} Bloch angles or an explicit
    pair {"up": [re, im], "down": [re, im]}; explicit pairs are normalized.
    """
    if not isinstance(value, Mapping):
        raise ConfigError("expected an object with Bloch angles or an explicit pair",
                          field=field)
    if "theta_deg" in value:
        try:
            theta = math.radians(float(value["theta_deg"]))
            phi = math.radians(float(value.get("phi_deg", 0.0)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid Bloch angle: {e}", field=field)
        return bloch_state(theta, phi)
    if "up" in value and "down" in value:
        try:
            up = _parse_complex(value["up"])
            down = _parse_complex(value["down"])
            return Spinor.from_vector([up, down])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid spinor components: {e}", field=field)
    raise ConfigError("needs 'theta_deg' or both 'up' and 'down'", field=field)


def _parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have 2 entries, got {len(value)}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def inner(bra: Spinor, ket: Spinor) -> complex:
    return bra.inner(ket)


def sigma(axis) -> SpinOperator:
    """Pauli operator for an axis name ('x', 'y', 'z') or Bloch angles (theta, phi)."""
    if isinstance(axis, str):
        named = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
        try:
            return named[axis.lower()]
        except KeyError:
            raise ValueError(f"unknown spin axis {axis!r}")
    theta, phi = axis
    return sigma_n(theta, phi)


def eigenbasis(op: SpinOperator) -> List[Tuple[float, Spinor]]:
    return op.eigenbasis()
