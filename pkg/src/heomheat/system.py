"""Driven system Hamiltonians, coupling operators and superoperator algebra.

The system is a finite d-level Hamiltonian H(t) = h_static + g (e^{-i W t}
pattern + h.c.) with one Hermitian coupling operator V_k per bath. All
hierarchy and current formulas are evaluated in the Schroedinger picture;
time dependence lives in the propagated state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-12


def _as_readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_hermitian(m: np.ndarray, name: str, tol: float = HERMITICITY_TOL):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian (max deviation {dev:.2e})")


@dataclass(frozen=True)
class Drive:
    """Single-tone periodic drive g (e^{-i frequency t} pattern + h.c.)."""

    amplitude: float
    frequency: float
    pattern: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pattern", _as_readonly(self.pattern))
        if self.frequency <= 0:
            raise ValueError("drive frequency must be positive")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.frequency

    def term_at(self, t: float) -> np.ndarray:
        p = self.amplitude * np.exp(-1j * self.frequency * t) * self.pattern
        return p + p.conj().T

    def derivative_at(self, t: float) -> np.ndarray:
        p = (-1j * self.frequency * self.amplitude
             * np.exp(-1j * self.frequency * t) * self.pattern)
        return p + p.conj().T


@dataclass(frozen=True)
class SystemModel:
    """Static Hamiltonian, optional drive and per-bath coupling operators."""

    h_static: np.ndarray
    couplings: tuple[np.ndarray, ...]
    drive: Drive | None = None

    def __post_init__(self):
        object.__setattr__(self, "h_static", _as_readonly(self.h_static))
        object.__setattr__(
            self, "couplings", tuple(_as_readonly(v) for v in self.couplings))
        _check_hermitian(self.h_static, "h_static")
        d = self.h_static.shape[0]
        for k, v in enumerate(self.couplings):
            _check_hermitian(v, f"coupling V_{k}")
            if v.shape != (d, d):
                raise ValueError(f"coupling V_{k} has shape {v.shape}, "
                                 f"expected {(d, d)}")
        if self.drive is not None and self.drive.pattern.shape != (d, d):
            raise ValueError("drive pattern dimension mismatch")

    @property
    def dim(self) -> int:
        return self.h_static.shape[0]

    @property
    def n_baths(self) -> int:
        return len(self.couplings)


def hamiltonian_at(model: SystemModel, t: float) -> np.ndarray:
    """H(t) = h_static + drive term; Hermitian for all t."""
    if model.drive is None:
        return model.h_static.copy()
    return model.h_static + model.drive.term_at(t)


def power_operator(model: SystemModel, t: float) -> np.ndarray:
    """dH/dt, differentiated analytically (zero without a drive)."""
    if model.drive is None:
        return np.zeros_like(model.h_static)
    return model.drive.derivative_at(t)


def a_operator(model: SystemModel, k: int, t: float) -> np.ndarray:
    """A_k(t) = i [H(t), V_k] (hbar = 1)."""
    h = hamiltonian_at(model, t)
    v = model.couplings[k]
    return 1j * (h @ v - v @ h)


def b_operator(model: SystemModel, k: int, kp: int) -> np.ndarray:
    """B_{k,k'} = (i)^2 [[V_k, V_k'], V_k]; zero for commuting couplings."""
    if k == kp:
        raise ValueError("b_operator requires two distinct baths (k != k')")
    vk, vkp = model.couplings[k], model.couplings[kp]
    inner = vk @ vkp - vkp @ vk
    return -(inner @ vk - vk @ inner)


def apply_phi(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Phi x = i [V, x]."""
    return 1j * (v @ x - x @ v)


def apply_psi(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Psi x = {V, x}."""
    return v @ x + x @ v


def apply_theta(c_real: float, c_imag: float, v: np.ndarray,
                x: np.ndarray) -> np.ndarray:
    """Theta x = c' Phi x - c'' Psi x."""
    return c_real * apply_phi(v, x) - c_imag * apply_psi(v, x)


@dataclass(frozen=True)
class SuperOp:
    """A linear map on d x d matrices, kept around for algebraic checks.

    The hierarchy kernels inline these maps for speed; this class exists so
    compositions (Phi^2, Phi Theta, the Liouvillian) can be exercised and
    verified against naive two-step application.
    """

    kind: str
    apply: object = field(repr=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    @classmethod
    def left_mult(cls, a: np.ndarray) -> "SuperOp":
        return cls("left_mult", lambda x: a @ x)

    @classmethod
    def right_mult(cls, a: np.ndarray) -> "SuperOp":
        return cls("right_mult", lambda x: x @ a)

    @classmethod
    def commutator(cls, a: np.ndarray, scale: complex = 1.0) -> "SuperOp":
        return cls("commutator", lambda x: scale * (a @ x - x @ a))

    @classmethod
    def anticommutator(cls, a: np.ndarray, scale: complex = 1.0) -> "SuperOp":
        return cls("anticommutator", lambda x: scale * (a @ x + x @ a))

    @classmethod
    def phi(cls, v: np.ndarray) -> "SuperOp":
        return cls.commutator(v, 1j)

    @classmethod
    def psi(cls, v: np.ndarray) -> "SuperOp":
        return cls.anticommutator(v, 1.0)

    @classmethod
    def theta(cls, c_real: float, c_imag: float, v: np.ndarray) -> "SuperOp":
        phi, psi = cls.phi(v), cls.psi(v)
        return cls("composite", lambda x: c_real * phi(x) - c_imag * psi(x))

    @classmethod
    def liouvillian(cls, h: np.ndarray) -> "SuperOp":
        return cls.commutator(h, 1.0)

    def then(self, other: "SuperOp") -> "SuperOp":
        """Composite map: other applied after self."""
        return SuperOp("composite", lambda x: other(self(x)))


# Pauli matrices, used by the presets and all over the tests.
SIGMA_X = _as_readonly([[0, 1], [1, 0]])
SIGMA_Y = _as_readonly([[0, -1j], [1j, 0]])
SIGMA_Z = _as_readonly([[1, 0], [0, -1]])
