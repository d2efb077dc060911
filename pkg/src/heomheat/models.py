"""Benchmark model presets and the weak-coupling Redfield oracle.

Two systems: a non-equilibrium spin-boson model (two-level system between
two baths, the second coupled through a tunable mix of sigma_x and
sigma_z), and a driven three-level heat engine. Parameters follow the
nondimensional convention of the bath module (reference frequency omega_0
resp. omega_1).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, NoiseDecomposition, pade_decompose
from .system import Drive, SystemModel, SIGMA_X, SIGMA_Z


@dataclass(frozen=True)
class SpinBosonParams:
    """H = (omega0/2) sigma_z, V1 = sigma_x, V2 ~ s_x sigma_x + s_z sigma_z."""

    baths: tuple[BathSpec, BathSpec]
    omega0: float = 1.0
    s_x: float = 1.0
    s_z: float = 1.0

    def __post_init__(self):
        if self.s_x == 0.0 and self.s_z == 0.0:
            raise ValueError("the (s_x, s_z) mixing vector must be nonzero")
        if len(self.baths) != 2:
            raise ValueError("the spin-boson preset takes exactly two baths")


def build_spin_boson(params: SpinBosonParams,
                     tol_decomp: float | None = None):
    """Spin-boson model plus its per-bath noise decompositions."""
    norm = math.hypot(params.s_x, params.s_z)
    v2 = (params.s_x * SIGMA_X + params.s_z * SIGMA_Z) / norm
    model = SystemModel(
        h_static=0.5 * params.omega0 * SIGMA_Z,
        couplings=(SIGMA_X.copy(), v2),
    )
    decs = [pade_decompose(spec, tol_decomp) for spec in params.baths]
    return model, decs


@dataclass(frozen=True)
class ThreeLevelParams:
    """Driven three-level engine: levels (0, omega1, omega2), omega1 > omega2.

    The drive g(e^{-i Omega t}|1><2| + h.c.) pumps the 1<->2 transition;
    bath 1 couples 0<->1, bath 2 couples 0<->2.
    """

    baths: tuple[BathSpec, BathSpec]
    omega1: float = 1.0
    omega2: float = 0.5
    g: float = 0.1
    Omega: float = 0.5

    def __post_init__(self):
        if not self.omega1 > self.omega2 > 0:
            raise ValueError("level ordering must satisfy omega1 > omega2 > 0")
        if len(self.baths) != 2:
            raise ValueError("the engine preset takes exactly two baths")


def build_three_level(params: ThreeLevelParams,
                      tol_decomp: float | None = None):
    """Three-level engine model plus its per-bath noise decompositions."""
    h = np.diag([0.0, params.omega1, params.omega2]).astype(complex)
    v1 = np.zeros((3, 3), dtype=complex)
    v1[0, 1] = v1[1, 0] = 1.0
    v2 = np.zeros((3, 3), dtype=complex)
    v2[0, 2] = v2[2, 0] = 1.0
    pattern = np.zeros((3, 3), dtype=complex)
    pattern[1, 2] = 1.0
    drive = Drive(amplitude=params.g, frequency=params.Omega, pattern=pattern)
    model = SystemModel(h_static=h, couplings=(v1, v2), drive=drive)
    decs = [pade_decompose(spec, tol_decomp) for spec in params.baths]
    return model, decs


# -- fingerprints ------------------------------------------------------------


def _array_digest(h, arr):
    h.update(np.ascontiguousarray(arr).tobytes())


def model_fingerprint(model: SystemModel) -> str:
    h = hashlib.sha256()
    _array_digest(h, model.h_static)
    for v in model.couplings:
        _array_digest(h, v)
    if model.drive is not None:
        h.update(json.dumps([model.drive.amplitude,
                             model.drive.frequency]).encode())
        _array_digest(h, model.drive.pattern)
    return h.hexdigest()


def decomposition_fingerprint(decs) -> str:
    h = hashlib.sha256()
    for dec in decs:
        _array_digest(h, dec.c_real())
        _array_digest(h, dec.c_imag())
        _array_digest(h, dec.rates())
        h.update(np.float64(dec.delta_weight).tobytes())
    return h.hexdigest()


# -- second-order Markovian (Redfield) oracle --------------------------------


def _half_fourier(dec: NoiseDecomposition, omega: float) -> complex:
    """W(w) = int_0^inf C(t) e^{-i w t} dt from the pole expansion."""
    c = dec.c_real() + 1j * dec.c_imag()
    return complex(np.sum(c / (dec.rates() + 1j * omega)) + dec.delta_weight)


def redfield_steady_current_oracle(model: SystemModel,
                                   baths: list[BathSpec],
                                   oracle_terms: int = 60) -> np.ndarray:
    """Per-bath steady heat current of the second-order Markovian QME.

    Builds the (non-secular) Redfield generator from high-order
    decompositions of each bath, solves for the unique steady state and
    returns Tr{H_S D_k rho} per bath. Within this approximation the system
    and bath currents coincide, so one number per bath is returned.
    Intended for weak coupling (eta <~ 0.01).
    """
    if model.drive is not None and model.drive.amplitude != 0.0:
        raise ValueError("the Redfield oracle handles undriven models only")
    h = model.h_static
    d = h.shape[0]
    evals, evecs = np.linalg.eigh(h)

    lambdas = []
    for k, spec in enumerate(baths):
        dec = pade_decompose(BathSpec(spec.eta, spec.gamma, spec.temperature,
                                      oracle_terms))
        v_eig = evecs.conj().T @ model.couplings[k] @ evecs
        lam = np.empty_like(v_eig)
        for a in range(d):
            for b in range(d):
                lam[a, b] = v_eig[a, b] * _half_fourier(
                    dec, evals[a] - evals[b])
        lambdas.append(evecs @ lam @ evecs.conj().T)

    def dissipator(k, rho):
        v = model.couplings[k]
        lam = lambdas[k]
        return (lam @ rho @ v - v @ lam @ rho
                + v @ rho @ lam.conj().T - rho @ lam.conj().T @ v)

    def generator(rho):
        out = -1j * (h @ rho - rho @ h)
        for k in range(len(baths)):
            out += dissipator(k, rho)
        return out

    basis = np.eye(d * d, dtype=complex)
    gmat = np.column_stack([
        generator(basis[:, i].reshape(d, d)).reshape(-1)
        for i in range(d * d)
    ])
    w, vecs = np.linalg.eig(gmat)
    null = np.abs(w) < 1e-10 * max(1.0, np.max(np.abs(w)))
    if null.sum() != 1:
        raise ValueError(f"Redfield steady state is not unique "
                         f"({null.sum()} null directions)")
    rho = vecs[:, np.argmax(null)].reshape(d, d)
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)

    return np.array([
        np.trace(h @ dissipator(k, rho)).real for k in range(len(baths))
    ])


def golden_rule_current(omega0: float, baths: list[BathSpec]) -> float:
    """Closed-form rate-equation current for a two-level system with both
    baths coupled through sigma_x; the oracle's own oracle."""
    from .bath import drude_spectral_density

    def n_bose(t):
        return 1.0 / math.expm1(omega0 / t)

    j1 = drude_spectral_density(baths[0], omega0)
    j2 = drude_spectral_density(baths[1], omega0)
    n1, n2 = n_bose(baths[0].temperature), n_bose(baths[1].temperature)
    up1, dn1 = 2 * j1 * n1, 2 * j1 * (n1 + 1)
    up2, dn2 = 2 * j2 * n2, 2 * j2 * (n2 + 1)
    return omega0 * (up1 * dn2 - dn1 * up2) / (up1 + up2 + dn1 + dn2)
