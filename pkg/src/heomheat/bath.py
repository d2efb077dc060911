"""Drude baths and the exponential-plus-delta expansion of their noise.

Everything is expressed in nondimensional units: frequencies in a reference
frequency ``w_ref``, temperatures in ``hbar*w_ref/k_B``, with
``hbar = k_B = 1`` internally.

The correlation function of a bath with spectral density ``J(w)`` at
temperature ``T`` is

    C(t) = (1/pi) * int_0^inf dw J(w) [coth(w/(2T)) cos(w t) - i sin(w t)]

For the Drude form ``J(w) = eta g^2 w / (w^2 + g^2)`` the imaginary part is
a single exponential, ``C_I(t) = -(eta g^2 / 2) exp(-g t)``, while the real
part is expanded over the Drude pole plus Pade poles of coth, with the
truncated tail absorbed into a delta-function weight ``2*Delta*delta(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigvalsh_tridiagonal


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance.

    Carries ``achieved`` (the estimated absolute error actually reached).
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DecompositionError(ValueError):
    """The exponential expansion is inconsistent or failed validation."""


class ExpTerm(NamedTuple):
    c_real: float
    c_imag: float
    rate: float


@dataclass(frozen=True)
class BathSpec:
    """Physical description of one Drude bath.

    eta : coupling strength (units of w_ref)
    gamma : Drude cutoff (units of w_ref)
    temperature : bath temperature (units of hbar*w_ref/k_B)
    pade_terms : number of Pade poles kept on top of the Drude pole
    """

    eta: float
    gamma: float
    temperature: float
    pade_terms: int = 4

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.pade_terms < 0:
            raise ValueError(f"pade_terms must be >= 0, got {self.pade_terms}")


def drude_spectral_density(spec: BathSpec, omega) -> float:
    """J(w) = eta * gamma^2 * w / (w^2 + gamma^2), for w >= 0."""
    g2 = spec.gamma * spec.gamma
    return spec.eta * g2 * np.asarray(omega) / (np.asarray(omega) ** 2 + g2)


def _coth(x):
    return 1.0 / math.tanh(x)


def correlation_quadrature_oracle(spec: BathSpec, t: float,
                                  abs_tol: float = 1e-8) -> complex:
    """Evaluate C(t) by adaptive quadrature of the spectral integral.

    This is the independent oracle against which the exponential expansion
    is checked; it never touches the Pade machinery. Uses QUADPACK's
    Fourier-weighted rules for the oscillatory transforms.

    Raises QuadratureError if the requested absolute tolerance cannot be
    reached. Note that the real part of C(t) diverges logarithmically as
    t -> 0 for a Drude bath (J ~ eta*g^2/w tail), so t = 0 raises for any
    eta > 0.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    eta, g, T = spec.eta, spec.gamma, spec.temperature
    if eta == 0.0:
        return 0.0 + 0.0j
    if t == 0.0:
        raise QuadratureError(
            "C(0) is UV log-divergent for a Drude bath; evaluate at t > 0 "
            "(the imaginary-part limit is -eta*gamma^2/2, see "
            "NoiseDecomposition.c_imag_at_zero)")

    g2 = g * g

    def f_real(w):
        if w < 1e-12:
            return 2.0 * eta * T / math.pi
        return eta * g2 * w / (w * w + g2) * _coth(w / (2.0 * T)) / math.pi

    def f_imag(w):
        return eta * g2 * w / (w * w + g2) / math.pi

    re, re_err = quad(f_real, 0.0, np.inf, weight="cos", wvar=t,
                      epsabs=abs_tol * 0.25, limit=400, limlst=200)
    im, im_err = quad(f_imag, 0.0, np.inf, weight="sin", wvar=t,
                      epsabs=abs_tol * 0.25, limit=400, limlst=200)
    achieved = re_err + im_err
    if achieved > abs_tol:
        raise QuadratureError(
            f"correlation quadrature reached abs error {achieved:.3e} "
            f"> requested {abs_tol:.3e} at t={t}", achieved=achieved)
    return re - 1.0j * im


@lru_cache(maxsize=64)
def _pade_poles_and_residues(n: int):
    """Poles xi_j and residues kappa_j of the [n-1/n] PSD of coth.

    With x = w/T the approximation reads

        coth(x/2) ~ 2/x + sum_j 4*kappa_j*x / (x^2 + xi_j^2)

    so each pole contributes an exponential with rate xi_j*T and residue
    weight kappa_j (kappa -> 1 and xi_j -> 2*pi*j recover Matsubara).
    """
    if n == 0:
        return np.empty(0), np.empty(0)
    off = np.array([1.0 / math.sqrt((2 * k + 3) * (2 * k + 5))
                    for k in range(2 * n - 1)])
    evals = eigvalsh_tridiagonal(np.zeros(2 * n), off)
    xi = np.sort(-2.0 / evals[:n])

    if n > 1:
        off_p = np.array([1.0 / math.sqrt((2 * k + 5) * (2 * k + 7))
                          for k in range(2 * n - 2)])
        evals_p = eigvalsh_tridiagonal(np.zeros(2 * n - 1), off_p)
        chi = np.sort(-2.0 / evals_p[:n - 1])
    else:
        chi = np.empty(0)

    kappa = np.empty(n)
    prefactor = 0.5 * n * (2 * n + 3)
    for j in range(n):
        term = prefactor
        for k in range(n - 1):
            term *= (chi[k] ** 2 - xi[j] ** 2)
            if k != j:
                term /= (xi[k] ** 2 - xi[j] ** 2)
        if n - 1 != j:
            term /= (xi[n - 1] ** 2 - xi[j] ** 2)
        kappa[j] = term
    return xi, kappa


def psd_coth_half(x, n: int):
    """The [n-1/n] Pade approximant of coth(x/2); exposed for testing."""
    xi, kappa = _pade_poles_and_residues(n)
    x = np.asarray(x, dtype=float)
    out = 2.0 / x
    for j in range(n):
        out = out + 4.0 * kappa[j] * x / (x * x + xi[j] ** 2)
    return out


@dataclass(frozen=True)
class NoiseDecomposition:
    """Exponential-plus-delta expansion of one bath's C(t).

    terms : the (c_real, c_imag, rate) triples; C(t>0) ~ sum (c' + i c'')
        exp(-rate t), plus a real short-time part 2*delta_weight*delta(t).
    delta_weight : integral of the un-retained real-part tail.
    c_imag_at_zero : one-sided limit C_I(0+) = sum of all c_imag
        (= -eta*gamma^2/2 exactly for Drude baths).
    declared_tolerance : the reconstruction tolerance this expansion was
        validated against at construction (None if not validated).
    """

    terms: tuple[ExpTerm, ...]
    delta_weight: float
    c_imag_at_zero: float
    declared_tolerance: float | None = None

    def __post_init__(self):
        for term in self.terms:
            if term.rate <= 0:
                raise DecompositionError(
                    f"all rates must be strictly positive, got {term.rate}")
        s = sum(term.c_imag for term in self.terms)
        if not math.isclose(s, self.c_imag_at_zero, rel_tol=1e-12, abs_tol=1e-14):
            raise DecompositionError(
                "c_imag_at_zero must equal the sum of imaginary coefficients")

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def rates(self) -> np.ndarray:
        return np.array([term.rate for term in self.terms])

    def c_real(self) -> np.ndarray:
        return np.array([term.c_real for term in self.terms])

    def c_imag(self) -> np.ndarray:
        return np.array([term.c_imag for term in self.terms])

    def reconstruct(self, t):
        """Sum of exponentials at t > 0 (the delta term is excluded)."""
        t = np.asarray(t, dtype=float)
        c = self.c_real() + 1j * self.c_imag()
        return np.tensordot(c, np.exp(-np.outer(self.rates(), t)), axes=(0, 0))


def delta_weight(spec: BathSpec, retained_terms: Sequence[ExpTerm]) -> float:
    """Time integral of the real-part residual left out of the expansion.

    Equals the exact zero-frequency weight of C_R, eta*T, minus the
    retained weight sum c'_j / rate_j. Goes to zero as more Pade terms are
    kept, and must never be meaningfully negative (that would signal an
    inconsistent pole set).
    """
    exact = spec.eta * spec.temperature
    retained = sum(term.c_real / term.rate for term in retained_terms)
    delta = exact - retained
    scale = max(abs(exact), abs(retained), 1.0)
    if delta < -1e-12 * scale:
        raise DecompositionError(
            f"negative delta weight {delta:.3e}: inconsistent pole set")
    return delta


def pade_decompose(spec: BathSpec, tol_decomp: float | None = None) -> NoiseDecomposition:
    """Expand C(t) into spec.pade_terms + 1 exponentials plus a delta term.

    One pole sits at the Drude cutoff (it carries the entire imaginary
    part, c'' = -eta*gamma^2/2), the rest are the [J-1/J] Pade poles of
    coth. If ``tol_decomp`` is given, the reconstruction is checked against
    the quadrature oracle on t in (0, 10/gamma] and the expansion fails
    loudly when the pointwise error exceeds tol_decomp relative to the
    largest correlation magnitude on that grid.
    """
    eta, g, T, n = spec.eta, spec.gamma, spec.temperature, spec.pade_terms
    lam = eta * g / 2.0  # reorganization energy of J(w)
    beta = 1.0 / T
    xi, kappa = _pade_poles_and_residues(n)

    x0 = beta * g / 2.0
    if abs(math.sin(x0)) < 1e-12:
        raise DecompositionError(
            f"Drude pole degenerate with a Matsubara frequency "
            f"(beta*gamma/2 = {x0:.6g} ~ multiple of pi); perturb gamma or T")
    terms = [ExpTerm(lam * g / math.tan(x0), -lam * g, g)]

    for j in range(n):
        rate = xi[j] * T
        if abs(rate - g) < 1e-10 * g:
            raise DecompositionError(
                f"Pade pole {j} collides with the Drude cutoff "
                f"(rate {rate:.12g} ~ gamma {g:.12g}); use a different "
                f"number of Pade terms")
        c = 4.0 * kappa[j] * lam * g * T * rate / (rate * rate - g * g)
        terms.append(ExpTerm(c, 0.0, rate))

    delta = delta_weight(spec, terms)
    decomp = NoiseDecomposition(tuple(terms), delta, -lam * g,
                                declared_tolerance=tol_decomp)
    if tol_decomp is not None:
        err, scale = reconstruction_error(spec, decomp)
        if err > tol_decomp * scale:
            raise DecompositionError(
                f"reconstruction error {err:.3e} exceeds declared tolerance "
                f"{tol_decomp:.1e} * scale {scale:.3e} "
                f"(pade_terms={n} too small for T={T}, gamma={g})")
    return decomp


def default_comparison_grid(gamma: float, n_points: int = 24) -> np.ndarray:
    """Log-spaced probe times in (0, 10/gamma] for oracle comparisons."""
    return np.geomspace(0.05 / gamma, 10.0 / gamma, n_points)


def reconstruction_error(spec: BathSpec, decomp: NoiseDecomposition,
                         grid: np.ndarray | None = None,
                         abs_tol: float = 1e-10):
    """Max |reconstruction - oracle| on the grid, plus the oracle scale.

    The scale is max |C_oracle| over the grid: C(0) itself is log-divergent
    for Drude baths, so that is the usable normalization of the spec'd
    "relative to |C(0)|" tolerance.
    """
    if grid is None:
        grid = default_comparison_grid(spec.gamma)
    oracle = np.array([correlation_quadrature_oracle(spec, t, abs_tol=abs_tol)
                       for t in grid])
    rec = decomp.reconstruct(grid)
    scale = float(np.max(np.abs(oracle))) if spec.eta > 0 else 1.0
    return float(np.max(np.abs(rec - oracle))), scale


def auto_pade_terms(eta: float, gamma: float, temperature: float,
                    tol: float = 1e-6, max_terms: int = 96) -> int:
    """Smallest pade_terms whose reconstruction meets ``tol`` on the grid."""
    if eta == 0.0:
        return 0
    grid = default_comparison_grid(gamma)
    probe = BathSpec(eta, gamma, temperature, 0)
    oracle = np.array([correlation_quadrature_oracle(probe, t) for t in grid])
    scale = float(np.max(np.abs(oracle)))

    def passes(n):
        try:
            rec = pade_decompose(BathSpec(eta, gamma, temperature, n)).reconstruct(grid)
        except DecompositionError:
            # low-T small-J pole sets are inconsistent (negative delta)
            return False
        return float(np.max(np.abs(rec - oracle))) <= tol * scale

    hi = 0
    while not passes(hi):
        hi = max(1, 2 * hi)
        if hi > max_terms:
            raise DecompositionError(
                f"no expansion with <= {max_terms} Pade terms reaches "
                f"tolerance {tol:.1e} for gamma={gamma}, T={temperature}")
    if hi == 0:
        return 0
    lo = hi // 2  # the last failing probe of the doubling climb
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi
