"""Heat currents, power, interaction energy and thermodynamic-law audits.

Two rigorously distinct currents are evaluated from first-tier ADOs:

* system heat current (SHC): energy change of the bare system due to bath
  k, positive when energy flows into the system;
* bath heat current (BHC): decrease rate of bath k's energy, which differs
  from the SHC by d<H_I>/dt and by the correlation among system-bath
  interactions (CASBI) whenever couplings to different baths do not
  commute.

Sign convention (also carried in the CSV headers): Qdot > 0 means energy
flows from that bath INTO the system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bath import NoiseDecomposition
from .hierarchy import AdoSpace, HierarchyState, PeriodicResult
from .system import SystemModel, a_operator, b_operator, hamiltonian_at, power_operator

EFFICIENCY_FLOOR = 1e-12


class DepthTooShallowError(ValueError):
    def __init__(self):
        super().__init__("current estimators need first-tier ADOs; "
                         "hierarchy depth must be >= 1")


def _first_tier(space: AdoSpace, k: int) -> np.ndarray:
    ids = space.first_tier_of_bath(k)
    if np.any(ids < 0):
        raise DepthTooShallowError()
    return ids


def _tr(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.trace(a @ b))


def shc(state: HierarchyState, model: SystemModel,
        decompositions: Sequence[NoiseDecomposition], k: int,
        t: float | None = None) -> float:
    """System heat current of bath k from first-tier ADOs."""
    t = state.time if t is None else t
    space = state.space
    ids = _first_tier(space, k)
    a_k = a_operator(model, k, t)
    v_k = model.couplings[k]
    total = 0.0 + 0.0j
    for fid in ids:
        total -= _tr(a_k, state.ados[fid])
    delta = decompositions[k].delta_weight
    if delta != 0.0:
        comm = a_k @ v_k - v_k @ a_k
        total += delta * 1j * _tr(comm, state.rho)
    return total.real


def bhc(state: HierarchyState, model: SystemModel,
        decompositions: Sequence[NoiseDecomposition], k: int,
        t: float | None = None) -> float:
    """Bath heat current of bath k, including the CASBI delta terms."""
    t = state.time if t is None else t
    space = state.space
    ids = _first_tier(space, k)
    dec = decompositions[k]
    v_k = model.couplings[k]
    rates = dec.rates()

    total = 0.0 + 0.0j
    for rate, fid in zip(rates, ids):
        total -= rate * _tr(v_k, state.ados[fid])
    total += 2.0 * dec.c_imag_at_zero * _tr(v_k @ v_k, state.rho)

    delta = dec.delta_weight
    if delta != 0.0:
        a_k = a_operator(model, k, t)
        comm = a_k @ v_k - v_k @ a_k
        total += delta * 1j * _tr(comm, state.rho)
        for kp in range(model.n_baths):
            if kp == k:
                continue
            b_kkp = b_operator(model, k, kp)
            if not np.any(b_kkp):
                continue
            for fid in _first_tier(space, kp):
                total += delta * _tr(b_kkp, state.ados[fid])
            delta_p = decompositions[kp].delta_weight
            if delta_p != 0.0:
                v_kp = model.couplings[kp]
                comm_b = b_kkp @ v_kp - v_kp @ b_kkp
                total += delta * delta_p * 1j * _tr(comm_b, state.rho)
    return total.real


def interaction_energy(state: HierarchyState, model: SystemModel,
                       decompositions: Sequence[NoiseDecomposition], k: int,
                       t: float | None = None) -> float:
    """<H_I^k> from first-tier ADOs.

    The short-time delta split contributes exactly zero here (the delta
    multiplies the equal-time commutator [V_k, V_k] = 0); the first-law
    audit pins this bookkeeping.
    """
    ids = _first_tier(state.space, k)
    v_k = model.couplings[k]
    total = sum(_tr(v_k, state.ados[fid]) for fid in ids)
    return total.real


def power(state: HierarchyState, model: SystemModel,
          t: float | None = None) -> float:
    """Instantaneous power <dH/dt> (zero without a drive)."""
    if model.drive is None:
        return 0.0
    t = state.time if t is None else t
    return _tr(power_operator(model, t), state.rho).real


def system_energy(state: HierarchyState, model: SystemModel,
                  t: float | None = None) -> float:
    t = state.time if t is None else t
    return _tr(hamiltonian_at(model, t), state.rho).real


def casbi_total(q_b: float, q_s: float, dh_int_dt: float = 0.0) -> float:
    """Sum over k' != k of the interaction-correlation currents.

    From the BHC split: sum_{k'} qdot_{k,k'} = Q_B - Q_S - d<H_I>/dt; in a
    steady state the derivative vanishes and this is exactly bhc - shc.
    """
    return q_b - q_s - dh_int_dt


@dataclass
class CurrentRecord:
    """Per-time-step sample of every thermodynamic observable.

    q_s, q_b, h_int, casbi are per-bath tuples; casbi and
    first_law_residual are filled by attach_derived_quantities once the
    neighboring samples needed for the time-derivative stencils exist.
    """

    t: float
    q_s: tuple
    q_b: tuple
    power: float
    h_int: tuple
    h_sys: float
    pops: tuple
    coherences: tuple
    casbi: tuple | None = None
    first_law_residual: float | None = None

    @property
    def internal_energy(self) -> float:
        return self.h_sys + sum(self.h_int)


def sample_record(state: HierarchyState, model: SystemModel,
                  decompositions: Sequence[NoiseDecomposition],
                  t: float | None = None) -> CurrentRecord:
    """Evaluate all estimators on one state snapshot."""
    t = state.time if t is None else t
    nb = model.n_baths
    rho = state.rho
    d = rho.shape[0]
    coher = []
    for i in range(d):
        for j in range(i + 1, d):
            coher.extend((rho[i, j].real, rho[i, j].imag))
    return CurrentRecord(
        t=t,
        q_s=tuple(shc(state, model, decompositions, k, t) for k in range(nb)),
        q_b=tuple(bhc(state, model, decompositions, k, t) for k in range(nb)),
        power=power(state, model, t),
        h_int=tuple(interaction_energy(state, model, decompositions, k, t)
                    for k in range(nb)),
        h_sys=system_energy(state, model, t),
        pops=tuple(rho[i, i].real for i in range(d)),
        coherences=tuple(coher),
    )


def _centered_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """Five-point centered first derivative, three-point at the edges.

    The endpoints themselves get one-sided three-point stencils so the
    array length is preserved.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < 3:
        raise ValueError("need at least 3 samples for the derivative stencil")
    out = np.empty_like(values)
    out[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1]
                 - values[4:]) / (12 * dt)
    out[1] = (values[2] - values[0]) / (2 * dt)
    out[-2] = (values[-1] - values[-3]) / (2 * dt)
    out[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * dt)
    out[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * dt)
    return out


def attach_derived_quantities(records: list[CurrentRecord],
                              dt: float) -> list[CurrentRecord]:
    """Fill casbi and first-law residuals along a uniformly sampled window.

    d<H_I>/dt comes from finite-differencing the interaction-energy
    estimator (an independent route from the analytic terms inside the BHC,
    so bookkeeping errors cannot cancel silently); the first-law residual
    is |sum_k Q_B^k - dU/dt + W| with U = <H_S> + sum_k <H_I^k>.
    """
    if len(records) < 3:
        raise ValueError("need at least 3 trajectory samples for the "
                         "derivative stencil")
    nb = len(records[0].q_s)
    du_dt = _centered_derivative([r.internal_energy for r in records], dt)
    dh_int = [
        _centered_derivative([r.h_int[k] for r in records], dt)
        for k in range(nb)
    ]
    for i, rec in enumerate(records):
        rec.casbi = tuple(
            casbi_total(rec.q_b[k], rec.q_s[k], dh_int[k][i])
            for k in range(nb))
        rec.first_law_residual = abs(sum(rec.q_b) - du_dt[i] + rec.power)
    return records


def first_law_scale(records: Sequence[CurrentRecord]) -> float:
    """Largest energy-flow magnitude, the audit's normalization."""
    mags = [abs(rec.power) for rec in records]
    mags += [abs(v) for rec in records for v in rec.q_b]
    mags += [abs(v) for rec in records for v in rec.q_s]
    return max(mags) if mags else 0.0


@dataclass
class CycleIntegrals:
    work: float
    q_s: tuple
    q_b: tuple
    period: float


def cycle_average(result: PeriodicResult, names: Sequence[str]) -> CycleIntegrals:
    """Trapezoidal per-cycle integrals from a stored periodic cycle.

    ``names`` labels the columns of result.samples; W_dot, Qdot_S_k and
    Qdot_B_k columns are pulled out by name.
    """
    if not result.converged:
        raise ValueError("trajectory is not flagged periodic-steady")
    period = result.times[-1] - result.times[0]
    cols = {name: i for i, name in enumerate(names)}
    dx = period / (len(result.times) - 1)

    def integral(name):
        return float(np.trapezoid(result.samples[:, cols[name]], dx=dx))

    nb = sum(1 for name in names if name.startswith("Qdot_S_"))
    return CycleIntegrals(
        work=integral("W_dot"),
        q_s=tuple(integral(f"Qdot_S_{k + 1}") for k in range(nb)),
        q_b=tuple(integral(f"Qdot_B_{k + 1}") for k in range(nb)),
        period=period,
    )


@dataclass
class Efficiencies:
    """Engine efficiencies; None marks an undefined ratio (|Q| ~ 0)."""

    system: float | None
    bath: float | None


def efficiencies(cycle: CycleIntegrals) -> Efficiencies:
    """epsilon_S = -W/Q_S^1 and epsilon_B = -W/Q_B^1 per cycle."""
    def ratio(denom):
        if abs(denom) < EFFICIENCY_FLOOR:
            return None
        return -cycle.work / denom

    return Efficiencies(system=ratio(cycle.q_s[0]), bath=ratio(cycle.q_b[0]))


def second_law_check(q_b: Sequence[float],
                     temperatures: Sequence[float]) -> float:
    """Clausius functional -sum_k Q_B^k / T_k (>= 0 up to audit tolerance).

    Works for instantaneous steady currents and per-cycle integrals alike.
    """
    return -sum(q / t for q, t in zip(q_b, temperatures))


@dataclass
class AuditReport:
    first_law_max_residual: float
    first_law_scale: float
    first_law_pass: bool
    clausius_value: float
    clausius_pass: bool
    tol_audit: float

    @property
    def passed(self) -> bool:
        return self.first_law_pass and self.clausius_pass


def audit_records(records: Sequence[CurrentRecord],
                  temperatures: Sequence[float],
                  tol_audit: float = 1e-6,
                  q_b_cycle: Sequence[float] | None = None,
                  skip_edge: int = 2) -> AuditReport:
    """First- and second-law audit over a sampled window.

    The residual bound is tol_audit times the largest energy-flow
    magnitude; the Clausius functional uses per-cycle integrals when given,
    otherwise the final sample's instantaneous currents (steady state).
    """
    interior = list(records)[skip_edge:len(records) - skip_edge] or list(records)
    scale = first_law_scale(interior)
    resid = max(rec.first_law_residual for rec in interior
                if rec.first_law_residual is not None)
    q_b = tuple(q_b_cycle) if q_b_cycle is not None else records[-1].q_b
    clausius = second_law_check(q_b, temperatures)
    bound = tol_audit * max(scale, 1e-30)
    return AuditReport(
        first_law_max_residual=resid,
        first_law_scale=scale,
        first_law_pass=resid <= bound,
        clausius_value=clausius,
        clausius_pass=clausius >= -bound,
        tol_audit=tol_audit,
    )
