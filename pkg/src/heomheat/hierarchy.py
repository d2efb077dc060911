"""ADO index space, HEOM right-hand side and time propagation.

The hierarchy is stored flat: every auxiliary density operator (ADO) is a
d x d complex matrix at a combinatorial rank computed from its multi-index
(n_{k_0}, ..., n_{K_J}) over all bath exponents, truncated at total depth
sum(n) <= N. Rank/unrank are exact bijections; neighbor tables give O(1)
access to the n +- e_j couplings; ADOs beyond the depth bound are zero
(hard truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .bath import NoiseDecomposition
from .system import SystemModel, hamiltonian_at

DEFAULT_MEM_CAP = 3 * 2**30  # bytes of ADO state the enumerator will allow


class HierarchyTooLargeError(MemoryError):
    def __init__(self, count, estimate, cap):
        super().__init__(
            f"hierarchy would hold {count} ADOs (~{estimate / 2**20:.0f} MiB "
            f"with integrator buffers) exceeding the cap of "
            f"{cap / 2**20:.0f} MiB")
        self.count = count


class NonFiniteStateError(FloatingPointError):
    def __init__(self, t, ado_id):
        super().__init__(
            f"non-finite ADO values after step to t={t:.6g} (first offender: "
            f"flat id {ado_id}); reduce dt or increase depth")
        self.ado_id = ado_id


class SteadyStateError(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


class PeriodicityError(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


def _binomial_table(max_slots: int, max_budget: int) -> np.ndarray:
    """T[s, b] = C(s+b, s), the number of s-vectors with sum <= b."""
    table = np.zeros((max_slots + 1, max_budget + 1), dtype=np.int64)
    table[0, :] = 1
    for s in range(1, max_slots + 1):
        table[s, 0] = 1
        for b in range(1, max_budget + 1):
            table[s, b] = table[s - 1, b] + table[s, b - 1]
    return table


def _generate_indices(n_exp: int, depth: int, count: int) -> np.ndarray:
    """All multi-indices with sum <= depth, lexicographic, as int16."""
    out = np.zeros((count, n_exp), dtype=np.int16)
    n = np.zeros(n_exp, dtype=np.int64)
    s = 0
    row = 0
    while True:
        out[row] = n
        row += 1
        if s < depth:
            n[-1] += 1
            s += 1
            continue
        j = n_exp - 1
        while j > 0 and n[j] == 0:
            j -= 1
        if j == 0:
            break
        s -= n[j]
        n[j] = 0
        n[j - 1] += 1
        s += 1
    assert row == count
    return out


@dataclass(frozen=True)
class AdoSpace:
    """Index table of one truncated hierarchy.

    Arrays are laid out per flattened exponent m (bath-major): rates,
    c_real, c_imag of the noise expansion term, plus/minus neighbor ids
    (-1 where the neighbor falls outside the depth bound) and the total
    decay sum(n_m * rate_m) per ADO.
    """

    depth: int
    rates: np.ndarray
    c_real: np.ndarray
    c_imag: np.ndarray
    bath_start: np.ndarray
    deltas: np.ndarray
    indices: np.ndarray
    plus_idx: np.ndarray
    minus_idx: np.ndarray
    decay: np.ndarray
    first_tier: np.ndarray
    _comb: np.ndarray = field(repr=False)

    @property
    def n_exponents(self) -> int:
        return self.indices.shape[1]

    @property
    def n_ados(self) -> int:
        return self.indices.shape[0]

    @property
    def n_baths(self) -> int:
        return len(self.bath_start) - 1

    def rank(self, index: Sequence[int]) -> int:
        """Flat id of one multi-index (exact combinatorial ranking)."""
        index = np.asarray(index, dtype=np.int64)
        if index.ndim != 1 or index.shape[0] != self.n_exponents:
            raise ValueError("index has wrong arity")
        if np.any(index < 0) or index.sum() > self.depth:
            raise ValueError(f"index {index.tolist()} outside the hierarchy")
        return int(self.rank_many(index[None, :])[0])

    def rank_many(self, idx: np.ndarray) -> np.ndarray:
        """Vectorized rank of (rows, M) multi-indices assumed valid."""
        m = self.n_exponents
        rows = idx.shape[0]
        idx = idx.astype(np.int64, copy=False)
        pre = np.zeros((rows, m), dtype=np.int64)
        np.cumsum(idx[:, :-1], axis=1, out=pre[:, 1:])
        budget = self.depth - pre
        r = np.zeros(rows, dtype=np.int64)
        for i in range(m):
            s = m - i
            r += self._comb[s, budget[:, i]] - self._comb[s, budget[:, i] - idx[:, i]]
        return r

    def unrank(self, flat_id: int) -> tuple[int, ...]:
        """Multi-index of one flat id (inverse of rank)."""
        if not 0 <= flat_id < self.n_ados:
            raise ValueError(f"flat id {flat_id} out of range")
        return tuple(int(v) for v in self.indices[flat_id])

    def exponent_bath(self, m: int) -> int:
        """Owning bath of flattened exponent m."""
        return int(np.searchsorted(self.bath_start, m, side="right") - 1)

    def first_tier_of_bath(self, k: int) -> np.ndarray:
        return self.first_tier[self.bath_start[k]:self.bath_start[k + 1]]


def enumerate_ados(decompositions: Sequence[NoiseDecomposition], depth: int,
                   dim: int = 0, mem_cap: int = DEFAULT_MEM_CAP) -> AdoSpace:
    """Build the index table for all multi-indices with total order <= depth.

    The count is C(M + depth, depth) with M the total number of retained
    exponents; an estimate of the propagation working set (state + RK4
    buffers + neighbor tables) is checked against ``mem_cap`` first.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rates = np.concatenate([d.rates() for d in decompositions]) \
        if decompositions else np.empty(0)
    if np.any(rates <= 0):
        raise ValueError("all exponent rates must be positive")
    c_real = np.concatenate([d.c_real() for d in decompositions]) \
        if decompositions else np.empty(0)
    c_imag = np.concatenate([d.c_imag() for d in decompositions]) \
        if decompositions else np.empty(0)
    lens = [d.n_terms for d in decompositions]
    bath_start = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    deltas = np.array([d.delta_weight for d in decompositions])

    m = int(bath_start[-1])
    if m == 0:
        raise ValueError("hierarchy needs at least one bath exponent "
                         "(all decompositions are empty)")
    count = math.comb(m + depth, depth)
    d2 = max(dim, 2) ** 2
    estimate = count * (d2 * 16 * 6 + 2 * m * 4 + m * 2 + 8)
    if estimate > mem_cap:
        raise HierarchyTooLargeError(count, estimate, mem_cap)

    indices = _generate_indices(m, depth, count)
    comb = _binomial_table(m, depth)

    space = AdoSpace(
        depth=depth, rates=rates, c_real=c_real, c_imag=c_imag,
        bath_start=bath_start, deltas=deltas, indices=indices,
        plus_idx=np.empty(0), minus_idx=np.empty(0), decay=np.empty(0),
        first_tier=np.empty(0), _comb=comb)

    level = indices.sum(axis=1, dtype=np.int64)
    plus_idx = np.full((m, count), -1, dtype=np.int32)
    minus_idx = np.full((m, count), -1, dtype=np.int32)
    for j in range(m):
        can_up = level < depth
        if np.any(can_up):
            cand = indices[can_up].astype(np.int64)
            cand[:, j] += 1
            plus_idx[j, can_up] = space.rank_many(cand)
        can_dn = indices[:, j] > 0
        if np.any(can_dn):
            cand = indices[can_dn].astype(np.int64)
            cand[:, j] -= 1
            minus_idx[j, can_dn] = space.rank_many(cand)

    decay = indices.astype(np.float64) @ rates
    first = np.zeros((m, m), dtype=np.int64)
    np.fill_diagonal(first, 1)
    first_tier = space.rank_many(first).astype(np.int64) if depth >= 1 \
        else np.full(m, -1, dtype=np.int64)

    object.__setattr__(space, "plus_idx", plus_idx)
    object.__setattr__(space, "minus_idx", minus_idx)
    object.__setattr__(space, "decay", decay)
    object.__setattr__(space, "first_tier", first_tier)
    return space


@dataclass
class HierarchyState:
    """Full hierarchy at one instant: flat (n_ados, d, d) complex storage."""

    space: AdoSpace
    ados: np.ndarray
    time: float = 0.0

    @property
    def rho(self) -> np.ndarray:
        """The physical reduced density operator (the all-zero index)."""
        return self.ados[0]

    @property
    def dim(self) -> int:
        return self.ados.shape[1]

    def copy(self) -> "HierarchyState":
        return HierarchyState(self.space, self.ados.copy(), self.time)

    def trace_deviation(self) -> float:
        return abs(np.trace(self.rho).real - 1.0) + abs(np.trace(self.rho).imag)

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.ados - self.ados.conj().transpose(0, 2, 1))))


def initial_state(space: AdoSpace, rho0: np.ndarray,
                  t0: float = 0.0) -> HierarchyState:
    """Factorized initial condition: top ADO = rho0, all others zero."""
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    tr = np.trace(rho0)
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"initial density operator must have unit trace, "
                         f"got {tr}")
    ados = np.zeros((space.n_ados, d, d), dtype=complex)
    ados[0] = rho0
    return HierarchyState(space, ados, t0)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


class HeomPropagator:
    """Evaluates the HEOM right-hand side and steps it with fixed-dt RK4.

    backend "numba" runs the fused parallel kernel, "numpy" the vectorized
    fallback with identical arithmetic (the test suite asserts agreement).
    """

    def __init__(self, model: SystemModel,
                 decompositions: Sequence[NoiseDecomposition],
                 space: AdoSpace, backend: str = "auto"):
        if len(decompositions) != model.n_baths:
            raise ValueError("one decomposition per bath is required")
        if space.n_baths != model.n_baths:
            raise ValueError("index space was built for a different bath set")
        self.model = model
        self.decompositions = tuple(decompositions)
        self.space = space
        if backend == "auto":
            backend = "numba" if _kernels.HAVE_NUMBA else "numpy"
        if backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend

        self._vs = np.ascontiguousarray(np.stack(model.couplings))
        self._h_static = np.ascontiguousarray(model.h_static)
        if model.drive is not None:
            self._drive_args = (True, float(model.drive.amplitude),
                                float(model.drive.frequency),
                                np.ascontiguousarray(model.drive.pattern))
        else:
            d = model.dim
            self._drive_args = (False, 0.0, 0.0, np.zeros((d, d), complex))
        self._k = [None] * 4
        self._ytmp = None

    # -- right-hand side ---------------------------------------------------

    # below this many ADOs the parallel launch overhead dominates
    SERIAL_CUTOVER = 4096

    def rhs_into(self, t: float, rho: np.ndarray, out: np.ndarray) -> None:
        h = hamiltonian_at(self.model, t)
        if self.backend == "numba":
            kernel = (_kernels.heom_rhs_kernel_serial
                      if rho.shape[0] < self.SERIAL_CUTOVER
                      else _kernels.heom_rhs_kernel)
            kernel(
                rho, out, h, self._vs, self.space.deltas,
                self.space.bath_start, self.space.c_real, self.space.c_imag,
                self.space.decay, self.space.plus_idx, self.space.minus_idx,
                self.space.indices)
        else:
            self._rhs_numpy(h, rho, out)

    def _rhs_numpy(self, h, rho, out):
        space = self.space
        np.matmul(h, rho, out=out)
        out -= rho @ h
        out *= -1j
        out -= space.decay[:, None, None] * rho
        n = rho.shape[0]
        for k in range(space.n_baths):
            v = self._vs[k]
            lo, hi = int(space.bath_start[k]), int(space.bath_start[k + 1])

            up = np.zeros_like(rho)
            for m in range(lo, hi):
                idx = space.plus_idx[m]
                valid = idx >= 0
                up[valid] += rho[idx[valid]]
            out -= 1j * (v @ up - up @ v)

            dw1 = np.zeros_like(rho)
            dw2 = np.zeros_like(rho)
            for m in range(lo, hi):
                idx = space.minus_idx[m]
                valid = idx >= 0
                nm = space.indices[valid, m].astype(float)
                gathered = rho[idx[valid]]
                dw1[valid] += (space.c_real[m] * nm)[:, None, None] * gathered
                dw2[valid] += (space.c_imag[m] * nm)[:, None, None] * gathered
            out -= 1j * (v @ dw1 - dw1 @ v)
            out += v @ dw2 + dw2 @ v

            dk = space.deltas[k]
            if dk != 0.0:
                t1 = v @ rho - rho @ v
                out -= dk * (v @ t1 - t1 @ v)
        assert out.shape[0] == n

    # -- stepping ----------------------------------------------------------

    def _buffers(self, like: np.ndarray):
        if self._ytmp is None or self._ytmp.shape != like.shape:
            self._k = [np.empty_like(like) for _ in range(4)]
            self._ytmp = np.empty_like(like)
        return self._k, self._ytmp

    def step_into(self, t: float, y: np.ndarray, dt: float,
                  out: np.ndarray) -> None:
        """Classical RK4 update y(t) -> out = y(t + dt)."""
        (k1, k2, k3, k4), ytmp = self._buffers(y)
        self.rhs_into(t, y, k1)
        np.multiply(k1, 0.5 * dt, out=ytmp)
        ytmp += y
        self.rhs_into(t + 0.5 * dt, ytmp, k2)
        np.multiply(k2, 0.5 * dt, out=ytmp)
        ytmp += y
        self.rhs_into(t + 0.5 * dt, ytmp, k3)
        np.multiply(k3, dt, out=ytmp)
        ytmp += y
        self.rhs_into(t + dt, ytmp, k4)
        k2 += k3
        k2 *= 2.0
        k1 += k2
        k1 += k4
        np.multiply(k1, dt / 6.0, out=out)
        out += y

    def step(self, state: HierarchyState, dt: float) -> HierarchyState:
        """One RK4 step; raises NonFiniteStateError on blow-up."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        out = np.empty_like(state.ados)
        self.step_into(state.time, state.ados, dt, out)
        t_new = state.time + dt
        if not np.isfinite(out).all():
            bad = ~np.isfinite(out).reshape(out.shape[0], -1).all(axis=1)
            raise NonFiniteStateError(t_new, int(np.argmax(bad)))
        return HierarchyState(state.space, out, t_new)

    def run_steps(self, y: np.ndarray, t: float, dt: float,
                  n_steps: int) -> float:
        """Advance ``y`` in place by n_steps; returns the final time.

        Small hierarchies run the whole loop inside one compiled call,
        otherwise this falls back to the buffered per-step path. Raises
        NonFiniteStateError on blow-up.
        """
        space = self.space
        if self.backend == "numba" and y.shape[0] < self.SERIAL_CUTOVER:
            has_drive, g, omega_d, pattern = self._drive_args
            t_new = _kernels.rk4_run_serial(
                y, t, dt, n_steps, self._h_static, has_drive, g, omega_d,
                pattern, self._vs, space.deltas, space.bath_start,
                space.c_real, space.c_imag, space.decay, space.plus_idx,
                space.minus_idx, space.indices)
        else:
            buf = np.empty_like(y)
            a, b = y, buf
            for _ in range(n_steps):
                self.step_into(t, a, dt, b)
                a, b = b, a
                t += dt
            if a is not y:
                y[:] = a
            t_new = t
        if not np.isfinite(y).all():
            bad = ~np.isfinite(y).reshape(y.shape[0], -1).all(axis=1)
            raise NonFiniteStateError(t_new, int(np.argmax(bad)))
        return t_new

    def suggest_dt(self, safety: float = 0.6) -> float:
        """Stability-limited RK4 step estimate for this hierarchy."""
        space = self.space
        max_decay = float(space.decay.max()) if space.n_ados else 0.0
        h_norm = float(np.linalg.norm(hamiltonian_at(self.model, 0.0), 2))
        if self.model.drive is not None:
            h_norm += 2 * abs(self.model.drive.amplitude) \
                * float(np.linalg.norm(self.model.drive.pattern, 2))
        coupling = 0.0
        for k in range(space.n_baths):
            v_norm = float(np.linalg.norm(self._vs[k], 2))
            lo, hi = int(space.bath_start[k]), int(space.bath_start[k + 1])
            cmax = float(np.max(np.hypot(space.c_real[lo:hi],
                                         space.c_imag[lo:hi]), initial=0.0))
            coupling += 4.0 * v_norm ** 2 * math.sqrt(
                max(space.depth, 1) * cmax)
            coupling += 8.0 * abs(space.deltas[k]) * v_norm ** 2
        bound = max_decay + 2.0 * h_norm + coupling
        return safety * 2.8 / max(bound, 1e-12)


def heom_rhs(prop: HeomPropagator, state: HierarchyState,
             t: float | None = None) -> np.ndarray:
    """Time derivative of every ADO (pure function of (state, t))."""
    out = np.empty_like(state.ados)
    prop.rhs_into(state.time if t is None else t, state.ados, out)
    return out


def step_rk4(prop: HeomPropagator, state: HierarchyState,
             dt: float) -> HierarchyState:
    return prop.step(state, dt)


# -- drivers ---------------------------------------------------------------


@dataclass
class SteadyDiagnostics:
    converged: bool
    t_final: float
    n_steps: int
    residual_history: list
    drift_history: list


def propagate_to_steady(prop: HeomPropagator, state: HierarchyState,
                        tol: float = 1e-8, t_max: float = 1e5,
                        dt: float | None = None,
                        probe_interval: float = 2.0,
                        observables: Callable[[HierarchyState], np.ndarray] | None = None,
                        obs_floor: float = 1e-12):
    """Integrate an undriven hierarchy until it stops moving.

    Convergence requires both the top-ADO derivative norm (relative to
    ||rho||_F) and the drift of the probe observables between successive
    windows to fall below ``tol``.
    """
    if prop.model.drive is not None and prop.model.drive.amplitude != 0.0:
        raise ValueError("propagate_to_steady requires an undriven model; "
                         "use propagate_periodic")
    if dt is None:
        dt = prop.suggest_dt()
    steps_per_probe = max(1, int(round(probe_interval / dt)))
    work = state.copy()
    rhs_buf = np.empty_like(work.ados)

    residuals, drifts = [], []
    prev_obs = None
    n_steps = 0
    while work.time < t_max:
        work.time = prop.run_steps(work.ados, work.time, dt, steps_per_probe)
        n_steps += steps_per_probe

        prop.rhs_into(work.time, work.ados, rhs_buf)
        residual = float(np.linalg.norm(rhs_buf[0]) / np.linalg.norm(work.ados[0]))
        residuals.append((work.time, residual))

        drift = np.inf
        if observables is not None:
            obs = np.asarray(observables(work), dtype=float)
            if prev_obs is not None:
                scale = np.maximum(np.abs(obs), obs_floor)
                drift = float(np.max(np.abs(obs - prev_obs) / scale))
                drifts.append((work.time, drift))
            prev_obs = obs
        else:
            drift = residual

        if residual < tol and drift < tol:
            return work, SteadyDiagnostics(True, work.time, n_steps,
                                           residuals, drifts)
    raise SteadyStateError(
        f"no steady state within t_max={t_max} (last residual "
        f"{residuals[-1][1]:.3e}, tol {tol:.1e})",
        SteadyDiagnostics(False, work.time, n_steps, residuals, drifts))


@dataclass
class PeriodicResult:
    """One stored cycle of the periodic steady state plus diagnostics."""

    times: np.ndarray
    samples: np.ndarray
    cycle_integrals: np.ndarray
    state: HierarchyState
    converged: bool
    cycles: int
    dt: float
    steps_per_cycle: int
    history: list


def propagate_periodic(prop: HeomPropagator, state: HierarchyState,
                       integrand_fn: Callable[[HierarchyState], np.ndarray],
                       tol: float = 1e-6, max_cycles: int = 500,
                       dt: float | None = None, n_store: int = 128,
                       min_cycles: int = 3,
                       obs_floor: float = 1e-12) -> PeriodicResult:
    """Integrate whole drive cycles until the cycle integrals stop moving.

    ``integrand_fn`` maps a state to the observable vector whose cycle
    integrals drive convergence; every cycle is sampled on a uniform grid of
    n_store intervals (endpoints included) and integrated by the trapezoid
    rule there (for smooth periodic integrands that converges spectrally in
    n_store). The last cycle's samples are returned for analysis.
    """
    drive = prop.model.drive
    if drive is None:
        raise ValueError("propagate_periodic requires a driven model")
    period = drive.period
    if dt is None:
        dt = min(prop.suggest_dt(), period / 64)
    stride = max(1, int(math.ceil(period / dt / n_store)))
    steps_per_cycle = stride * n_store
    dt = period / steps_per_cycle

    work = state.copy()
    history = []
    prev = None
    converged = False
    cycles = 0

    def run_cycle():
        times = [work.time]
        samples = [np.asarray(integrand_fn(work), dtype=float)]
        for _ in range(n_store):
            work.time = prop.run_steps(work.ados, work.time, dt, stride)
            times.append(work.time)
            samples.append(np.asarray(integrand_fn(work), dtype=float))
        samples = np.asarray(samples)
        integral = np.trapezoid(samples, dx=period / n_store, axis=0)
        return integral, np.asarray(times), samples

    while cycles < max_cycles:
        integral, times, samples = run_cycle()
        cycles += 1
        if prev is not None:
            scale = np.maximum(np.abs(integral), obs_floor)
            drift = float(np.max(np.abs(integral - prev) / scale))
            history.append((cycles, drift))
            if drift < tol and cycles >= min_cycles:
                converged = True
                break
        prev = integral

    if not converged:
        raise PeriodicityError(
            f"no periodic steady state within {max_cycles} cycles "
            f"(last drift {history[-1][1]:.3e}, tol {tol:.1e})", history)

    return PeriodicResult(
        times=times, samples=samples,
        cycle_integrals=integral, state=work, converged=True,
        cycles=cycles, dt=dt, steps_per_cycle=steps_per_cycle,
        history=history)


def propagate_transient(prop: HeomPropagator, state: HierarchyState,
                        t_final: float, dt: float | None = None,
                        sample_every: int = 1,
                        sample_fn: Callable[[HierarchyState], np.ndarray] | None = None):
    """Fixed-horizon run sampling ``sample_fn`` every ``sample_every`` steps."""
    if dt is None:
        dt = prop.suggest_dt()
    n_steps = max(1, int(round((t_final - state.time) / dt)))
    work = state.copy()
    times, samples = [], []
    if sample_fn is not None:
        times.append(work.time)
        samples.append(np.asarray(sample_fn(work)))
    done = 0
    while done < n_steps:
        chunk = min(sample_every, n_steps - done)
        work.time = prop.run_steps(work.ados, work.time, dt, chunk)
        done += chunk
        if sample_fn is not None:
            times.append(work.time)
            samples.append(np.asarray(sample_fn(work)))
    return work, np.asarray(times), np.asarray(samples)


# -- warm starts and checkpoints -------------------------------------------


def embed_state(state: HierarchyState, target: AdoSpace) -> HierarchyState:
    """Copy ADOs into a deeper space with the same exponent set."""
    src = state.space
    if target.n_exponents != src.n_exponents or \
            not np.allclose(target.rates, src.rates) or \
            not np.allclose(target.c_real, src.c_real) or \
            not np.allclose(target.c_imag, src.c_imag):
        raise ValueError("target space has a different exponent set; "
                         "only depth extensions can reuse a state")
    if target.depth < src.depth:
        raise ValueError("target depth is smaller than the source depth")
    d = state.dim
    ados = np.zeros((target.n_ados, d, d), dtype=complex)
    ids = target.rank_many(src.indices.astype(np.int64))
    ados[ids] = state.ados
    return HierarchyState(target, ados, state.time)


CHECKPOINT_VERSION = 1


def save_checkpoint(path, state: HierarchyState, model_hash: str,
                    decomp_hash: str) -> None:
    np.savez(path,
             version=np.int64(CHECKPOINT_VERSION),
             model_hash=np.bytes_(model_hash.encode()),
             decomp_hash=np.bytes_(decomp_hash.encode()),
             depth=np.int64(state.space.depth),
             time=np.float64(state.time),
             ados=state.ados,
             layout=np.bytes_(b"lex-v1"))


def load_checkpoint(path, space: AdoSpace, model_hash: str | None = None,
                    decomp_hash: str | None = None) -> HierarchyState:
    with np.load(path) as data:
        if int(data["version"]) != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version "
                             f"{int(data['version'])}")
        if bytes(data["layout"]) != b"lex-v1":
            raise ValueError("unknown checkpoint layout")
        for name, expected in (("model_hash", model_hash),
                               ("decomp_hash", decomp_hash)):
            found = bytes(data[name]).decode()
            if expected is not None and found != expected:
                raise ValueError(f"checkpoint {name} mismatch: "
                                 f"{found} != {expected}")
        if int(data["depth"]) != space.depth:
            raise ValueError("checkpoint depth does not match the space")
        ados = np.array(data["ados"])
        if ados.shape[0] != space.n_ados:
            raise ValueError("checkpoint ADO count does not match the space")
        return HierarchyState(space, ados, float(data["time"]))
