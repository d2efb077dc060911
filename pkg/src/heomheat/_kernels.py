"""Numba kernels for the HEOM right-hand side and batched RK4 stepping.

The right-hand side runs one fused pass over the flat ADO range in chunks:
scratch matrices are allocated once per chunk and every output row is
written by exactly one thread, so threaded execution is bit-identical to
serial (prange degrades to range in the serial build of the same body).
"""

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap

    prange = range

CHUNK = 256


def _heom_rhs_body(rho, out, h, vs, deltas, bath_start, c1, c2,
                   decay, plus_idx, minus_idx, indices):
    n = rho.shape[0]
    d = rho.shape[1]
    n_baths = vs.shape[0]
    n_chunks = (n + CHUNK - 1) // CHUNK
    for ci in prange(n_chunks):
        acc = np.empty((d, d), np.complex128)
        up = np.empty((d, d), np.complex128)
        dw1 = np.empty((d, d), np.complex128)
        dw2 = np.empty((d, d), np.complex128)
        t1 = np.empty((d, d), np.complex128)
        lo_i = ci * CHUNK
        hi_i = min(n, lo_i + CHUNK)
        for i in range(lo_i, hi_i):
            # -i [H, rho_i] - decay_i rho_i
            for a in range(d):
                for b in range(d):
                    s = 0.0 + 0.0j
                    for c in range(d):
                        s += h[a, c] * rho[i, c, b] - rho[i, a, c] * h[c, b]
                    acc[a, b] = -1j * s - decay[i] * rho[i, a, b]

            for k in range(n_baths):
                v = vs[k]
                lo, hi = bath_start[k], bath_start[k + 1]

                any_up = False
                for m in range(lo, hi):
                    j = plus_idx[m, i]
                    if j >= 0:
                        if not any_up:
                            for a in range(d):
                                for b in range(d):
                                    up[a, b] = rho[j, a, b]
                            any_up = True
                        else:
                            for a in range(d):
                                for b in range(d):
                                    up[a, b] += rho[j, a, b]
                if any_up:
                    # - Phi_k (sum_j rho_{n+e_j}) = -i [V, up]
                    for a in range(d):
                        for b in range(d):
                            s = 0.0 + 0.0j
                            for c in range(d):
                                s += v[a, c] * up[c, b] - up[a, c] * v[c, b]
                            acc[a, b] -= 1j * s

                any_dn = False
                for m in range(lo, hi):
                    j = minus_idx[m, i]
                    if j >= 0:
                        nm = float(indices[i, m])
                        w1 = c1[m] * nm
                        w2 = c2[m] * nm
                        if not any_dn:
                            for a in range(d):
                                for b in range(d):
                                    dw1[a, b] = w1 * rho[j, a, b]
                                    dw2[a, b] = w2 * rho[j, a, b]
                            any_dn = True
                        else:
                            for a in range(d):
                                for b in range(d):
                                    dw1[a, b] += w1 * rho[j, a, b]
                                    dw2[a, b] += w2 * rho[j, a, b]
                if any_dn:
                    # - sum_j n_j Theta_j rho_{n-e_j} = -i [V, dw1] + {V, dw2}
                    for a in range(d):
                        for b in range(d):
                            s1 = 0.0 + 0.0j
                            s2 = 0.0 + 0.0j
                            for c in range(d):
                                s1 += v[a, c] * dw1[c, b] - dw1[a, c] * v[c, b]
                                s2 += v[a, c] * dw2[c, b] + dw2[a, c] * v[c, b]
                            acc[a, b] += -1j * s1 + s2

                dk = deltas[k]
                if dk != 0.0:
                    # - Delta_k [V, [V, rho_i]]
                    for a in range(d):
                        for b in range(d):
                            s = 0.0 + 0.0j
                            for c in range(d):
                                s += v[a, c] * rho[i, c, b] \
                                    - rho[i, a, c] * v[c, b]
                            t1[a, b] = s
                    for a in range(d):
                        for b in range(d):
                            s = 0.0 + 0.0j
                            for c in range(d):
                                s += v[a, c] * t1[c, b] - t1[a, c] * v[c, b]
                            acc[a, b] -= dk * s

            for a in range(d):
                for b in range(d):
                    out[i, a, b] = acc[a, b]


# prange degrades to range without parallel=True, so one body serves both;
# per-call launch overhead makes the serial build the right choice for
# small hierarchies.
heom_rhs_kernel = njit(parallel=True, cache=True)(_heom_rhs_body)
heom_rhs_kernel_serial = njit(cache=True)(_heom_rhs_body)


@njit(cache=True)
def _eval_h(h, h_static, has_drive, g, omega_d, pattern, t):
    d = h_static.shape[0]
    for a in range(d):
        for b in range(d):
            h[a, b] = h_static[a, b]
    if has_drive:
        z = g * np.exp(-1j * omega_d * t)
        zc = np.conj(z)
        for a in range(d):
            for b in range(d):
                h[a, b] += z * pattern[a, b] + zc * np.conj(pattern[b, a])


@njit(cache=True)
def rk4_run_serial(rho, t0, dt, n_steps,
                   h_static, has_drive, g, omega_d, pattern,
                   vs, deltas, bath_start, c1, c2,
                   decay, plus_idx, minus_idx, indices):
    """n_steps of classical RK4 performed entirely in compiled code.

    Updates rho in place and returns the final time. Meant for small
    hierarchies where per-call Python overhead would dominate.
    """
    n, d = rho.shape[0], rho.shape[1]
    size = n * d * d
    y = rho.reshape(size)
    k1 = np.empty((n, d, d), np.complex128)
    k2 = np.empty((n, d, d), np.complex128)
    k3 = np.empty((n, d, d), np.complex128)
    k4 = np.empty((n, d, d), np.complex128)
    ytmp = np.empty((n, d, d), np.complex128)
    k1f = k1.reshape(size)
    k2f = k2.reshape(size)
    k3f = k3.reshape(size)
    k4f = k4.reshape(size)
    ytmpf = ytmp.reshape(size)
    h = np.empty((d, d), np.complex128)

    t = t0
    for _ in range(n_steps):
        _eval_h(h, h_static, has_drive, g, omega_d, pattern, t)
        heom_rhs_kernel_serial(rho, k1, h, vs, deltas, bath_start, c1, c2,
                               decay, plus_idx, minus_idx, indices)
        for i in range(size):
            ytmpf[i] = y[i] + 0.5 * dt * k1f[i]
        _eval_h(h, h_static, has_drive, g, omega_d, pattern, t + 0.5 * dt)
        heom_rhs_kernel_serial(ytmp, k2, h, vs, deltas, bath_start, c1, c2,
                               decay, plus_idx, minus_idx, indices)
        for i in range(size):
            ytmpf[i] = y[i] + 0.5 * dt * k2f[i]
        heom_rhs_kernel_serial(ytmp, k3, h, vs, deltas, bath_start, c1, c2,
                               decay, plus_idx, minus_idx, indices)
        for i in range(size):
            ytmpf[i] = y[i] + dt * k3f[i]
        _eval_h(h, h_static, has_drive, g, omega_d, pattern, t + dt)
        heom_rhs_kernel_serial(ytmp, k4, h, vs, deltas, bath_start, c1, c2,
                               decay, plus_idx, minus_idx, indices)
        for i in range(size):
            y[i] += dt / 6.0 * (k1f[i] + 2.0 * (k2f[i] + k3f[i]) + k4f[i])
        t += dt
    return t
