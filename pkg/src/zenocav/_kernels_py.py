"""Pure-numpy implementations of the stepping kernels.

Same contracts as the compiled extension in ``_kernels_cy``; which one is used
is decided in ``_backend`` at import time.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def lindblad_rk4(h: np.ndarray, lam: float, rho: np.ndarray, dt: float,
                 nsteps: int) -> np.ndarray:
    """Fixed-step RK4 for the 4-level master equation.

    ``h`` is the 4x4 Hamiltonian; the single decay channel empties slot 2
    (the pseudomode excitation) into slot 3 at rate ``2*lam``.
    """
    rho = np.array(rho, dtype=complex)

    def rhs(r):
        d = -1j * (h @ r - r @ h)
        d[3, 3] += 2.0 * lam * r[2, 2]
        d[2, :] -= lam * r[2, :]
        d[:, 2] -= lam * r[:, 2]
        return d

    for _ in range(nsteps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def volterra_run(c0: np.ndarray, delta1: float, delta2: float, lam: float,
                 rabi: float, r1: float, r2: float, dt: float,
                 nsteps: int) -> np.ndarray:
    """Trapezoidal predictor-corrector for the two-amplitude memory-kernel ODE.

    Works in the qubit interaction picture where the memory kernel for
    amplitude ``i`` is ``rabi**2 * exp((1j*delta_i - lam) * t')`` and the
    cross terms carry the explicit ``exp(1j*(delta_j - delta_i)*t)`` phases.
    Returns the trajectory, shape (nsteps + 1, 2).  Raises RuntimeError when
    the qubit norm grows by more than 1e-3 (instability detector).
    """
    deltas = np.array([delta1, delta2])
    weights = np.array([r1, r2])
    t = dt * np.arange(nsteps + 1)
    # kernel samples per source amplitude i
    ker = np.exp((1j * deltas[None, :] - lam) * t[:, None])  # (n+1, 2)
    phase = np.exp(1j * np.subtract.outer(deltas, deltas)[None] * t[:, None, None])

    out = np.empty((nsteps + 1, 2), dtype=complex)
    out[0] = c0
    norm0 = float(np.sum(np.abs(c0) ** 2))
    pref = rabi**2 * np.outer(weights, weights)  # (j, i)

    def deriv(n, tip):
        # trapezoidal convolution over the history 0..n with value `tip` at n
        if n == 0:
            return np.zeros(2, dtype=complex)
        conv = np.empty(2, dtype=complex)
        for i in range(2):
            hist = out[n - 1 :: -1, i]
            k = ker[1:n + 1, i]
            acc = 0.5 * ker[0, i] * tip[i] + 0.5 * k[-1] * hist[-1]
            if n > 1:
                acc += np.dot(k[:-1], hist[:-1])
            conv[i] = dt * acc
        return -(pref * phase[n]) @ conv

    for n in range(nsteps):
        f_n = deriv(n, out[n])
        pred = out[n] + dt * f_n
        f_pred = deriv(n + 1, pred)
        out[n + 1] = out[n] + 0.5 * dt * (f_n + f_pred)
        norm = float(np.sum(np.abs(out[n + 1]) ** 2))
        if norm > norm0 + 1e-3:
            raise RuntimeError(
                f"volterra integration unstable at step {n + 1} "
                f"(t = {t[n + 1]:.4g}): qubit norm {norm:.6f} > {norm0:.6f} + 1e-3; "
                "reduce dt"
            )
    return out
