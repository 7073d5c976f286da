"""Measurement-free evolution engines.

Four independent routes to the same single-excitation dynamics:

* ``propagate_free`` -- exact matrix exponential of the 3x3 pseudomode
  generator (qubits + damped cavity mode, cavity rotating frame);
* ``superradiant_survival`` -- closed-form survival amplitude of the
  superradiant state for equal detunings (qubit frame);
* ``lindblad_evolve`` -- dissipative 4-level channel simulation, the carrier
  used by the measurement module;
* ``volterra_integrate`` / ``discretized_bath_evolve`` -- brute-force oracles
  (memory-kernel integro-differential solver, discretized reservoir).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import expm_multiply

from . import _backend
from .model import (
    AmplitudeState,
    FullDensity,
    InvalidParameterError,
    LorentzianSpectrum,
    PhysicalParams,
    WrongRegimeError,
)

__all__ = [
    "generator_matrix",
    "propagate_free",
    "superradiant_survival",
    "lindblad_evolve",
    "lindblad_step_count",
    "volterra_integrate",
    "DiscretizedBath",
    "discretized_bath_evolve",
]


def generator_matrix(params: PhysicalParams) -> np.ndarray:
    """3x3 generator M of d/dt (c1, c2, b) in the cavity rotating frame.

    Along any trajectory d/dt(|c1|^2+|c2|^2+|b|^2) = -2*lam*|b|^2.
    """
    g1 = params.r1 * params.rabi_vacuum
    g2 = params.r2 * params.rabi_vacuum
    return np.array(
        [
            [-1j * params.delta1, 0.0, -1j * g1],
            [0.0, -1j * params.delta2, -1j * g2],
            [-1j * g1, -1j * g2, -params.lam],
        ],
        dtype=complex,
    )


def _expm(m: np.ndarray, t: float, gap_tol: float) -> np.ndarray:
    """exp(m*t) by eigendecomposition, scaling-and-squaring if near-degenerate."""
    w, v = np.linalg.eig(m)
    gaps = [abs(w[i] - w[j]) for i in range(len(w)) for j in range(i)]
    if min(gaps) < gap_tol:
        return scipy.linalg.expm(m * t)
    return (v * np.exp(w * t)) @ np.linalg.inv(v)


def propagate_free(params: PhysicalParams, a: AmplitudeState,
                   t: float) -> AmplitudeState:
    """Evolve the amplitude triple for a duration ``t >= 0``."""
    if t < 0:
        raise InvalidParameterError(f"duration must be non-negative, got {t}")
    m = generator_matrix(params)
    u = _expm(m, t, gap_tol=1e-8 * params.lam)
    c1, c2, b = u @ a.as_vector()
    return AmplitudeState(c1=c1, c2=c2, b=b)


def superradiant_survival(params: PhysicalParams, t: float) -> complex:
    """Closed-form superradiant survival amplitude for delta1 == delta2.

    Expressed in the qubit rotating frame: it equals exp(+1j*delta*t) times
    the superradiant component of ``propagate_free``.
    """
    if not params.equal_detunings:
        raise WrongRegimeError(
            "superradiant survival amplitude requires delta1 == delta2 "
            f"(got {params.delta1}, {params.delta2})"
        )
    lam = params.lam
    delta = params.delta1
    omega_r = params.generalized_rabi()
    a = lam - 1j * delta
    omega = cmath.sqrt(lam**2 - omega_r**2 - 2j * delta * lam)
    x = omega * t / 2.0
    if abs(x) < 1e-6:
        # cosh(x) ~ 1 + x^2/2, sinh(x)/x ~ 1 + x^2/6
        bracket = (1.0 + x * x / 2.0) + a * (t / 2.0) * (1.0 + x * x / 6.0)
    else:
        bracket = cmath.cosh(x) + (a / omega) * cmath.sinh(x)
    return cmath.exp(-a * t / 2.0) * bracket


def _hamiltonian4(params: PhysicalParams) -> np.ndarray:
    g1 = params.r1 * params.rabi_vacuum
    g2 = params.r2 * params.rabi_vacuum
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = params.delta1
    h[1, 1] = params.delta2
    h[0, 2] = h[2, 0] = g1
    h[1, 2] = h[2, 1] = g2
    return h


def lindblad_step_count(params: PhysicalParams, t: float) -> int:
    """Number of fixed RK4 steps for a duration ``t``.

    The step obeys dt <= min(1/(50*lam), 1/(50*(Omega_R + lam)), t/20) with a
    factor-two safety margin on top.
    """
    lam = params.lam
    omega_r = params.generalized_rabi(max(abs(params.delta1), abs(params.delta2)))
    dt_max = min(1.0 / (50.0 * lam), 1.0 / (50.0 * (omega_r + lam)), t / 20.0)
    dt_max *= 0.5
    if dt_max <= 0:
        raise InvalidParameterError(
            f"step-size configuration yields dt <= 0 for t = {t}"
        )
    return int(math.ceil(t / dt_max))


def lindblad_evolve(params: PhysicalParams, rho: FullDensity,
                    t: float) -> FullDensity:
    """Evolve the 4-level density matrix for a duration ``t``.

    Coherent block: qubit detunings plus qubit-pseudomode exchange; one decay
    channel empties the pseudomode into the ground slot at rate 2*lam, so the
    amplitude damping rate is lam.
    """
    if t < 0:
        raise InvalidParameterError(f"duration must be non-negative, got {t}")
    if t == 0:
        return rho
    nsteps = lindblad_step_count(params, t)
    out = _backend.lindblad_rk4(
        _hamiltonian4(params), params.lam, rho.matrix, t / nsteps, nsteps
    )
    # re-hermitize roundoff before validation
    out = (out + out.conj().T) / 2.0
    return FullDensity(out)


@dataclass
class VolterraTrajectory:
    """Sampled solution of the memory-kernel equations (cavity frame)."""

    times: np.ndarray
    c1: np.ndarray
    c2: np.ndarray

    def state(self, index: int) -> AmplitudeState:
        """Amplitude snapshot; b reports the derived norm deficit."""
        c1 = self.c1[index]
        c2 = self.c2[index]
        deficit = 1.0 - abs(c1) ** 2 - abs(c2) ** 2
        return AmplitudeState(c1=c1, c2=c2, b=math.sqrt(max(0.0, deficit)))

    def final_state(self) -> AmplitudeState:
        return self.state(len(self.times) - 1)


def volterra_integrate(params: PhysicalParams, init: AmplitudeState,
                       t_max: float, dt: float) -> VolterraTrajectory:
    """Trapezoidal solver for the amplitude integro-differential equations.

    Second-order accurate in ``dt``; requires dt <= 1/(100*lam).  The kernel
    is the Lorentzian memory kernel, and the returned amplitudes are converted
    to the cavity rotating frame (matching ``propagate_free``).
    """
    if dt > 1.0 / (100.0 * params.lam):
        raise InvalidParameterError(
            f"dt = {dt} exceeds the resolution bound 1/(100*lam) = "
            f"{1.0 / (100.0 * params.lam)}"
        )
    if abs(init.b) > 0:
        raise InvalidParameterError(
            "volterra solver tracks only the qubit amplitudes; start from b = 0"
        )
    nsteps = int(round(t_max / dt))
    traj = _backend.volterra_run(
        np.array([init.c1, init.c2], dtype=complex),
        params.delta1,
        params.delta2,
        params.lam,
        params.rabi_vacuum,
        params.r1,
        params.r2,
        dt,
        nsteps,
    )
    times = dt * np.arange(nsteps + 1)
    # qubit interaction picture -> cavity frame
    c1 = traj[:, 0] * np.exp(-1j * params.delta1 * times)
    c2 = traj[:, 1] * np.exp(-1j * params.delta2 * times)
    return VolterraTrajectory(times=times, c1=c1, c2=c2)


@dataclass(frozen=True)
class DiscretizedBath:
    """Uniform frequency grid over the Lorentzian reservoir window.

    ``window`` is the half-width of the grid in units of the spectral
    half-width.  Couplings are g_k = sqrt(J(omega_k) * domega), so the summed
    squared coupling tends to the full spectral weight as the grid refines.
    """

    n_modes: int
    window: float

    def __post_init__(self):
        if self.n_modes < 100:
            raise InvalidParameterError(
                f"need at least 100 modes, got {self.n_modes}"
            )
        if self.window < 10.0:
            raise InvalidParameterError(
                f"window must cover at least 10 half-widths, got {self.window}"
            )

    def frequencies(self, lam: float) -> np.ndarray:
        return np.linspace(-self.window * lam, self.window * lam, self.n_modes)

    def couplings(self, spectrum: LorentzianSpectrum) -> np.ndarray:
        omega = self.frequencies(spectrum.lam)
        domega = omega[1] - omega[0]
        return np.sqrt(spectrum.density(omega) * domega)


def discretized_bath_evolve(params: PhysicalParams, bath: DiscretizedBath,
                            init: AmplitudeState, t: float
                            ) -> tuple[complex, complex, np.ndarray]:
    """Unitary single-excitation evolution over the discretized reservoir.

    Returns (c1, c2, mode amplitudes) at time ``t``; total norm is conserved
    to machine precision (Krylov evaluation of the matrix exponential).
    """
    spectrum = LorentzianSpectrum.from_params(params)
    omega = bath.frequencies(params.lam)
    g = bath.couplings(spectrum)
    n = bath.n_modes

    diag = np.concatenate(([params.delta1, params.delta2], omega))
    rows = np.concatenate((np.zeros(n, dtype=int), np.ones(n, dtype=int)))
    cols = np.concatenate((np.arange(2, n + 2), np.arange(2, n + 2)))
    vals = np.concatenate((params.r1 * g, params.r2 * g))
    h = scipy.sparse.coo_matrix(
        (
            np.concatenate((diag, vals, vals)),
            (
                np.concatenate((np.arange(n + 2), rows, cols)),
                np.concatenate((np.arange(n + 2), cols, rows)),
            ),
        ),
        shape=(n + 2, n + 2),
    ).tocsr()

    psi0 = np.zeros(n + 2, dtype=complex)
    psi0[0] = init.c1
    psi0[1] = init.c2
    psi = expm_multiply(-1j * h * t, psi0)
    return psi[0], psi[1], psi[2:]
