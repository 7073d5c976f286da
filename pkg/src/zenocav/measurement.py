"""Nonselective projective measurements and measurement-interrupted evolution.

The channel keeps the unread mixture of the two outcomes: projection onto the
collective ground state (with or without a photon) and projection onto the
one-excitation qubit subspace.  Four routes to the post-measurement survival
amplitudes are exposed so their mutual discrepancies are measurable: the exact
channel composition, the plain matrix power of the single-interval evolution
matrix, the coarse-grained correction series, and its bad-cavity truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics
from .model import (
    AmplitudeState,
    FullDensity,
    InitialState,
    InvalidParameterError,
    PhysicalParams,
    XStateDensity,
    build_initial,
)

__all__ = [
    "EvolutionMatrix",
    "MeasurementSchedule",
    "nonselective_measure",
    "measured_evolution_exact",
    "evolution_matrix",
    "coarse_grained_series",
    "coarse_grained_badcavity",
    "survival_amplitudes_N",
]

# geometric ratios this close to 1 use the analytic degenerate branch
RATIO_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class EvolutionMatrix:
    """2x2 complex map on the excited-qubit subspace amplitudes."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidParameterError(f"expected a 2x2 matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def validate(self) -> None:
        """Check the no-gain bound (spectral radius <= 1 + 1e-9)."""
        radius = max(abs(np.linalg.eigvals(self.matrix)))
        if radius > 1.0 + 1e-9:
            raise InvalidParameterError(
                f"evolution matrix has spectral radius {radius} > 1"
            )

    def apply(self, c1: complex, c2: complex) -> tuple[complex, complex]:
        out = self.matrix @ np.array([c1, c2], dtype=complex)
        return complex(out[0]), complex(out[1])

    def power(self, n: int) -> "EvolutionMatrix":
        return EvolutionMatrix(np.linalg.matrix_power(self.matrix, n))


@dataclass(frozen=True)
class MeasurementSchedule:
    """N instantaneous ideal measurements at time intervals T (total t = N*T)."""

    interval: float
    count: int

    def __post_init__(self):
        if not self.interval > 0:
            raise InvalidParameterError(
                f"measurement interval must be positive, got {self.interval}"
            )
        if self.count < 0:
            raise InvalidParameterError(
                f"measurement count must be non-negative, got {self.count}"
            )

    @property
    def total_time(self) -> float:
        return self.count * self.interval


def nonselective_measure(rho: FullDensity) -> FullDensity:
    """Apply Pi1 rho Pi1 + Pi0 rho Pi0 (Pi1 spans the excited-qubit slots).

    Exactly zeroes the cross-block coherences; trace is preserved exactly and
    the map is idempotent.
    """
    m = rho.matrix.copy()
    m[0:2, 2:4] = 0.0
    m[2:4, 0:2] = 0.0
    return FullDensity(m, check=False)


def measured_evolution_exact(params: PhysicalParams, init: InitialState,
                             sched: MeasurementSchedule
                             ) -> list[XStateDensity]:
    """Exact channel: [evolve for T; measure] iterated N times.

    Returns the reduced two-qubit state at t = k*T for k = 0..N.  Unlike the
    pure-state idealization, the photon branch kept by the measurement can be
    reabsorbed during later intervals.
    """
    rho = FullDensity.from_amplitudes(build_initial(init))
    states = [rho.reduce_to_xstate()]
    for _ in range(sched.count):
        rho = dynamics.lindblad_evolve(params, rho, sched.interval)
        rho = nonselective_measure(rho)
        states.append(rho.reduce_to_xstate())
    return states


def evolution_matrix(params: PhysicalParams, interval: float) -> EvolutionMatrix:
    """Single-interval amplitude map: the qubit block of the 3x3 propagator.

    The surviving branch of a measurement resets the pseudomode amplitude to
    zero, so the qubit block alone carries the inter-measurement evolution.
    """
    if not interval > 0:
        raise InvalidParameterError(
            f"interval must be positive, got {interval}"
        )
    m = dynamics.generator_matrix(params)
    u = dynamics._expm(m, interval, gap_tol=1e-8 * params.lam)
    e = EvolutionMatrix(u[0:2, 0:2].copy())
    e.validate()
    return e


def _kahan_sum(terms) -> complex:
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for term in terms:
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _geometric_weighted(ratio: complex, weights) -> complex:
    """Compensated sum of weights[k] * ratio**k."""
    powers = []
    p = 1.0 + 0.0j
    for w in weights:
        powers.append(w * p)
        p *= ratio
    return _kahan_sum(powers)


def _series_pair(e: np.ndarray, n: int, j: int, i: int) -> tuple[complex, complex]:
    """Coarse-grained (diagonal jj, off-diagonal ji) entries after n measurements."""
    ejj = e[j, j]
    eii = e[i, i]
    eji = e[j, i]
    eij = e[i, j]
    ratio = eii / ejj
    diag = ejj**n
    if n >= 2:
        corr = _geometric_weighted(ratio, [n - 1 - k for k in range(n - 1)])
        diag *= 1.0 + (eji * eij / ejj**2) * corr
    first = _geometric_weighted(ratio, [1.0] * n)
    off = ejj**n * (eji / ejj) * first
    if n >= 3:
        second = _geometric_weighted(
            ratio, [(k + 1) * (n - k) for k in range(n - 2)]
        )
        off += ejj**n * (eji**2 * eij / ejj**3) * second
    return diag, off


def coarse_grained_series(e: EvolutionMatrix, n: int) -> EvolutionMatrix:
    """Heaviside-gated correction series for the N-measurement evolution matrix.

    Reduces to ``e`` at N = 1; for diagonal ``e`` it is the plain entrywise
    power.  The deviation from the exact matrix power is cubic in the
    off-diagonal scale.
    """
    if n < 1:
        raise InvalidParameterError(f"need at least one measurement, got {n}")
    m = e.matrix
    d11, o12 = _series_pair(m, n, 0, 1)
    d22, o21 = _series_pair(m, n, 1, 0)
    return EvolutionMatrix(np.array([[d11, o12], [o21, d22]], dtype=complex))


def coarse_grained_badcavity(e: EvolutionMatrix, n: int) -> EvolutionMatrix:
    """Bad-cavity truncation: plain diagonal powers, first-order transfer term."""
    if n < 1:
        raise InvalidParameterError(f"need at least one measurement, got {n}")
    m = e.matrix
    out = np.zeros((2, 2), dtype=complex)
    for j, i in ((0, 1), (1, 0)):
        ejj = m[j, j]
        ratio = m[i, i] / ejj
        out[j, j] = ejj**n
        if abs(ratio - 1.0) < RATIO_DEGENERACY_TOL:
            geom = complex(n)
        else:
            geom = (ratio**n - 1.0) / (ratio - 1.0)
        out[j, i] = ejj**n * (m[j, i] / ejj) * geom
    return EvolutionMatrix(out)


def survival_amplitudes_N(params: PhysicalParams, init: InitialState,
                          sched: MeasurementSchedule, method: str = "exact"):
    """Post-measurement survival data at t = N*T.

    ``exact`` returns the reduced XStateDensity from the channel simulation;
    ``power``, ``series`` and ``badcavity`` return the (c1, c2) amplitude pair
    from the corresponding N-measurement evolution matrix.
    """
    if method == "exact":
        return measured_evolution_exact(params, init, sched)[-1]
    c0 = build_initial(init)
    if sched.count == 0:
        return c0.c1, c0.c2
    e = evolution_matrix(params, sched.interval)
    if method == "power":
        en = e.power(sched.count)
    elif method == "series":
        en = coarse_grained_series(e, sched.count)
    elif method == "badcavity":
        en = coarse_grained_badcavity(e, sched.count)
    else:
        raise InvalidParameterError(
            f"unknown method {method!r}; expected exact, power, series or badcavity"
        )
    return en.apply(c0.c1, c0.c2)
