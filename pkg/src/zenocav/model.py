"""Domain types for two qubits coupled to a common lossy-cavity reservoir.

All rates and frequencies are expressed in units of the reservoir half-width
``lam`` (the natural choice is ``lam = 1`` so that times are read as
``tau = lam * t``).  The continuum reservoir is represented by a single
pseudomode amplitude ``b``, which is exact for a Lorentzian spectral density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-8
DENSITY_TOL = 1e-9


class InvalidParameterError(ValueError):
    """A model parameter is outside its admissible range."""


class InconsistentStateError(ValueError):
    """A state object violates a structural invariant (norm, trace, positivity)."""


class WrongRegimeError(ValueError):
    """An operation was invoked outside the parameter regime where it is defined."""


@dataclass(frozen=True)
class PhysicalParams:
    """Reservoir width, vacuum Rabi frequency, relative couplings and detunings.

    ``rabi_vacuum`` is the vacuum Rabi frequency (coupling normalization times
    collective coupling constant); ``r1`` is the relative coupling of qubit 1,
    with ``r2 = sqrt(1 - r1**2)`` so the two squared weights sum to one.
    ``delta1``/``delta2`` are the qubit detunings from the cavity center.
    """

    rabi_vacuum: float
    r1: float
    delta1: float
    delta2: float
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidParameterError(f"lam must be positive, got {self.lam}")
        if self.rabi_vacuum < 0:
            raise InvalidParameterError(
                f"rabi_vacuum must be non-negative, got {self.rabi_vacuum}"
            )
        if not 0.0 <= self.r1 <= 1.0:
            raise InvalidParameterError(f"r1 must lie in [0, 1], got {self.r1}")

    @property
    def r2(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.r1 * self.r1))

    @property
    def rabi_ratio(self) -> float:
        """Vacuum Rabi frequency over reservoir half-width."""
        return self.rabi_vacuum / self.lam

    @property
    def equal_detunings(self) -> bool:
        return self.delta1 == self.delta2

    def generalized_rabi(self, delta: float | None = None) -> float:
        """sqrt(4 rabi**2 + delta**2); defaults to the common detuning."""
        if delta is None:
            if not self.equal_detunings:
                raise WrongRegimeError(
                    "generalized Rabi frequency needs delta1 == delta2 "
                    f"(got {self.delta1}, {self.delta2}) or an explicit delta"
                )
            delta = self.delta1
        return math.sqrt(4.0 * self.rabi_vacuum**2 + delta**2)


@dataclass(frozen=True)
class InitialState:
    """Single-excitation two-qubit initial state: asymmetry ``s`` and phase ``phi``.

    The excited-branch amplitudes are ``c01 = sqrt((1-s)/2)`` on qubit 1 and
    ``c02 = sqrt((1+s)/2) * exp(i*phi)`` on qubit 2.
    """

    s: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.s <= 1.0:
            raise InvalidParameterError(f"s must lie in [-1, 1], got {self.s}")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))

    @property
    def c01(self) -> complex:
        return complex(math.sqrt((1.0 - self.s) / 2.0))

    @property
    def c02(self) -> complex:
        return math.sqrt((1.0 + self.s) / 2.0) * complex(
            math.cos(self.phi), math.sin(self.phi)
        )


@dataclass(frozen=True)
class AmplitudeState:
    """Amplitudes (c1, c2, b) of the single-excitation pure branch.

    ``b`` is the pseudomode amplitude.  The norm deficit
    ``1 - |c1|^2 - |c2|^2 - |b|^2`` is the irreversibly leaked population.
    """

    c1: complex
    c2: complex
    b: complex = 0.0j

    def __post_init__(self):
        if self.deficit < -NORM_TOL:
            raise InconsistentStateError(
                f"amplitude norm exceeds unity by {-self.deficit:.3e}"
            )

    @property
    def norm_sq(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.b) ** 2

    @property
    def deficit(self) -> float:
        return 1.0 - self.norm_sq

    def as_vector(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.b], dtype=complex)


@dataclass(frozen=True)
class XStateDensity:
    """Reduced two-qubit state: populations of |00>, |01>, |10> and one coherence.

    ``z`` is the <10|rho|01> matrix element; the |11> population is identically
    zero in the single-excitation sector.
    """

    p00: float
    p01: float
    p10: float
    z: complex

    def __post_init__(self):
        if abs(self.p00 + self.p01 + self.p10 - 1.0) > DENSITY_TOL:
            raise InconsistentStateError(
                f"populations sum to {self.p00 + self.p01 + self.p10}, not 1"
            )
        if min(self.p00, self.p01, self.p10) < -1e-12:
            raise InconsistentStateError("negative population")
        if abs(self.z) ** 2 > self.p10 * self.p01 + 1e-12:
            raise InconsistentStateError(
                "coherence |z|^2 exceeds p10*p01 (not a valid density matrix)"
            )

    @property
    def pure_branch(self) -> bool:
        """True when the excited block is rank one, |z|^2 = p10 * p01."""
        return abs(abs(self.z) ** 2 - self.p10 * self.p01) <= 1e-9

    def as_matrix(self) -> np.ndarray:
        """4x4 density matrix in the standard basis |00>, |01>, |10>, |11>."""
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = self.p00
        rho[1, 1] = self.p01
        rho[2, 2] = self.p10
        rho[2, 1] = self.z
        rho[1, 2] = np.conj(self.z)
        return rho


class FullDensity:
    """4x4 density matrix over {|10;0>, |01;0>, |00;1_pm>, |00;0>}.

    Exact carrier for the nonselective-measurement mixture: the pseudomode
    excitation (slot 3) and the fully decayed state (slot 4) are kept
    explicitly so photon reabsorption after a measurement is representable.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: np.ndarray, check: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidParameterError(f"expected a 4x4 matrix, got {m.shape}")
        if check:
            if np.max(np.abs(m - m.conj().T)) > DENSITY_TOL:
                raise InconsistentStateError("density matrix is not Hermitian")
            if abs(np.trace(m).real - 1.0) > DENSITY_TOL:
                raise InconsistentStateError(
                    f"trace is {np.trace(m).real}, not 1"
                )
            if np.linalg.eigvalsh((m + m.conj().T) / 2.0).min() < -DENSITY_TOL:
                raise InconsistentStateError("density matrix is not positive")
        self.matrix = m

    @classmethod
    def from_amplitudes(cls, a: AmplitudeState) -> "FullDensity":
        """Pure excited branch plus the leaked population on the ground slot."""
        psi = np.array([a.c1, a.c2, a.b, 0.0], dtype=complex)
        rho = np.outer(psi, psi.conj())
        rho[3, 3] += max(0.0, a.deficit)
        rho /= np.trace(rho).real
        return cls(rho)

    def reduce_to_xstate(self) -> XStateDensity:
        m = self.matrix
        return XStateDensity(
            p00=float((m[2, 2] + m[3, 3]).real),
            p01=float(m[1, 1].real),
            p10=float(m[0, 0].real),
            z=complex(m[0, 1]),
        )

    def __eq__(self, other):
        return isinstance(other, FullDensity) and np.array_equal(
            self.matrix, other.matrix
        )


@dataclass(frozen=True)
class LorentzianSpectrum:
    """Lorentzian reservoir spectral density, centered at the cavity frequency.

    Frequencies are measured from the cavity center (stored as 0 in the
    rotating frame).  ``coupling`` is the normalization with
    integral J = coupling**2; its memory kernel is
    f(t) = coupling**2 * exp(-lam*|t|).
    """

    lam: float
    coupling: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidParameterError(f"lam must be positive, got {self.lam}")
        if self.coupling < 0:
            raise InvalidParameterError("coupling must be non-negative")

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "LorentzianSpectrum":
        # collective coupling absorbed into the normalization, so the
        # qubit weights are just r1, r2
        return cls(lam=params.lam, coupling=params.rabi_vacuum)

    def density(self, omega) -> np.ndarray:
        """J(omega) = (coupling^2/pi) * lam / (omega^2 + lam^2)."""
        omega = np.asarray(omega, dtype=float)
        return (self.coupling**2 / math.pi) * self.lam / (omega**2 + self.lam**2)

    def kernel(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.coupling**2 * np.exp(-self.lam * np.abs(t))


def build_initial(init: InitialState) -> AmplitudeState:
    """Unit-norm amplitude state (c01, c02, 0) from the (s, phi) parameters."""
    return AmplitudeState(c1=init.c01, c2=init.c02, b=0.0j)


def reduce_to_xstate(a: AmplitudeState) -> XStateDensity:
    """Trace out the reservoir from the pure single-excitation branch."""
    if a.deficit < -NORM_TOL:
        raise InconsistentStateError("amplitude norm exceeds unity")
    p10 = abs(a.c1) ** 2
    p01 = abs(a.c2) ** 2
    z = a.c1 * np.conj(a.c2)
    p00 = 1.0 - p10 - p01
    if p00 < 0.0:
        # roundoff pushed the qubit norm a hair above one; renormalize
        scale = 1.0 / (p10 + p01)
        p10 *= scale
        p01 *= scale
        z *= scale
        p00 = 0.0
    return XStateDensity(p00=p00, p01=p01, p10=p10, z=z)
