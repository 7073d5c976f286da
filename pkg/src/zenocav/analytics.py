"""Perturbative layer for frequently measured dynamics.

The single-interval amplitude change is governed by overlap integrals of the
reservoir spectrum with two form factors (a diagonal trapping one and a cross
transfer one).  Every overlap integral has two independent evaluations: an
adaptive frequency-domain quadrature and a closed form obtained from the
exponential memory kernel of the Lorentzian spectrum; the two are required to
agree, so the layer is self-checking.

Frequencies are measured from the spectral center, so the qubit frequencies
entering the form factors are the detunings.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .measurement import EvolutionMatrix
from .model import (
    AmplitudeState,
    InitialState,
    InvalidParameterError,
    LorentzianSpectrum,
    PhysicalParams,
    WrongRegimeError,
    build_initial,
)

__all__ = [
    "QuadratureError",
    "FormFactorEval",
    "ZenoRates",
    "form_factor_diag",
    "form_factor_cross",
    "zeno_rates",
    "perturbative_E",
    "epsilon_transfer",
    "survival_modulus_approx",
    "concurrence_approx",
    "markov_rate",
]

DUAL_EVAL_RTOL = 1e-7
PERTURBATIVE_VALIDITY = 1.0  # advisory bound on lam*T


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge or disagrees with the closed form."""


def _expm1c(u: complex) -> complex:
    """(exp(i*u) - 1) / u, series near zero (accurate to ~1e-12 at the switch)."""
    if abs(u) < 1e-4:
        iu = 1j * u
        return 1j * (1.0 + iu / 2.0 + iu**2 / 6.0 + iu**3 / 24.0 + iu**4 / 120.0)
    return (cmath.exp(1j * u) - 1.0) / u


def _expm1c_prime(u: complex) -> complex:
    """Derivative of _expm1c."""
    if abs(u) < 1e-3:
        iu = 1j * u
        return 1j * (1j / 2.0 + iu * 1j / 3.0 + iu**2 * 1j / 8.0
                     + iu**3 * 1j / 30.0)
    return (1j * u * cmath.exp(1j * u) - cmath.exp(1j * u) + 1.0) / u**2


def form_factor_diag(omega: float, omega_j: float, t: float) -> complex:
    """Trapping form factor: (1 - e^{i x T} + i x T) / x^2 with x = omega_j - omega."""
    if not t > 0:
        raise InvalidParameterError(f"T must be positive, got {t}")
    x = omega_j - omega
    # inside this radius the direct expression loses ~eps/x^2 to cancellation
    # while the quartic series is still accurate to ~1e-15 * T^2
    if abs(x) < 1e-3 / t:
        u = x * t
        # T^2 * sum_{n>=2} -(iu)^{n-2} i^2 ... leading terms of the entire series
        return t * t * (0.5 + 1j * u / 6.0 - u * u / 24.0 - 1j * u**3 / 120.0)
    return (1.0 - cmath.exp(1j * x * t) + 1j * x * t) / x**2


def form_factor_cross(omega: float, omega_j: float, omega_i: float,
                      t: float) -> complex:
    """Transfer form factor; continuous limit onto the diagonal one.

    Written as a divided difference T^2 * [E(aT) - E(dT)] / (bT) with
    E(u) = (1 - e^{iu})/u, a = omega_j - omega, b = omega_i - omega and
    d = omega_j - omega_i = a - b, which keeps all the removable
    singularities finite.
    """
    if not t > 0:
        raise InvalidParameterError(f"T must be positive, got {t}")
    a = (omega_j - omega) * t
    b = (omega_i - omega) * t
    d = a - b
    if abs(b) < 1e-6 * max(1.0, abs(a), abs(d)):
        mid = (a + d) / 2.0
        return -t * t * _expm1c_prime(mid)
    return -t * t * (_expm1c(a) - _expm1c(d)) / b


@dataclass(frozen=True)
class FormFactorEval:
    """Both form factors at one (omega, T) point."""

    omega: float
    omega_j: float
    omega_i: float
    t: float
    diag: complex
    cross: complex

    @classmethod
    def at(cls, omega: float, omega_j: float, omega_i: float,
           t: float) -> "FormFactorEval":
        return cls(
            omega=omega,
            omega_j=omega_j,
            omega_i=omega_i,
            t=t,
            diag=form_factor_diag(omega, omega_j, t),
            cross=form_factor_cross(omega, omega_j, omega_i, t),
        )


@dataclass(frozen=True)
class ZenoRates:
    """Effective decay rate and phase rate under measurements at interval T."""

    gamma: float
    phase_rate: float
    interval: float

    def __post_init__(self):
        if self.gamma < -1e-12:
            raise InvalidParameterError(
                f"effective decay rate must be non-negative, got {self.gamma}"
            )
        object.__setattr__(self, "gamma", max(0.0, self.gamma))


# ---------------------------------------------------------------------------
# overlap integrals: closed forms from the exponential memory kernel


def _overlap_diag_closed(spectrum: LorentzianSpectrum, delta_j: float,
                         t: float) -> complex:
    """integral J(omega) F_jj(omega, T) domega over the full line."""
    a = (1j * delta_j - spectrum.lam) * t
    if abs(a) < 1e-4:
        core = 0.5 + a / 6.0 + a * a / 24.0 + a**3 / 120.0
    else:
        core = (cmath.exp(a) - 1.0 - a) / (a * a)
    return spectrum.coupling**2 * t * t * core


def _phi1(x: complex) -> complex:
    if abs(x) < 1e-4:
        return 1.0 + x / 2.0 + x * x / 6.0 + x**3 / 24.0
    return (cmath.exp(x) - 1.0) / x


def _overlap_cross_closed(spectrum: LorentzianSpectrum, delta_j: float,
                          delta_i: float, t: float) -> complex:
    """integral J(omega) F_ji(omega, T) domega over the full line."""
    a_j = (1j * delta_j - spectrum.lam) * t
    a_i = 1j * delta_i - spectrum.lam
    d = 1j * (delta_j - delta_i) * t
    return spectrum.coupling**2 * (t / a_i) * (_phi1(a_j) - _phi1(d))


def _overlap_quad(spectrum: LorentzianSpectrum, ff, smooth, osc,
                  poles: list[float], t: float, rtol: float = 1e-8,
                  scale: float = 1.0) -> complex:
    """Adaptive quadrature of J * form-factor over the full frequency line.

    Either form factor splits into an algebraic part and an oscillation,
    ff(omega) = smooth(omega) + osc(omega) * exp(-i*omega*T), with smooth and
    osc regular outside a window around the poles.  The central window uses the
    combined expression (where the split would be singular); the tails use the
    split, integrating the algebraic part to infinity directly and the
    oscillatory part with Fourier-weighted quadrature.
    """
    epsabs = max(0.02 * rtol * scale, 1e-16)
    pmax = max((abs(p) for p in poles), default=0.0)
    window = max(50.0 * spectrum.lam, 3.0 * pmax + 10.0 * spectrum.lam)
    pts = sorted({0.0, *poles})

    def run(f, *args, **kw):
        try:
            val, _ = quad(f, *args, epsabs=epsabs, epsrel=rtol, **kw)
        except IntegrationWarning as exc:
            raise QuadratureError(
                f"quadrature did not converge to rtol {rtol}: {exc}"
            ) from exc
        return val

    def g(omega):
        return spectrum.density(omega) * osc(omega)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        total = 0j
        for part, f in (
            (1.0, lambda w: (spectrum.density(w) * ff(w)).real),
            (1j, lambda w: (spectrum.density(w) * ff(w)).imag),
        ):
            total += part * run(f, -window, window, points=pts, limit=2000)
        for part, f in (
            (1.0, lambda w: (spectrum.density(w) * smooth(w)).real),
            (1j, lambda w: (spectrum.density(w) * smooth(w)).imag),
        ):
            total += part * (run(f, window, np.inf, limit=400)
                             + run(f, -np.inf, -window, limit=400))
        # right tail of osc * exp(-i*omega*t): (gr + i gi)(cos - i sin)
        rc = run(lambda w: g(w).real, window, np.inf, weight="cos", wvar=t)
        rs = run(lambda w: g(w).real, window, np.inf, weight="sin", wvar=t)
        ic = run(lambda w: g(w).imag, window, np.inf, weight="cos", wvar=t)
        isn = run(lambda w: g(w).imag, window, np.inf, weight="sin", wvar=t)
        total += complex(rc + isn, ic - rs)
        # left tail via omega -> -u: (Gr + i Gi)(cos + i sin), G(u) = g(-u)
        lc = run(lambda u: g(-u).real, window, np.inf, weight="cos", wvar=t)
        ls = run(lambda u: g(-u).real, window, np.inf, weight="sin", wvar=t)
        mc = run(lambda u: g(-u).imag, window, np.inf, weight="cos", wvar=t)
        ms = run(lambda u: g(-u).imag, window, np.inf, weight="sin", wvar=t)
        total += complex(lc - ms, mc + ls)
    return total


def _dual_eval(closed: complex, quad_val: complex, label: str) -> None:
    scale = max(abs(closed), abs(quad_val))
    if scale > 0 and abs(closed - quad_val) > DUAL_EVAL_RTOL * scale:
        raise QuadratureError(
            f"{label}: closed form {closed} and quadrature {quad_val} "
            f"disagree beyond relative {DUAL_EVAL_RTOL}"
        )


def overlap_diag(spectrum: LorentzianSpectrum, delta_j: float, t: float,
                 check: bool = True) -> complex:
    closed = _overlap_diag_closed(spectrum, delta_j, t)
    if check:
        phase = cmath.exp(1j * delta_j * t)
        q = _overlap_quad(
            spectrum,
            lambda w: form_factor_diag(w, delta_j, t),
            lambda w: (1.0 + 1j * (delta_j - w) * t) / (delta_j - w) ** 2,
            lambda w: -phase / (delta_j - w) ** 2,
            [delta_j],
            t,
            scale=abs(closed),
        )
        _dual_eval(closed, q, "diagonal overlap integral")
    return closed


def overlap_cross(spectrum: LorentzianSpectrum, delta_j: float, delta_i: float,
                  t: float, check: bool = True) -> complex:
    closed = _overlap_cross_closed(spectrum, delta_j, delta_i, t)
    if check:
        phase = cmath.exp(1j * delta_j * t)
        e1_d = -_expm1c((delta_j - delta_i) * t)

        def smooth(w):
            a = (delta_j - w) * t
            b = (delta_i - w) * t
            return t * t * (1.0 / a - e1_d) / b

        def osc(w):
            a = (delta_j - w) * t
            b = (delta_i - w) * t
            return -t * t * phase / (a * b)

        q = _overlap_quad(
            spectrum,
            lambda w: form_factor_cross(w, delta_j, delta_i, t),
            smooth,
            osc,
            [delta_j, delta_i],
            t,
            scale=abs(closed),
        )
        _dual_eval(closed, q, "cross overlap integral")
    return closed


def _weight(params: PhysicalParams, j: int) -> float:
    if j not in (1, 2):
        raise InvalidParameterError(f"qubit index must be 1 or 2, got {j}")
    return params.r1 if j == 1 else params.r2


def _detuning(params: PhysicalParams, j: int) -> float:
    return params.delta1 if j == 1 else params.delta2


def zeno_rates(spectrum: LorentzianSpectrum, params: PhysicalParams, j: int,
               t: float, check: bool = True) -> ZenoRates:
    """Effective decay and phase rates of qubit ``j`` for interval ``t``.

    gamma = (alpha_j^2 T / 2) * integral J(omega) sinc^2((delta_j-omega)T/2);
    the coupling weight alpha_j^2 is included so that exp(-(gamma + i*phase)*T)
    is exactly the perturbative diagonal evolution-matrix entry.
    """
    if not t > 0:
        raise InvalidParameterError(f"T must be positive, got {t}")
    alpha_sq = _weight(params, j) ** 2
    overlap = overlap_diag(spectrum, _detuning(params, j), t, check=check)
    return ZenoRates(
        gamma=alpha_sq * overlap.real / t,
        phase_rate=alpha_sq * overlap.imag / t,
        interval=t,
    )


def perturbative_E(spectrum: LorentzianSpectrum, params: PhysicalParams,
                   t: float, check: bool = True) -> EvolutionMatrix:
    """Short-interval evolution matrix from the overlap integrals.

    Diagonal entries are exponentiated first-order results; off-diagonals are
    the plain transfer integrals.  Validity (lam*T <= 1) is advisory only.
    """
    if not t > 0:
        raise InvalidParameterError(f"T must be positive, got {t}")
    d1, d2 = params.delta1, params.delta2
    e11 = cmath.exp(-params.r1**2 * overlap_diag(spectrum, d1, t, check=check))
    e22 = cmath.exp(-params.r2**2 * overlap_diag(spectrum, d2, t, check=check))
    w12 = params.r1 * params.r2
    e12 = -w12 * overlap_cross(spectrum, d1, d2, t, check=check)
    e21 = -w12 * overlap_cross(spectrum, d2, d1, t, check=check)
    return EvolutionMatrix(np.array([[e11, e12], [e21, e22]], dtype=complex))


def epsilon_transfer(rates_j: ZenoRates, rates_i: ZenoRates, e_jj: complex,
                     t: float, equal_freq: bool) -> complex:
    """Transfer kernel accumulating the cross contribution over t = N*T."""
    if t < 0:
        raise InvalidParameterError(f"t must be non-negative, got {t}")
    if equal_freq:
        return t / e_jj
    exponent = complex(
        rates_j.gamma - rates_i.gamma,
        rates_j.phase_rate - rates_i.phase_rate,
    ) * t
    if abs(exponent) < 1e-8:
        return complex(t)
    return t * (cmath.exp(exponent) - 1.0) / exponent


def _round_measurements(t: float, interval: float) -> tuple[int, float]:
    n = max(0, int(round(t / interval)))
    if abs(t - n * interval) > 1e-9 * max(1.0, abs(t)):
        warnings.warn(
            f"t = {t} is not an integer multiple of T = {interval}; "
            f"using N = {n} (t = {n * interval})",
            stacklevel=3,
        )
    return n, n * interval


def survival_modulus_approx(params: PhysicalParams, init: InitialState,
                            interval: float, t: float,
                            check: bool = False) -> tuple[float, float]:
    """Approximate |c1|, |c2| after N = t/T measurements.

    |c_j| = exp(-gamma_jj t) |c_j0 + (E_ji/T) * eps_ji * c_i0|, combining the
    trapping envelope with the excitation-transfer kernel.
    """
    if params.lam * interval > PERTURBATIVE_VALIDITY:
        warnings.warn(
            f"lam*T = {params.lam * interval:.3g} exceeds the perturbative "
            "validity heuristic (<= 1); treat the result as qualitative",
            stacklevel=2,
        )
    _, t_eff = _round_measurements(t, interval)
    spectrum = LorentzianSpectrum.from_params(params)
    rates = {j: zeno_rates(spectrum, params, j, interval, check=check)
             for j in (1, 2)}
    e = perturbative_E(spectrum, params, interval, check=check).matrix
    equal = params.equal_detunings
    c0 = build_initial(init)
    amps = {1: c0.c1, 2: c0.c2}
    out = []
    for j, i in ((1, 2), (2, 1)):
        eps = epsilon_transfer(
            rates[j], rates[i], e[j - 1, j - 1], t_eff, equal_freq=equal
        )
        inner = amps[j] + (e[j - 1, i - 1] / interval) * eps * amps[i]
        out.append(math.exp(-rates[j].gamma * t_eff) * abs(inner))
    return out[0], out[1]


def concurrence_approx(params: PhysicalParams, init: InitialState,
                       interval: float, t: float,
                       check: bool = False) -> float:
    """Bad-cavity concurrence (equal to the discord) under measurements.

    Valid for r1 = r2 and delta1 = +/- delta2; interference between trapping
    and transfer enters through theta_12 = arg(E_12(T) * c_20).
    """
    if abs(params.r1 - params.r2) > 1e-9:
        raise WrongRegimeError(
            f"requires r1 = r2, got r1 = {params.r1}, r2 = {params.r2}"
        )
    if abs(abs(params.delta1) - abs(params.delta2)) > 1e-9:
        raise WrongRegimeError(
            "requires delta1 = +/- delta2, got "
            f"{params.delta1}, {params.delta2}"
        )
    _, t_eff = _round_measurements(t, interval)
    spectrum = LorentzianSpectrum.from_params(params)
    gamma11 = zeno_rates(spectrum, params, 1, interval, check=check).gamma
    e12 = perturbative_E(spectrum, params, interval, check=check).matrix[0, 1]
    c0 = build_initial(init)
    c10 = abs(c0.c1)
    c20 = abs(c0.c2)
    theta12 = cmath.phase(e12 * c0.c2)
    bracket = c10**2 + 2.0 * c10 * c20 * abs(e12 / interval) * t_eff * math.cos(
        theta12
    )
    value = 2.0 * bracket * math.exp(-2.0 * gamma11 * t_eff)
    return min(1.0, max(0.0, value))


def markov_rate(spectrum: LorentzianSpectrum, params: PhysicalParams,
                j: int) -> float:
    """Long-interval asymptote of the effective decay rate: pi*alpha_j^2*J(delta_j)."""
    alpha_sq = _weight(params, j) ** 2
    return float(math.pi * alpha_sq * spectrum.density(_detuning(params, j)))
