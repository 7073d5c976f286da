"""Shared presets and independent numerical oracles for the test suite.

The oracle helpers here deliberately avoid the library's own vectorized
implementations: they build dense matrices and use plain eigendecompositions
so that agreement with the library is meaningful evidence.
"""

import math

import numpy as np
import pytest

from zenocav.model import InitialState, PhysicalParams, XStateDensity

ISQ2 = 1.0 / math.sqrt(2.0)


@pytest.fixture
def p_equal():
    """Equal detunings, bad cavity: delta1 = delta2 = 2, R = 0.1."""
    return PhysicalParams(rabi_vacuum=0.1, r1=ISQ2, delta1=2.0, delta2=2.0)


@pytest.fixture
def p_sym():
    """Symmetric detunings: delta1 = -delta2 = 2, R = 0.1."""
    return PhysicalParams(rabi_vacuum=0.1, r1=ISQ2, delta1=2.0, delta2=-2.0)


@pytest.fixture
def p_resonant():
    return PhysicalParams(rabi_vacuum=0.1, r1=ISQ2, delta1=0.0, delta2=0.0)


@pytest.fixture
def init0():
    return InitialState(s=0.0, phi=0.0)


@pytest.fixture
def init_pi():
    return InitialState(s=0.0, phi=math.pi)


def entropy_bits(rho: np.ndarray) -> float:
    """Dense eigendecomposition entropy oracle (bits)."""
    vals = np.clip(np.linalg.eigvalsh(np.asarray(rho, dtype=complex)), 0.0, 1.0)
    return float(-sum(v * math.log2(v) for v in vals if v > 1e-300))


def conditional_value_oracle(x: XStateDensity, theta: float,
                             phi: float) -> float:
    """S(rho_1) - S(rho | measurement of qubit 2 along (theta, phi)).

    Explicit 4x4 density matrix and kron-built projectors; independent of
    the library's vectorized conditional-entropy code.
    """
    rho = x.as_matrix()
    rho1 = np.array([[x.p00 + x.p01, 0.0], [0.0, x.p10]], dtype=complex)
    # |a> = cos(theta)|1> + e^{i phi} sin(theta)|0>, coefficients on (|0>,|1>)
    a = np.array([math.sin(theta) * np.exp(1j * phi), math.cos(theta)])
    b = np.array([-math.cos(theta) * np.exp(1j * phi), math.sin(theta)])
    cond = 0.0
    for v in (a, b):
        proj = np.kron(np.eye(2), np.outer(v, v.conj()))
        sub = proj @ rho @ proj
        p = float(np.trace(sub).real)
        if p > 1e-14:
            cond += p * entropy_bits(sub / p)
    return entropy_bits(rho1) - cond


def classical_sup_oracle(x: XStateDensity, n_theta: int = 181) -> float:
    """Dense-scan supremum of the conditional value over measurements."""
    thetas = np.linspace(0.0, math.pi / 2.0, n_theta)
    vals = [conditional_value_oracle(x, th, 0.0) for th in thetas]
    i = int(np.argmax(vals))
    best = vals[i]
    lo = thetas[max(0, i - 1)]
    hi = thetas[min(n_theta - 1, i + 1)]
    for th in np.linspace(lo, hi, 101):
        best = max(best, conditional_value_oracle(x, th, 0.0))
    return best


def random_pure_branch(rng: np.random.Generator) -> XStateDensity:
    """Random rank-one-excited-block state with full coherence."""
    p10, p01, _ = rng.dirichlet((1.0, 1.0, 1.0))
    chi = rng.uniform(0.0, 2.0 * math.pi)
    return XStateDensity(
        p00=1.0 - p10 - p01, p01=p01, p10=p10,
        z=math.sqrt(p10 * p01) * np.exp(1j * chi),
    )
