import math
import os
import subprocess
import sys

import numpy as np
import pytest

from zenocav import _backend, _kernels_py
from zenocav.dynamics import lindblad_evolve, volterra_integrate
from zenocav.model import (
    FullDensity,
    InitialState,
    PhysicalParams,
    build_initial,
)

ISQ2 = 1.0 / math.sqrt(2.0)
PARAMS = PhysicalParams(rabi_vacuum=0.5, r1=ISQ2, delta1=2.0, delta2=-2.0)


def _compiled_available():
    try:
        from zenocav import _kernels_cy  # noqa: F401
    except ImportError:
        return False
    return True


class TestSelection:
    def test_backend_name_is_known(self):
        assert _backend.backend_name() in ("cython", "python")

    def test_compiled_backend_active_when_built(self):
        if not _compiled_available():
            pytest.skip("compiled extension not built")
        if os.environ.get("ZENOCAV_PURE_PYTHON"):
            assert _backend.backend_name() == "python"
        else:
            assert _backend.backend_name() == "cython"

    def test_env_override_forces_python_backend(self):
        env = dict(os.environ, ZENOCAV_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from zenocav._backend import backend_name; print(backend_name())"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "python"


@pytest.mark.skipif(not _compiled_available(),
                    reason="compiled extension not built")
class TestCrossBackendAgreement:
    def test_lindblad_rk4_matches(self):
        from zenocav import _kernels_cy

        rng = np.random.default_rng(42)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho0 = a @ a.conj().T
        rho0 /= np.trace(rho0).real
        hm = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hm = 0.5 * (hm + hm.conj().T)
        out_cy = _kernels_cy.lindblad_rk4(hm, 0.7, rho0, 1e-3, 500)
        out_py = _kernels_py.lindblad_rk4(hm, 0.7, rho0, 1e-3, 500)
        np.testing.assert_allclose(out_cy, out_py, atol=1e-12)

    def test_volterra_run_matches(self):
        from zenocav import _kernels_cy

        c0 = np.array([ISQ2, ISQ2 * np.exp(0.3j)], dtype=complex)
        args = (c0, 2.0, -2.0, 1.0, 0.5, ISQ2, ISQ2, 0.01, 300)
        out_cy = _kernels_cy.volterra_run(*args)
        out_py = _kernels_py.volterra_run(*args)
        np.testing.assert_allclose(out_cy, out_py, atol=1e-12)

    def test_high_level_results_identical_across_backends(self, tmp_path):
        # run the same high-level computations in a pure-python subprocess
        # and compare against the in-process (compiled) backend
        rho = FullDensity.from_amplitudes(
            build_initial(InitialState(0.0, 0.0))
        )
        here = lindblad_evolve(PARAMS, rho, 0.8).matrix
        traj = volterra_integrate(
            PARAMS, build_initial(InitialState(0.0, 0.0)),
            t_max=1.0, dt=0.005,
        )
        script = tmp_path / "run_pure.py"
        script.write_text(
            "import numpy as np\n"
            "from zenocav.dynamics import lindblad_evolve, volterra_integrate\n"
            "from zenocav.model import (FullDensity, InitialState,\n"
            "    PhysicalParams, build_initial)\n"
            f"p = PhysicalParams(rabi_vacuum=0.5, r1={ISQ2!r},\n"
            "    delta1=2.0, delta2=-2.0)\n"
            "rho = FullDensity.from_amplitudes(\n"
            "    build_initial(InitialState(0.0, 0.0)))\n"
            "m = lindblad_evolve(p, rho, 0.8).matrix\n"
            "t = volterra_integrate(p, build_initial(InitialState(0.0, 0.0)),\n"
            "    t_max=1.0, dt=0.005)\n"
            "np.savez('out.npz', m=m, c1=t.c1, c2=t.c2)\n"
        )
        env = dict(os.environ, ZENOCAV_PURE_PYTHON="1")
        subprocess.run(
            [sys.executable, str(script)], cwd=tmp_path, env=env, check=True,
        )
        data = np.load(tmp_path / "out.npz")
        np.testing.assert_allclose(data["m"], here, atol=1e-12)
        np.testing.assert_allclose(data["c1"], traj.c1, atol=1e-12)
        np.testing.assert_allclose(data["c2"], traj.c2, atol=1e-12)


class TestPurePythonKernelContracts:
    def test_volterra_instability_detector(self):
        c0 = np.array([ISQ2, ISQ2], dtype=complex)
        with pytest.raises(RuntimeError, match="reduce dt"):
            _kernels_py.volterra_run(
                c0, 2.0, -2.0, 1.0, 20.0, ISQ2, ISQ2, 0.5, 200
            )

    def test_lindblad_zero_steps_is_identity(self):
        rho = np.diag([0.25, 0.25, 0.25, 0.25]).astype(complex)
        out = _kernels_py.lindblad_rk4(np.zeros((4, 4)), 1.0, rho, 0.01, 0)
        np.testing.assert_allclose(out, rho)
