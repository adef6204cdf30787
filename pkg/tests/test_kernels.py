import math

import numpy as np
import pytest

from rotorlab import _kernels

BACKENDS = _kernels.available_backends()

pytestmark = pytest.mark.skipif(
    "compiled" not in BACKENDS, reason="compiled kernel not built; nothing to compare"
)


def run_backend(kernel, steps=20000, dt=1e-3, geom=_kernels.GEOM_TORUS,
                pot=_kernels.POT_COSINE_WELL, V0=0.3):
    z0 = np.array([0.9, 0.1, -0.2, 0.35, 1.1, 0.25])
    out = np.empty((steps + 1, 6))
    status, done = kernel.integrate_midpoint(
        geom, 1.0, 3.0, 1.0, 2.0, 1.0, pot, V0, z0, dt, steps, 1e-13, 100, 1e-6, out
    )
    return status, done, out


def test_backends_agree_on_trajectories():
    results = {}
    for name, kernel in BACKENDS.items():
        results[name] = run_backend(kernel)
    s_py, d_py, out_py = results["python"]
    s_c, d_c, out_c = results["compiled"]
    assert s_py == s_c == _kernels.STATUS_OK
    assert d_py == d_c
    assert np.abs(out_py - out_c).max() < 1e-12


def test_backends_agree_on_pole_halt():
    # sphere meridian launch runs into the pole guard at the same step
    z0 = np.array([math.pi / 2, 0.0, 0.0, 0.5, 0.0, 0.0])
    outcome = {}
    for name, kernel in BACKENDS.items():
        out = np.empty((6001, 6))
        outcome[name] = kernel.integrate_midpoint(
            _kernels.GEOM_SPHERE, 1.0, 0.0, 1.0, 2.0, 1.0, _kernels.POT_ZERO, 0.0,
            z0, 1e-3, 6000, 1e-13, 100, 1e-6, out,
        )
    assert outcome["python"] == outcome["compiled"]
    assert outcome["python"][0] == _kernels.STATUS_POLE


def test_selected_backend_constants_consistent():
    for kernel in BACKENDS.values():
        assert (kernel.GEOM_SPHERE, kernel.GEOM_PSEUDOSPHERE, kernel.GEOM_TORUS) == (0, 1, 2)
        assert (kernel.STATUS_OK, kernel.STATUS_POLE, kernel.STATUS_REJECTED) == (0, 1, 2)


def test_compiled_backend_is_faster():
    import time

    timings = {}
    for name, kernel in BACKENDS.items():
        t0 = time.perf_counter()
        run_backend(kernel, steps=50000)
        timings[name] = time.perf_counter() - t0
    assert timings["compiled"] < timings["python"]
