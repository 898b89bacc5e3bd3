import numpy as np
import pytest

import vortexmoduli as vm


@pytest.fixture(scope="session")
def sextic():
    """y^2 = x^6 - 1: genus 2, branch points at the sixth roots of unity."""
    return vm.new_curve([-1, 0, 0, 0, 0, 0, 1])


@pytest.fixture(scope="session")
def lemniscatic():
    """y^2 = 1 - x^4: genus 1, branch points at the fourth roots of unity."""
    return vm.new_curve([1, 0, 0, 0, -1])


@pytest.fixture(scope="session")
def sextic_cycles(sextic):
    return vm.build_cycles(sextic)


@pytest.fixture(scope="session")
def sextic_periods(sextic, sextic_cycles):
    return vm.compute_periods(sextic, sextic_cycles, tol=1e-11)


@pytest.fixture(scope="session")
def lemniscatic_periods(lemniscatic):
    return vm.compute_periods(lemniscatic, tol=1e-11)


@pytest.fixture(scope="session")
def sextic_aj(sextic, sextic_periods):
    return vm.AbelJacobiMap(sextic, sextic_periods)


def dense_continuation(curve, loop, y_start, factor=10, base=64):
    """Independent continuation oracle: fixed dense stepping, no adaptivity."""
    pts = [complex(z) for z in loop]
    samples = []
    for a, b in zip(pts[:-1], pts[1:]):
        ts = np.linspace(0.0, 1.0, base * factor + 1)[1:]
        samples.append(a + (b - a) * ts)
    values = curve.F(np.concatenate(samples))
    y = y_start
    for v in values:
        cand = complex(np.sqrt(complex(v)))
        y = cand if abs(cand - y) <= abs(-cand - y) else -cand
    return y


def circle_loop(center, radius, n=256):
    ts = np.linspace(0.0, 2.0 * np.pi, n + 1)
    return [complex(center) + radius * np.exp(1j * t) for t in ts]
