import numpy as np
import pytest

from hopflab.space_forms import CH, CP, ModelPoint, normalize, project_horizontal


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_point(space, rng):
    """Random point; for CH^n the first coordinate dominates."""
    z = rng.normal(size=space.n + 1) + 1j * rng.normal(size=space.n + 1)
    if space.c < 0:
        z[0] = (np.linalg.norm(z[1:]) + 1.0 + abs(rng.normal())) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return ModelPoint.from_coords(space, z)


def random_unit_tangent(x, rng):
    w = rng.normal(size=x.space.n + 1) + 1j * rng.normal(size=x.space.n + 1)
    v = project_horizontal(x, w)
    return v * (1.0 / v.norm())


@pytest.fixture(params=[1, -1], ids=["CP", "CH"])
def space(request):
    return CP(2) if request.param > 0 else CH(2)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for key in sorted(results):
            terminalreporter.write_line(results[key])
