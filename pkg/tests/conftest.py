import numpy as np
import pytest

from zcsim import build_ensemble


@pytest.fixture(scope="session")
def kac20():
    return build_ensemble("family=kac N=20")


@pytest.fixture(scope="session")
def kac50():
    return build_ensemble("family=kac N=50")


@pytest.fixture(scope="session")
def su2_50():
    return build_ensemble("family=su2 N=50")


@pytest.fixture(scope="session")
def su3_4():
    return build_ensemble("family=su3 N=4")


@pytest.fixture(scope="session")
def arcsine40():
    return build_ensemble("family=onb measure=interval-arcsine N=40")


@pytest.fixture(scope="session")
def torus6():
    return build_ensemble("family=onb measure=torus-2d N=6")


def assert_close(a, b, atol=0.0, rtol=1e-12, msg=""):
    a = np.asarray(a)
    b = np.asarray(b)
    if not np.allclose(a, b, atol=atol, rtol=rtol):
        raise AssertionError(
            f"{msg or 'values differ'}: {a} vs {b} "
            f"(max abs diff {np.max(np.abs(a - b)):.3e})")
