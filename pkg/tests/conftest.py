import numpy as np
import pytest

from quht import density_from_bloch, pure_state


@pytest.fixture(scope="session")
def ket_zero():
    return pure_state([1, 0])


@pytest.fixture(scope="session")
def ket_one():
    return pure_state([0, 1])


@pytest.fixture(scope="session")
def ket_plus():
    return pure_state([2**-0.5, 2**-0.5])


@pytest.fixture(scope="session")
def maximally_mixed():
    return density_from_bloch([0.0, 0.0, 0.0])


@pytest.fixture(scope="session")
def bloch_x08():
    return density_from_bloch([0.8, 0.0, 0.0])


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)
