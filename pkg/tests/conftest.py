import numpy as np
import pytest

from relphase.states import concurrence


def random_density_matrix(rng, rank=None):
    rank = rank or int(rng.integers(1, 5))
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    r = g @ g.conj().T
    return r / np.trace(r).real


def random_entangled(rng, min_c=1e-3):
    while True:
        r = random_density_matrix(rng)
        if concurrence(r) > min_c:
            return r


def random_unit(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bell_diagonal(weights):
    s = 1 / np.sqrt(2)
    basis = np.array([[s, 0, 0, s], [s, 0, 0, -s], [0, s, s, 0], [0, s, -s, 0]], dtype=complex)
    return sum(w * np.outer(b, b.conj()) for w, b in zip(weights, basis))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
