import numpy as np
import pytest

from cpfix import KrausFamily

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
E11 = np.diag([1.0, 0.0]).astype(complex)
E22 = np.diag([0.0, 1.0]).astype(complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def random_hermitian(dim, rng, scale=1.0):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (z + z.conj().T) / 2.0


def random_complex(dim, rng):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_contractive_family(dim, n_terms, rng):
    """Random family rescaled so sum x*x <= I (top eigenvalue exactly 1)."""
    ops = [random_complex(dim, rng) for _ in range(n_terms)]
    col = sum(x.conj().T @ x for x in ops)
    top = float(np.linalg.eigvalsh((col + col.conj().T) / 2.0)[-1])
    return KrausFamily.from_operators([x / np.sqrt(top) for x in ops])


def random_unital_family(dim, n_terms, rng):
    """Random family column-normalized so sum x*x = I exactly."""
    ops = [random_complex(dim, rng) for _ in range(n_terms)]
    col = sum(x.conj().T @ x for x in ops)
    w, v = np.linalg.eigh((col + col.conj().T) / 2.0)
    inv_root = (v * w**-0.5) @ v.conj().T
    return KrausFamily.from_operators([x @ inv_root for x in ops])


def random_subunital_dual_family(dim, n_terms, rng):
    """Random family row-scaled so sum x x* <= I."""
    ops = [random_complex(dim, rng) for _ in range(n_terms)]
    row = sum(x @ x.conj().T for x in ops)
    top = float(np.linalg.eigvalsh((row + row.conj().T) / 2.0)[-1])
    return KrausFamily.from_operators([x / np.sqrt(top) for x in ops])


@pytest.fixture
def lueders():
    return KrausFamily.from_operators([E11, E22])


@pytest.fixture
def identity_channel():
    return KrausFamily.from_operators([np.eye(2, dtype=complex)])


@pytest.fixture
def mixture():
    """Bistochastic self-adjoint pair {I/sqrt2, sigma_x/sqrt2}."""
    return KrausFamily.from_operators(
        [np.eye(2, dtype=complex) / np.sqrt(2), SIGMA_X / np.sqrt(2)]
    )
