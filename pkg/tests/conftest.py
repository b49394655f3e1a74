import numpy as np
import pytest

from derivlab.cli import generate
from derivlab.numlin import OperatorSubspace, hermitian_eig


def random_hermitian(n, seed, scale=1.0):
    """Plain GUE-style Hermitian matrix (no gap control); use
    cli.generate for instances whose kernel ranks must be unambiguous."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2.0


def random_matrix(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def matrix_unit(n, r, c):
    e = np.zeros((n, n), dtype=complex)
    e[r, c] = 1.0
    return e


def eigenbasis_kernel_oracle(d, k_unused=None, cluster_tol=1e-8):
    """Independent construction of ker ad_iD: in an eigenbasis of D the
    commutator scales the unit E_rc by (lambda_r - lambda_c), so the
    kernel is spanned by the units whose eigenvalues coincide (up to
    clustering).  Valid for every power k, which is the point."""
    w, u = hermitian_eig(d)
    threshold = cluster_tol * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    # cluster ids by the same greedy ascending rule
    ids = np.zeros(len(w), dtype=int)
    for i in range(1, len(w)):
        ids[i] = ids[i - 1] + (1 if w[i] - w[i - 1] > threshold else 0)
    mats = []
    n = d.shape[0]
    for r in range(n):
        for c in range(n):
            if ids[r] == ids[c]:
                mats.append(np.outer(u[:, r], u[:, c].conj()))
    return OperatorSubspace.from_spanning(n, mats)


@pytest.fixture
def gapped_hermitian():
    return lambda n, seed: generate("hermitian", n, seed)
