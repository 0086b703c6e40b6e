import numpy as np

from diffid.tridiag import thomas_solve


def dense(lower, diag, upper):
    n = len(diag)
    A = np.diag(diag)
    A += np.diag(lower, -1)
    A += np.diag(upper, 1)
    return A


def test_thomas_matches_dense_solve():
    rng = np.random.default_rng(42)
    for n in (2, 3, 17, 128):
        diag = 4.0 + rng.random(n)
        lower = rng.standard_normal(n - 1)
        upper = rng.standard_normal(n - 1)
        rhs = rng.standard_normal(n)
        x = thomas_solve(lower, diag, upper, rhs)
        expected = np.linalg.solve(dense(lower, diag, upper), rhs)
        assert np.max(np.abs(x - expected)) < 1e-12


def test_thomas_identity():
    rhs = np.array([1.0, -2.0, 3.0])
    x = thomas_solve(np.zeros(2), np.ones(3), np.zeros(2), rhs)
    assert np.array_equal(x, rhs)
