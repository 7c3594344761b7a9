"""Shared helpers for the test suite."""

import numpy as np
import pytest

import halfline as hl


def rand_herm(rng, n, scale=1.0):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (M + M.conj().T)


def rand_unitary(rng, n):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(X)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def rand_bc(rng, n):
    """A random valid boundary pair via the unitary encoding."""
    return hl.from_unitary(hl.UnitaryBC(U=rand_unitary(rng, n)))


def rand_potential(rng, n, pieces=2, scale=1.0, gap=0.2):
    built = []
    x = 0.0
    for _ in range(pieces):
        lo = x + gap * rng.uniform(0.0, 1.0)
        hi = lo + rng.uniform(0.3, 0.8)
        built.append((lo, hi, rand_herm(rng, n, scale)))
        x = hi
    return hl.Potential(n=n, pieces=tuple(built))


def scalar_well(v0=1.0, width=1.0):
    return hl.Potential(n=1, pieces=((0.0, width, np.array([[-v0]])),))


def tuned_resonance_well(width=1.0, lo=2.0, hi=3.0, iters=80):
    """Bisect the well depth until the Dirichlet zero-energy Jost scalar
    vanishes (threshold resonance)."""
    bc = hl.dirichlet(1)

    def j0(v0):
        pot = hl.Potential(n=1, pieces=((0.0, width, np.array([[-v0]])),))
        return hl.jost_matrix_zero(pot, bc)[0, 0].real

    flo = j0(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = j0(mid)
        if flo * fmid <= 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    v0 = 0.5 * (lo + hi)
    return hl.Potential(n=1, pieces=((0.0, width, np.array([[-v0]])),))


def exceptional_bc(pot, Xi):
    """Vertex condition whose zero-energy Jost matrix kills a prescribed
    kernel of dimension m.

    Columns of Xi prescribe bounded zero-energy solutions f(0, .) xi; their
    boundary data spans an isotropic subspace of the boundary form (the
    zero-energy pairings vanish), which is completed to a Lagrangian basis.
    The resulting (A, B) is the column arrangement of that basis, so the
    first m coordinate vectors lie in ker J(0).
    """
    n = pot.n
    Xi = np.atleast_2d(np.asarray(Xi, dtype=complex))
    if Xi.shape[0] != n:
        Xi = Xi.T
    f00 = hl.jost_solution(pot, 0.0, 0.0)
    W = np.vstack([f00.value @ Xi, f00.deriv @ Xi])
    basis = list(np.linalg.qr(W)[0].T)  # orthonormal span of the boundary data
    Om = np.zeros((2 * n, 2 * n), dtype=complex)
    Om[:n, n:] = np.eye(n)
    Om[n:, :n] = -np.eye(n)
    while len(basis) < n:
        C = np.vstack([np.array([b.conj() for b in basis]),
                       np.array([(Om.conj().T @ b).conj() for b in basis])])
        _, s, Vh = np.linalg.svd(C)
        null_dim = 2 * n - int(np.sum(s > 1e-12 * s[0]))
        N = Vh[2 * n - null_dim:].conj().T
        H = 1j * N.conj().T @ Om @ N
        lam, Q = np.linalg.eigh(0.5 * (H + H.conj().T))
        if abs(lam[0]) < 1e-10 or abs(lam[-1]) < 1e-10:
            x = Q[:, int(np.argmin(np.abs(lam)))]
        else:
            x = Q[:, -1] / np.sqrt(lam[-1]) + Q[:, 0] / np.sqrt(-lam[0])
        v = N @ x
        basis.append(v / np.linalg.norm(v))
    M = np.column_stack(basis)
    return hl.BCPair(n=n, A=M[:n, :], B=M[n:, :])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
