"""Gaussian-rational scalar and matrix arithmetic."""

from fractions import Fraction

import numpy as np
import pytest

from halfline import exactalg as xa


def test_scalar_field_operations():
    a = xa.QC(1, 2)
    b = xa.QC(Fraction(1, 3), -1)
    assert a + b == xa.QC(Fraction(4, 3), 1)
    assert a * b == xa.QC(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
    assert (a / b) * b == a
    assert a - a == xa.QC(0)
    assert not xa.QC(0)
    assert a.conjugate() == xa.QC(1, -2)


def test_scalar_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        xa.QC(1) / xa.QC(0)


def test_snap_recovers_small_rationals():
    assert xa.snap(complex(1 / 3, -0.25)) == xa.QC(Fraction(1, 3), Fraction(-1, 4))
    assert xa.snap(complex(0.9999999999999997, 0)) == xa.QC(1)


def test_rref_rank_nullspace():
    M = xa.mat([[0, 0, -1], [0, 0, -1], [0, 0, -1]])
    assert xa.rank(M) == 1
    basis = xa.nullspace(M)
    assert len(basis) == 2
    # pivot-ordered: e1 then e2
    assert basis[0] == [xa.QC(1), xa.QC(0), xa.QC(0)]
    assert basis[1] == [xa.QC(0), xa.QC(1), xa.QC(0)]


def test_nullspace_of_identity_is_empty():
    assert xa.nullspace(xa.identity(3)) == []


def test_inverse_round_trip():
    M = xa.mat([[1, 2, 0], [(0, 1), 1, 1], [0, 3, -1]])
    Minv = xa.inverse(M)
    assert xa.mat_equal(xa.matmul(M, Minv), xa.identity(3))
    assert xa.mat_equal(xa.matmul(Minv, M), xa.identity(3))


def test_inverse_rejects_singular():
    with pytest.raises(ZeroDivisionError):
        xa.inverse(xa.mat([[1, 1], [1, 1]]))


def test_matmul_matches_numpy(rng):
    A = [[xa.QC(int(x), int(y)) for x, y in zip(rx, ry)]
         for rx, ry in zip(rng.integers(-4, 5, (3, 3)), rng.integers(-4, 5, (3, 3)))]
    B = [[xa.QC(int(x), int(y)) for x, y in zip(rx, ry)]
         for rx, ry in zip(rng.integers(-4, 5, (3, 3)), rng.integers(-4, 5, (3, 3)))]
    C = xa.matmul(A, B)
    assert np.allclose(xa.mat_to_complex(C), xa.mat_to_complex(A) @ xa.mat_to_complex(B))
