"""Build and convert selfadjoint vertex conditions four equivalent ways.

Run:  python demos/demo_vertex_conditions.py
"""

import numpy as np

import halfline as hl

n = 3
print("=== angle form: one Dirichlet, one Neumann, one mixed channel ===")
bc = hl.from_angles([np.pi, np.pi / 2, np.pi / 3])
print("A =\n", bc.A.real)
print("B =\n", bc.B.real)
print("valid:", hl.validate_ab(bc.A, bc.B).ok)

print("\n=== the same condition through its unitary encoding ===")
u = hl.to_unitary(bc)
print("U =\n", np.round(u.U, 6))
back = hl.from_unitary(u)
print("round trip preserves the condition:", hl.bc_subspace_equal(bc, back))

print("\n=== rank-n form and the dictionary back ===")
A1, B1 = -bc.B.conj().T, bc.A.conj().T
print("rank-n form valid:", hl.validate_kostrykin(A1, B1).ok)
again = hl.from_kostrykin(A1, B1)
print("same condition:", hl.bc_subspace_equal(bc, again))

print("\n=== gauge freedom: right factors never matter ===")
rng = np.random.default_rng(5)
D = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 2 * np.eye(n)
skewed = hl.gauge_transform(bc, D)
print("still valid:", hl.validate_ab(skewed.A, skewed.B).ok)
print("same condition:", hl.bc_subspace_equal(bc, skewed))
norm = hl.normalize(skewed)
print("normalized gram AA' + BB' == I:",
      np.allclose(norm.A @ norm.A.conj().T + norm.B @ norm.B.conj().T, np.eye(n)))
