"""The zero-energy limit of the scattering matrix, generic and exceptional.

Away from threshold resonances the limit is trivially -I.  When the
zero-energy Jost matrix is singular, S(0) is assembled from its Jordan
structure; this demo runs the pipeline on the bundled star-graph vertex
conditions and on a well tuned to a threshold resonance.

Run:  python demos/demo_zero_energy_limit.py
"""

import numpy as np

import halfline as hl
from halfline.fixtures import get_fixture
from halfline.lowenergy import jost_inverse_asymptotics

for fid in ("7.1", "7.2", "7.3", "7.4"):
    fx = get_fixture(fid)
    res = hl.zero_energy_pipeline(fx.potential(), fx.bc())
    print(f"=== {fx.name} (n = {fx.n}) ===")
    print(f"kernel: geometric {res.jordan.mu}, algebraic {res.jordan.nu}, "
          f"{res.jordan.kappa} chains")
    print("S(0) =\n", np.round(res.s0.S.real, 6))
    print("involution residual:", f"{res.involution_residual:.2e}",
          " probes:", [f"{d:.2e}" for _, d in res.continuity_probes])
    print()

print("=== scalar well tuned to a threshold resonance (Dirichlet) ===")
bc = hl.dirichlet(1)


def j0_of(v0):
    pot = hl.Potential(n=1, pieces=((0.0, 1.0, np.array([[-v0]])),))
    return hl.jost_matrix_zero(pot, bc)[0, 0].real


lo, hi = 2.0, 3.0
for _ in range(60):
    mid = 0.5 * (lo + hi)
    if j0_of(lo) * j0_of(mid) <= 0:
        hi = mid
    else:
        lo = mid
v0 = 0.5 * (lo + hi)
print(f"bisected depth v0 = {v0:.12f} (expect (pi/2)^2 = {np.pi**2 / 4:.12f})")
pot = hl.Potential(n=1, pieces=((0.0, 1.0, np.array([[-v0]])),))
res = hl.zero_energy_pipeline(pot, bc)
print("kernel dimension at threshold:", res.jordan.mu)
print("S(0) =", res.s0.S[0, 0])
lead, order = jost_inverse_asymptotics(res.expansion, res.jordan)
print(f"J(k)^(-1) ~ L/k with L = {lead[0, 0]:.6f} (pole order {order})")
for k in (1e-2, 1e-3, 1e-4):
    Jk = hl.jost_matrix(pot, bc, k).J
    print(f"  k = {k:7.0e}:  |k J(k)^(-1) - L| = "
          f"{abs(k / Jk[0, 0] - lead[0, 0]):.3e}")
