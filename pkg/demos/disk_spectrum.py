"""Finite element spectrum of the unit disk against Bessel zeros.

The Dirichlet eigenvalues of the unit disk are squares of Bessel zeros
j_{m,n}; modes with m >= 1 come in cos/sin pairs. We compare the P1
solution on the polar mesh and watch the error drop by ~4 per refinement.
"""
import numpy as np

from specshape import FourierBoundary, build_mesh, disk_reference, solve_spectrum

disk = FourierBoundary.circle(1.0)
ref = disk_reference(6)
print("order m, index n, exact eigenvalue")
for m, n, lam in zip(ref.orders, ref.indices, ref.eigenvalues):
    print(f"  {m} {n} {lam:.6f}")

prev = None
for n_r in (10, 20, 40, 80):
    vals = solve_spectrum(build_mesh(disk, n_r, 2 * n_r), 6).values
    err = np.abs(vals - ref.eigenvalues) / ref.eigenvalues
    ratio = "" if prev is None else f"  (error ratio {prev / err[0]:.2f})"
    print(f"n_r={n_r:3d}: lambda_1={vals[0]:.6f}  max rel err {err.max():.2e}{ratio}")
    prev = err[0]
