"""Splitting the double eigenvalue lambda_2 = lambda_3 of the disk.

A perturbation made of two narrow bumps, placed where the trace vectors
(d_n u_2, d_n u_3) are independent, pushes one branch down and the other up
while the perimeter does not move to first order.
"""
import numpy as np

from specshape import FourierBoundary, analyze, build_mesh, signature_field, solve_spectrum
from specshape.geometry import PerturbedBoundary

disk = FourierBoundary.circle(1.0, 8)
state = analyze(disk, 2, 40, 80)
print("cluster", state.cluster, "eigenvalues", state.spectrum.values[state.cluster.indices])

sig = signature_field(state.cluster_traces(), state.fields, ell=1)
print("bump centres (deg):", np.degrees(sig.centers).round(1), "half-width", sig.delta)
print("magnitudes:", sig.magnitudes, " perimeter rate:", sig.per_rate)
print("predicted branch slopes (A_V eigenvalues):", sig.cluster_eigs.round(4))

for eps in (1e-3, 1e-4):
    moved = PerturbedBoundary(disk, sig, eps)
    lam = solve_spectrum(build_mesh(moved, 40, 80), 6).values[1:3]
    print(f"eps={eps:.0e}: slopes {((lam - state.spectrum.values[1:3]) / eps).round(4)}")
