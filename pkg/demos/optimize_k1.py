"""Minimizing lambda_1 + Per from an elongated start.

Among disks, lambda_1 + Per = j01^2 / R^2 + 2 pi R is smallest at
R* = (j01^2 / pi)^(1/3); the descent should find that disk, and the
curvature 1/R* should equal the squared normal derivative of u_1.
"""
import numpy as np

from specshape import FourierBoundary, RunConfig, bessel_zero, minimize

j = bessel_zero(0, 1)
R_star = (j ** 2 / np.pi) ** (1 / 3)
print(f"1D oracle: R* = {R_star:.5f}, objective = {j ** 2 / R_star ** 2 + 2 * np.pi * R_star:.5f}")

start = FourierBoundary(1.0, [0.0, 0.1], [0.0, 0.0])      # rho = 1 + 0.1 cos 2 theta
res = minimize(RunConfig(k=1), start)

for entry in res.log[::5]:
    print(f"iter {entry['iter']:3d}  objective {entry['objective']:.6f}  |min-norm| {entry['stationarity']:.2e}")
print(f"converged={res.converged} after {res.iterations} iterations")
print(f"a0 = {res.boundary.a0:.5f}, largest other coefficient {np.abs(res.boundary.vector()[1:]).max():.1e}")
print(f"objective {res.objective:.5f}, mu = {res.certificate.mu}, residual_rel = {res.certificate.residual_rel:.2e}")
print(f"dilation check Per - 2 lambda_1 = {res.perimeter - 2 * res.lambda_k:.2e}")
