"""Radial Fourier boundaries of star-shaped planar domains.

The boundary is the curve ``theta -> rho(theta) (cos theta, sin theta)`` with

    rho(theta) = a0 + sum_j a_j cos(j theta) + b_j sin(j theta),   j = 1..N.

Perturbation directions are stored either as coefficient vectors in the
flat layout ``[a0, a_1..a_N, b_1..b_N]`` (see :meth:`FourierBoundary.vector`)
or as raw radial displacements sampled on a uniform theta grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonStarShaped

__all__ = [
    "FourierBoundary",
    "PerturbedBoundary",
    "BoundaryFields",
    "uniform_thetas",
    "radius_eval",
    "boundary_fields",
    "perimeter",
    "perimeter_gradient",
    "basis_functions",
    "direction_on_grid",
    "scale",
    "rotate",
]

# resolution of the internal quadrature used by perimeter and its gradient
M_QUAD = 1024
# dense grid used to certify rho > 0
_CHECK_POINTS = 2048


def uniform_thetas(M: int) -> np.ndarray:
    """Uniform periodic grid ``2 pi j / M``, ``j = 0..M-1``."""
    return 2.0 * np.pi * np.arange(M) / M


@dataclass(frozen=True)
class FourierBoundary:
    """Radius function of a star-shaped domain as a truncated Fourier series."""

    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        if a.size < 1 or a.size != b.size:
            raise ValueError("need N >= 1 cosine and sine coefficients of equal length")
        if not (np.isfinite(self.a0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def order(self) -> int:
        return self.a.size

    @classmethod
    def circle(cls, radius: float = 1.0, order: int = 1) -> "FourierBoundary":
        return cls(radius, np.zeros(order), np.zeros(order))

    @classmethod
    def from_vector(cls, vec) -> "FourierBoundary":
        vec = np.asarray(vec, dtype=float)
        if vec.size < 3 or vec.size % 2 == 0:
            raise ValueError("coefficient vector must have length 2N+1 with N >= 1")
        n = (vec.size - 1) // 2
        return cls(vec[0], vec[1:n + 1], vec[n + 1:])

    def vector(self) -> np.ndarray:
        """Flat coefficient vector ``[a0, a_1..a_N, b_1..b_N]``."""
        return np.concatenate(([self.a0], self.a, self.b))

    def padded(self, order: int) -> "FourierBoundary":
        """Same curve with the series zero-padded (or truncated) to ``order``."""
        a = np.zeros(order)
        b = np.zeros(order)
        n = min(order, self.order)
        a[:n] = self.a[:n]
        b[:n] = self.b[:n]
        return FourierBoundary(self.a0, a, b)

    def radius(self, thetas) -> np.ndarray:
        return radius_eval(self, thetas)[0]

    def min_radius(self, n_check: int = _CHECK_POINTS) -> float:
        return float(self.radius(uniform_thetas(n_check)).min())

    def is_star_shaped(self, n_check: int = _CHECK_POINTS) -> bool:
        return self.min_radius(n_check) > 0.0

    def check(self, n_check: int = _CHECK_POINTS) -> "FourierBoundary":
        """Return self, raising NonStarShaped if rho <= 0 somewhere."""
        r = self.min_radius(n_check)
        if not r > 0.0:
            raise NonStarShaped(f"radius function reaches {r:.3e} <= 0")
        return self


@dataclass(frozen=True)
class BoundaryFields:
    """Boundary samples on a uniform theta grid.

    ``dsigma`` holds trapezoid weights for the arc-length measure, so that
    ``sum(f * dsigma)`` integrates ``f`` over the boundary.
    """

    thetas: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    dsigma: np.ndarray
    rho: np.ndarray = field(repr=False)
    drho: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.thetas.size

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.thetas.size

    @property
    def speed(self) -> np.ndarray:
        """``|d x / d theta| = sqrt(rho^2 + rho'^2)``."""
        return np.hypot(self.rho, self.drho)

    def l2_norm(self, values) -> float:
        return float(np.sqrt(np.sum(np.asarray(values) ** 2 * self.dsigma)))


def _harmonics(order: int, thetas: np.ndarray):
    j = np.arange(1, order + 1)
    jt = np.outer(thetas, j)
    return j, np.cos(jt), np.sin(jt)


def radius_eval(boundary: FourierBoundary, thetas) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate ``rho``, ``rho'`` and ``rho''`` at the given angles."""
    thetas = np.asarray(thetas, dtype=float)
    j, c, s = _harmonics(boundary.order, thetas.ravel())
    a, b = boundary.a, boundary.b
    rho = boundary.a0 + c @ a + s @ b
    drho = c @ (j * b) - s @ (j * a)
    d2rho = -(c @ (j ** 2 * a) + s @ (j ** 2 * b))
    shape = thetas.shape
    return rho.reshape(shape), drho.reshape(shape), d2rho.reshape(shape)


def boundary_fields(boundary: FourierBoundary, M: int = 256) -> BoundaryFields:
    """Sample points, outward normals, curvature and arc-length weights.

    Curvature uses the polar formula
    ``(rho^2 + 2 rho'^2 - rho rho'') / (rho^2 + rho'^2)^(3/2)``.
    """
    if M < 64 or M % 2:
        raise ValueError("M must be even and at least 64")
    thetas = uniform_thetas(M)
    rho, drho, d2rho = radius_eval(boundary, thetas)
    if rho.min() <= 0.0:
        raise NonStarShaped(f"radius function reaches {rho.min():.3e} <= 0")
    boundary.check()
    c, s = np.cos(thetas), np.sin(thetas)
    speed = np.hypot(rho, drho)
    points = np.column_stack((rho * c, rho * s))
    normals = np.column_stack((rho * c + drho * s, rho * s - drho * c)) / speed[:, None]
    curvature = (rho ** 2 + 2.0 * drho ** 2 - rho * d2rho) / speed ** 3
    dsigma = speed * (2.0 * np.pi / M)
    return BoundaryFields(thetas, points, normals, curvature, dsigma, rho, drho)


def perimeter(boundary: FourierBoundary, M: int = M_QUAD) -> float:
    """Length of the boundary by periodic trapezoid quadrature."""
    boundary.check()
    rho, drho, _ = radius_eval(boundary, uniform_thetas(M))
    return float(np.sum(np.hypot(rho, drho)) * (2.0 * np.pi / M))


def basis_functions(order: int, thetas) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient basis ``[1, cos j t, sin j t]`` and its theta-derivative.

    Returns two arrays of shape ``(2*order + 1, len(thetas))``.
    """
    thetas = np.asarray(thetas, dtype=float)
    j, c, s = _harmonics(order, thetas)
    phi = np.vstack((np.ones_like(thetas), c.T, s.T))
    dphi = np.vstack((np.zeros_like(thetas), -(j[:, None] * s.T), j[:, None] * c.T))
    return phi, dphi


def perimeter_gradient(boundary: FourierBoundary, M: int = M_QUAD) -> np.ndarray:
    """Partial derivatives of the perimeter with respect to every coefficient.

    For a radial perturbation ``d rho`` the first variation of the length is
    ``int (rho d_rho + rho' d_rho') / sqrt(rho^2 + rho'^2) d theta``.
    """
    boundary.check()
    thetas = uniform_thetas(M)
    rho, drho, _ = radius_eval(boundary, thetas)
    speed = np.hypot(rho, drho)
    phi, dphi = basis_functions(boundary.order, thetas)
    integrand = (rho * phi + drho * dphi) / speed
    return integrand.sum(axis=1) * (2.0 * np.pi / M)


@dataclass(frozen=True)
class PerturbedBoundary:
    """Radius ``rho(theta) + eps * d_rho(theta)`` for an arbitrary direction.

    Used to mesh boundaries moved along grid-free directions such as bump
    fields, which are not finite Fourier series.
    """

    base: FourierBoundary
    direction: object
    eps: float

    def radius(self, thetas) -> np.ndarray:
        return self.base.radius(thetas) + self.eps * direction_on_grid(self.direction, thetas)

    def check(self, n_check: int = _CHECK_POINTS) -> "PerturbedBoundary":
        r = float(self.radius(uniform_thetas(n_check)).min())
        if not r > 0.0:
            raise NonStarShaped(f"radius function reaches {r:.3e} <= 0")
        return self


def direction_on_grid(direction, thetas) -> np.ndarray:
    """Radial displacement ``d rho`` on ``thetas``.

    ``direction`` is a flat coefficient vector of odd length, an array
    already sampled on ``thetas``, or a callable ``d_rho(thetas)``.
    """
    thetas = np.asarray(thetas)
    if callable(direction):
        return np.asarray(direction(thetas), dtype=float)
    direction = np.asarray(direction, dtype=float)
    if direction.shape == thetas.shape:
        return direction
    if direction.ndim != 1 or direction.size % 2 == 0:
        raise ValueError("direction must be a coefficient vector or a grid function")
    order = (direction.size - 1) // 2
    phi, _ = basis_functions(order, thetas)
    return direction @ phi


def scale(boundary: FourierBoundary, t: float) -> FourierBoundary:
    """Homothety by ``t > 0`` about the origin."""
    if not t > 0:
        raise ValueError("scale factor must be positive")
    return FourierBoundary(t * boundary.a0, t * boundary.a, t * boundary.b)


def rotate(boundary: FourierBoundary, alpha: float) -> FourierBoundary:
    """Rotate the domain by ``alpha``: the new radius is ``rho(theta - alpha)``."""
    j = np.arange(1, boundary.order + 1)
    ca, sa = np.cos(j * alpha), np.sin(j * alpha)
    a, b = boundary.a, boundary.b
    return FourierBoundary(boundary.a0, a * ca - b * sa, a * sa + b * ca)
