"""Bessel zeros and the exact Dirichlet spectrum of a disk."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

__all__ = ["besselj_series", "bessel_zero", "DiskReference", "disk_reference"]

_DPS = 40


def besselj_series(m: int, x: float, terms: int | None = None) -> float:
    """``J_m(x)`` from its power series, summed in extended precision.

    With ``terms=None`` the series runs until the terms drop below the
    working precision; otherwise exactly ``terms`` terms are used.
    """
    with mpmath.workdps(_DPS):
        x = mpmath.mpf(x)
        half = x / 2
        term = half ** m / mpmath.factorial(m)
        total = term
        q = -(half * half)
        k = 0
        eps = mpmath.mpf(10) ** (-_DPS)
        while True:
            k += 1
            if terms is not None and k >= terms:
                break
            term = term * q / (k * (k + m))
            total += term
            if terms is None and abs(term) < eps * max(abs(total), eps) and k > x:
                break
        return float(total)


@lru_cache(maxsize=None)
def bessel_zero(m: int, n: int, tol: float = 1e-13, terms: int | None = None) -> float:
    """The ``n``-th positive zero of ``J_m`` by bracketing and bisection.

    Brackets come from a scan starting at ``x = m`` (no zero lies below it)
    with steps much shorter than the zero spacing ``~ pi``.
    """
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")

    def f(x):
        return besselj_series(m, x, terms)

    step = 0.1
    x0 = max(float(m), step)
    f0 = f(x0)
    found = 0
    while True:
        x1 = x0 + step
        f1 = f(x1)
        if f0 == 0.0:
            found += 1
            if found == n:
                return x0
        elif f0 * f1 < 0:
            found += 1
            if found == n:
                break
        x0, f0 = x1, f1
    lo, hi, flo = x0, x1, f0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DiskReference:
    """Sorted Dirichlet eigenvalues ``j_{m,n}^2 / R^2`` of a disk.

    Angular order ``m = 0`` modes are simple, ``m >= 1`` modes come in
    cos/sin pairs and are listed twice.
    """

    radius: float
    orders: np.ndarray
    indices: np.ndarray
    zeros: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.zeros ** 2 / self.radius ** 2

    @property
    def multiplicity(self) -> np.ndarray:
        return np.where(self.orders == 0, 1, 2)


def disk_reference(count: int, radius: float = 1.0, max_order: int = 6, max_index: int = 6) -> DiskReference:
    """First ``count`` disk eigenvalues, repeated by multiplicity."""
    entries = []
    for m in range(max_order + 1):
        for n in range(1, max_index + 1):
            entries.append((bessel_zero(m, n), m, n))
    entries.sort()
    orders, indices, zeros = [], [], []
    for z, m, n in entries:
        for _ in range(1 if m == 0 else 2):
            orders.append(m)
            indices.append(n)
            zeros.append(z)
    if len(zeros) < count:
        raise ValueError("increase max_order/max_index for this many eigenvalues")
    return DiskReference(float(radius), np.array(orders[:count]), np.array(indices[:count]),
                         np.array(zeros[:count]))
