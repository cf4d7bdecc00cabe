"""Two-dimensional lattice utilities for Lambda_tau = Z*2pi*i*tau + Z*2pi*i.

Gauss reduction makes every shortest-vector and nearest-point search a
finite window scan, independent of how skew tau is.
"""

from __future__ import annotations

import cmath
import math

from .errors import InvalidArgumentError

TWO_PI_I = 2j * math.pi


def require_tau(tau: complex) -> complex:
    tau = complex(tau)
    if not (tau.imag > 0.0) or not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
        raise InvalidArgumentError(f"tau must lie in the upper half-plane, got {tau}")
    return tau


def lattice_basis(tau: complex) -> tuple[complex, complex]:
    """Standard basis (2*pi*i*tau, 2*pi*i) of Lambda_tau."""
    tau = require_tau(tau)
    return TWO_PI_I * tau, TWO_PI_I


def gauss_reduce(b1: complex, b2: complex) -> tuple[complex, complex]:
    """Gauss-reduce a rank-2 basis: |v1| <= |v2| <= |v2 +- v1|."""
    v1, v2 = b1, b2
    if abs(v1) > abs(v2):
        v1, v2 = v2, v1
    while True:
        mu = round((v2 * v1.conjugate()).real / abs(v1) ** 2)
        v2 = v2 - mu * v1
        if abs(v2) >= abs(v1):
            return v1, v2
        v1, v2 = v2, v1


def lattice_min(tau: complex) -> float:
    """Minimal length D(Lambda_tau) of a nonzero lattice vector."""
    v1, v2 = gauss_reduce(*lattice_basis(tau))
    best = abs(v1)
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            if m == 0 and n == 0:
                continue
            best = min(best, abs(m * v1 + n * v2))
    return best


def reduce_mod_lattice(tau: complex, z: complex) -> tuple[complex, int, int]:
    """Reduce z to the nearest-point representative modulo Lambda_tau.

    Returns (z_red, m, n) with z = z_red + 2*pi*i*(m*tau + n) and |z_red|
    minimal over the lattice.  m is exactly the quasi-period count needed
    by P_1 and P_0.
    """
    z = complex(z)
    v1, v2 = gauss_reduce(*lattice_basis(tau))
    # Solve z = x*v1 + y*v2 over the reals.
    det = v1.real * v2.imag - v1.imag * v2.real
    x = (z.real * v2.imag - z.imag * v2.real) / det
    y = (v1.real * z.imag - v1.imag * z.real) / det
    x0, y0 = round(x), round(y)
    best = None
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            lam = (x0 + dm) * v1 + (y0 + dn) * v2
            r = z - lam
            if best is None or abs(r) < abs(best[0]):
                best = (r, lam)
    z_red, lam = best
    # Express the shift in the original basis (2*pi*i*tau, 2*pi*i).
    w = lam / TWO_PI_I
    m = round(w.imag / tau.imag)
    n = round(w.real - m * tau.real)
    return z_red, m, n


def lattice_distance(tau: complex, z: complex) -> float:
    """Distance from z to the nearest point of Lambda_tau (0 included)."""
    z_red, _, _ = reduce_mod_lattice(tau, z)
    return abs(z_red)


def mobius(gamma, tau: complex) -> complex:
    """Fractional-linear action of a 2x2 matrix on the upper half-plane."""
    (a, b), (c, d) = gamma
    return (a * tau + b) / (c * tau + d)
