"""Eisenstein series, Weierstrass-type functions P_k, the elliptic prime
form, Dedekind eta, and the C/D moment coefficients.

Conventions: the lattice is Lambda_tau = Z*2pi*i*tau + Z*2pi*i, q = exp(2pi*i*tau),
and the Eisenstein normalization is E_k = -B_k/k! + (2/(k-1)!) sum sigma_{k-1}(n) q^n
(so E_2(i) = -1/(4pi)).  Logs and fractional powers are principal everywhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InvalidArgumentError,
    PoleError,
    RangeOverflowError,
    ToleranceError,
)
from .lattice import TWO_PI_I, lattice_min, reduce_mod_lattice, require_tau

# Crude uniform bound on |E_j(tau)| * D(Lambda_tau)^j used only for tail
# certificates of z-Laurent series (lattice-sum comparison, j >= 2).
_EISEN_LATTICE_BOUND = 40.0


@dataclass(frozen=True)
class SeriesTolerance:
    """Adaptive q-series truncation control."""

    abs_tol: float = 1e-14
    max_terms: int = 10000

    def __post_init__(self):
        if not (self.abs_tol > 0.0):
            raise InvalidArgumentError("abs_tol must be positive")
        if self.max_terms < 1:
            raise InvalidArgumentError("max_terms must be >= 1")


DEFAULT_TOL = SeriesTolerance()


def _bernoulli_list(kmax: int) -> list[Fraction]:
    """[B_0..B_kmax] from the defining recurrence."""
    b = [Fraction(1)]
    for m in range(1, kmax + 1):
        s = Fraction(0)
        for j in range(m):
            s += math.comb(m + 1, j) * b[j]
        b.append(-s / (m + 1))
    return b


def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k for even k >= 2, from t/(e^t-1) - 1 + t/2."""
    if k < 2 or k % 2 != 0:
        raise InvalidArgumentError(f"bernoulli requires even k >= 2, got {k}")
    return _bernoulli_list(k)[k]


def _sigma(k: int, n: int) -> int:
    """Divisor power sum sigma_k(n)."""
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d**k
            e = n // d
            if e != d:
                s += e**k
        d += 1
    return s


def eisenstein_q(k: int, q: complex, tol: SeriesTolerance = DEFAULT_TOL,
                 _bk: Fraction | None = None) -> complex:
    """E_k evaluated directly from the nome q, |q| < 1."""
    if k < 2:
        raise InvalidArgumentError(f"eisenstein requires k >= 2, got {k}")
    if k % 2 == 1:
        return 0j
    q = complex(q)
    aq = abs(q)
    if not aq < 1.0:
        raise InvalidArgumentError(f"|q| must be < 1, got {aq}")
    fact = math.factorial(k - 1)
    bk = bernoulli(k) if _bk is None else _bk
    const = complex(Fraction(-bk, k * fact))
    total = const
    if aq == 0.0:
        return total
    # E_k itself is of order |B_k|/k! ~ 2/(2pi)^k; anchor the stop there so
    # downstream z^k amplification meets the tolerance in relative terms too
    goal = tol.abs_tol * min(1.0, abs(const))
    qn = 1 + 0j
    log_pref = math.log(2.0) - math.lgamma(k)
    for n in range(1, tol.max_terms + 1):
        qn *= q
        total += float(Fraction(2 * _sigma(k - 1, n), fact)) * qn
        # sigma_{k-1}(m) <= m^k, so the tail is dominated by the geometric-ish
        # series u_m = (2/(k-1)!) m^k |q|^m once u_{m+1}/u_m < 1.
        log_u = log_pref + k * math.log(n + 1) + (n + 1) * math.log(aq)
        rho = aq * ((n + 2) / (n + 1)) ** k
        if rho < 1.0 and log_u < math.log(goal * (1.0 - rho)):
            return total
    achieved = math.exp(log_pref + k * math.log(tol.max_terms) + tol.max_terms * math.log(aq))
    raise ToleranceError(
        f"E_{k} q-series not certified within {tol.max_terms} terms", achieved=achieved
    )


def eisenstein(k: int, tau: complex, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Eisenstein series E_k(tau); identically 0 for odd k."""
    tau = require_tau(tau)
    if k < 2:
        raise InvalidArgumentError(f"eisenstein requires k >= 2, got {k}")
    if k % 2 == 1:
        return 0j
    return eisenstein_q(k, cmath.exp(TWO_PI_I * tau), tol)


def eisenstein_range(kmax: int, tau: complex, tol: SeriesTolerance = DEFAULT_TOL) -> list[complex]:
    """[E_0..E_kmax] with the convention E_0 = E_1 = 0 (E_0 unused)."""
    tau = require_tau(tau)
    q = cmath.exp(TWO_PI_I * tau)
    bern = _bernoulli_list(kmax) if kmax >= 2 else []
    out = [0j] * (kmax + 1)
    for k in range(2, kmax + 1, 2):
        out[k] = eisenstein_q(k, q, tol, _bk=bern[k])
    return out


def _comb_ratio(k: int, l: int) -> float:
    """(k+l-1)! / ((k-1)!(l-1)!) as a float, guarding against overflow.

    Exact binomial-product evaluation keeps the full supported range
    k + l <= ~1000 (well past the required 64) before the double overflows.
    """
    try:
        return float(math.comb(k + l - 1, k - 1) * l)
    except OverflowError:
        raise RangeOverflowError(
            f"factorial ratio overflows double range at (k,l)=({k},{l})"
        ) from None


def c_coeff(k: int, l: int, tau: complex, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Moment coefficient C(k,l,tau); symmetric in (k,l)."""
    if k < 1 or l < 1:
        raise InvalidArgumentError("c_coeff requires k,l >= 1")
    if (k + l) % 2 == 1:
        return 0j
    return (-1) ** (k + 1) * _comb_ratio(k, l) * eisenstein(k + l, tau, tol)


def d_coeff(k: int, l: int, tau: complex, z: complex, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Moment coefficient D(k,l,tau,z) = combinatorial factor * P_{k+l}(tau,z)."""
    if k < 1 or l < 1:
        raise InvalidArgumentError("d_coeff requires k,l >= 1")
    return (-1) ** (k + 1) * _comb_ratio(k, l) * weierstrass_p(k + l, tau, z, tol)


def _head_polys(kmax: int) -> list[dict[int, Fraction]]:
    """Polynomials p_k(c) with p_k(coth(z/2)) = sum_{n in Z} "1/(z-2pi*i*n)^k".

    p_1 = c/2 and p_{k+1} = -(1/k) p_k'(c) (1-c^2)/2, the same derivative
    chain that generates P_{k+1} from P_k.
    """
    polys: list[dict[int, Fraction]] = [{}, {1: Fraction(1, 2)}]
    for m in range(1, kmax):
        prev = polys[m]
        nxt: dict[int, Fraction] = {}
        for e, co in prev.items():
            if e == 0:
                continue
            d = co * e
            nxt[e - 1] = nxt.get(e - 1, Fraction(0)) - d / (2 * m)
            nxt[e + 1] = nxt.get(e + 1, Fraction(0)) + d / (2 * m)
        polys.append(nxt)
    return polys


def _p_qz_route(k: int, q: complex, z: complex, head_poly: dict[int, Fraction],
                tol: SeriesTolerance, a_coeff: float) -> complex:
    """P_k via the exponential-coordinate series; needs |a_coeff| < 1."""
    c = 1.0 / cmath.tanh(z / 2.0)
    head = sum(float(co) * c**e for e, co in head_poly.items())
    aq = abs(q)
    if aq == 0.0:
        return head
    r_decay = aq ** (1.0 - abs(a_coeff))
    if not r_decay < 1.0:
        raise ToleranceError("q_z series diverges at |a| >= 1", achieved=math.inf)
    qz = cmath.exp(z)
    sgn = (-1) ** k
    pref = 1.0 / math.factorial(k - 1)
    total = 0j
    qn = 1 + 0j
    qzn = 1 + 0j
    qzi = 1 + 0j
    for n in range(1, tol.max_terms + 1):
        qn *= q
        qzn *= qz
        qzi /= qz
        total += n ** (k - 1) * qn / (1.0 - qn) * (qzn + sgn * qzi)
        u_next = (
            pref * (n + 1) ** (k - 1) * 2.0 * r_decay ** (n + 1) / (1.0 - aq)
        )
        rho = r_decay * ((n + 2) / (n + 1)) ** (k - 1)
        if rho < 1.0 and u_next / (1.0 - rho) < tol.abs_tol:
            return head + sgn * pref * total
    raise ToleranceError(
        f"P_{k} q_z-series not certified within {tol.max_terms} terms",
        achieved=pref * 2.0 * r_decay**tol.max_terms / (1.0 - aq),
    )


def _p_laurent_route(k: int, tau: complex, z: complex, dmin: float,
                     eis: list[complex], tol: SeriesTolerance) -> complex:
    """P_k from its z-Laurent series about 0; needs |z| < D(Lambda_tau)."""
    az = abs(z)
    r = az / dmin
    if k == 1:
        total = 1.0 / z
        zp = 1.0 + 0j  # z^(m-1)
        for m in range(2, len(eis)):
            zp *= z
            if m % 2 == 0:
                total -= eis[m] * zp
            bound = _EISEN_LATTICE_BOUND * r ** (m + 1) / dmin / (1.0 - r)
            if bound < tol.abs_tol:
                return total
        raise ToleranceError("P_1 Laurent series not certified", achieved=bound)
    total = z ** (-k)
    kk = k - 1
    zp = 1.0 + 0j  # z^(l-1)
    for l in range(1, len(eis) - kk):
        if (kk + l) % 2 == 0:
            total += (-1) ** (kk + 1) * _comb_ratio(kk, l) / kk * eis[kk + l] * zp
        # term_{l+1} bound, ratio certified < 1 once l is large enough
        t_next = (
            _comb_ratio(kk, l + 1) / kk
            * _EISEN_LATTICE_BOUND * dmin ** (-(kk + l + 1)) * az**l
        )
        rho = r * (kk + l + 1) / (l + 1)
        if rho < 1.0 and t_next / (1.0 - rho) < tol.abs_tol:
            return total
        zp *= z
    raise ToleranceError(f"P_{k} Laurent series not certified", achieved=t_next)


def weierstrass_range(kmax: int, tau: complex, z: complex,
                      tol: SeriesTolerance = DEFAULT_TOL) -> list[complex]:
    """[P_0..P_kmax](tau, z) with P_0 slot unused (0j).

    z is reduced modulo the lattice first: the nearest-point representative
    feeds the Laurent route when |z_red| < D/2, otherwise the centered
    parallelogram representative feeds the exponential-coordinate route.
    P_1 picks up the quasi-period correction -m from the reduction.
    """
    tau = require_tau(tau)
    if kmax < 1:
        raise InvalidArgumentError("weierstrass_range requires kmax >= 1")
    z = complex(z)
    dmin = lattice_min(tau)
    z_near, m_near, _ = reduce_mod_lattice(tau, z)
    if abs(z_near) < 1e-13 * dmin:
        raise PoleError(f"z = {z} lies on the lattice Lambda_tau")
    out = [0j] * (kmax + 1)
    if abs(z_near) < 0.5 * dmin:
        # extend the Eisenstein table until every P_k's tail certifies
        kbound = max(kmax + 40, 2 * kmax)
        eis = eisenstein_range(kbound, tau, tol)
        while True:
            try:
                for k in range(1, kmax + 1):
                    out[k] = _p_laurent_route(k, tau, z_near, dmin, eis, tol)
                break
            except ToleranceError:
                if len(eis) > 400:
                    raise
                eis = eisenstein_range(2 * len(eis), tau, tol)
        out[1] -= m_near
        return out
    # centered reduction in the original basis keeps |a| <= 1/2
    u = z / TWO_PI_I
    a = u.imag / tau.imag
    m_c = round(a)
    b = u.real - a * tau.real
    n_c = round(b)
    z_c = z - TWO_PI_I * (m_c * tau + n_c)
    a_c = a - m_c
    q = cmath.exp(TWO_PI_I * tau)
    heads = _head_polys(kmax)
    for k in range(1, kmax + 1):
        out[k] = _p_qz_route(k, q, z_c, heads[k], tol, a_c)
    out[1] -= m_c
    return out


def weierstrass_p(k: int, tau: complex, z: complex,
                  tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Weierstrass-type P_k(tau, z); P_2 is the classical P-function shifted by E_2."""
    return weierstrass_range(k, tau, z, tol)[k]


def dedekind_eta(tau: complex, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Dedekind eta, q^(1/24) prod (1-q^n), principal 24th root."""
    tau = require_tau(tau)
    q24 = cmath.exp(TWO_PI_I * tau / 24.0)
    q = cmath.exp(TWO_PI_I * tau)
    aq = abs(q)
    prod = q24
    qn = 1 + 0j
    for n in range(1, tol.max_terms + 1):
        qn *= q
        prod *= 1.0 - qn
        tail = aq ** (n + 1) / (1.0 - aq) ** 2
        if tail < tol.abs_tol:
            return prod
    raise ToleranceError("eta product not certified", achieved=tail)


def theta1(tau: complex, z: complex, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Jacobi theta_1 in lattice-scaled coordinates (z in units of Lambda_tau).

    theta_1(tau, z) = sum_n exp(pi*i*tau (n+1/2)^2 + (n+1/2)(z + i*pi)).
    """
    tau = require_tau(tau)
    z = complex(z)

    def term(n: int) -> complex:
        h = n + 0.5
        return cmath.exp(1j * math.pi * tau * h * h + h * (z + 1j * math.pi))

    # peak of |term| sits near n ~ Re(z)/(2 pi Im tau) - 1/2
    n0 = round(z.real / (2.0 * math.pi * tau.imag) - 0.5)
    total = term(n0)
    n_hi, n_lo = n0 + 1, n0 - 1
    prev_hi, prev_lo = math.inf, math.inf
    while True:
        t_hi, t_lo = term(n_hi), term(n_lo)
        total += t_hi + t_lo
        a_hi, a_lo = abs(t_hi), abs(t_lo)
        # Gaussian decay: once terms drop below tol and are decreasing on
        # both wings the remaining tail is geometrically dominated.
        if (a_hi < tol.abs_tol and a_lo < tol.abs_tol
                and a_hi <= prev_hi and a_lo <= prev_lo):
            return total
        if n_hi - n_lo > tol.max_terms:
            raise ToleranceError("theta_1 series not certified",
                                 achieved=max(a_hi, a_lo))
        prev_hi, prev_lo = a_hi, a_lo
        n_hi += 1
        n_lo -= 1


def prime_form(tau: complex, z: complex, tol: SeriesTolerance = DEFAULT_TOL,
               route: str = "auto") -> complex:
    """Elliptic prime form K(tau, z) = exp(-P_0(tau, z)).

    Two routes: the defining series (radius D(Lambda_tau) around 0) and the
    theta/eta quotient -i*theta_1/eta^3 (any z).  K vanishes exactly on the
    lattice; z there returns 0 exactly.
    """
    tau = require_tau(tau)
    z = complex(z)
    dmin = lattice_min(tau)
    z_near, _, _ = reduce_mod_lattice(tau, z)
    if abs(z_near) < 1e-13 * dmin:
        return 0j
    if route == "auto":
        route = "series" if abs(z) < 0.5 * dmin else "theta"
    if route == "series":
        if not abs(z) < dmin:
            raise InvalidArgumentError(
                f"series route needs |z| < D(Lambda_tau) = {dmin:.6g}, got |z| = {abs(z):.6g}")
        r = abs(z) / dmin
        eis = eisenstein_range(64, tau, tol)
        total = 0j
        zp = z * z
        k = 2
        while True:
            total += eis[k] / k * zp
            zp *= z * z
            k += 2
            tail = _EISEN_LATTICE_BOUND * r**k / (k * (1.0 - r * r))
            if tail < tol.abs_tol:
                break
            if k >= len(eis):
                eis = eisenstein_range(2 * len(eis), tau, tol)
        return z * cmath.exp(-total)
    if route == "theta":
        return -1j * theta1(tau, z, tol) / dedekind_eta(tau, tol) ** 3
    raise InvalidArgumentError(f"unknown prime_form route {route!r}")
