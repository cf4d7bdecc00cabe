"""The self-sewing pipeline: domain test, period matrix with explicit
log-branch handling, necklace expansion, the Heisenberg/modular action and
its equivariance residuals, degeneration formulas, Newton inversion in the
chi chart, and the composition into the two-tori chart.

The covering space that makes log(-rho/K^2) single-valued is replaced by an
integer ``branch`` carried on every point; group actions transport it so the
lifted logarithm law holds exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import (
    DEFAULT_TOL,
    SeriesTolerance,
    eisenstein,
    eisenstein_q,
    prime_form,
)
from .epsilon import DomainCheck, EpsPoint, _newton, invert_eps
from .errors import BudgetError, DomainError, InvalidArgumentError
from .lattice import TWO_PI_I, lattice_distance, mobius, require_tau
from .moments import beta_vector, r_matrix, solve_id_minus
from .siegel import PeriodMatrix, symplectic_action
from .sphere import catalan_f, catalan_g

_NECKLACE_BUDGET = 2_000_000


@dataclass(frozen=True)
class RhoPoint:
    tau: complex
    w: complex
    rho: complex
    branch: int = 0


@dataclass(frozen=True)
class ChiPoint:
    tau: complex
    w: complex
    chi: complex

    def rho_point(self, branch: int = 0) -> RhoPoint:
        return RhoPoint(self.tau, self.w, -self.w**2 * self.chi, branch)


@dataclass(frozen=True)
class LElement:
    """Generator data for L = Hhat . Gamma_1."""

    kind: str  # "mu" | "gamma1"
    abc: tuple[int, int, int] | None = None
    mat: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("mu", "gamma1"):
            raise InvalidArgumentError(f"unknown L element kind {self.kind!r}")
        if self.kind == "gamma1":
            (a, b), (c, d) = self.mat
            if a * d - b * c != 1:
                raise InvalidArgumentError("gamma1 must have determinant 1")

    def sp4(self) -> np.ndarray:
        if self.kind == "mu":
            a, b, c = self.abc
            return np.array([[1, 0, 0, b],
                             [a, 1, b, c],
                             [0, 0, 1, -a],
                             [0, 0, 0, 1]], dtype=int)
        (a, b), (c, d) = self.mat
        g = np.eye(4, dtype=int)
        g[0, 0], g[0, 2], g[2, 0], g[2, 2] = a, b, c, d
        return g


def in_domain_rho(p: RhoPoint) -> DomainCheck:
    """|w - lambda| > 2|rho|^(1/2) > 0 for every lattice point lambda."""
    require_tau(p.tau)
    if p.rho == 0:
        return DomainCheck(False, math.inf)
    dist = lattice_distance(p.tau, p.w)
    margin = 2.0 * math.sqrt(abs(p.rho)) / dist
    return DomainCheck(margin < 1.0, margin)


def _log_head(p: RhoPoint, tol: SeriesTolerance) -> complex:
    """Branch-resolved logarithm Log(-rho / K(tau,w)^2) + 2pi*i*branch."""
    k = prime_form(p.tau, p.w, tol)
    return cmath.log(-p.rho / (k * k)) + TWO_PI_I * p.branch


def period_matrix_rho(p: RhoPoint, n: int = 12,
                      tol: SeriesTolerance = DEFAULT_TOL,
                      half_power_sign: int = 1) -> PeriodMatrix:
    """Genus-two period matrix of the self-sewn torus.

    2pi*i*Om11 = 2pi*i*tau - rho * sigma((I-R)^-1 (1,1));
    2pi*i*Om12 = w - rho^(1/2) * sigma(beta (I-R)^-1 (1));
    2pi*i*Om22 = Log(-rho/K^2) + 2pi*i*branch - beta (I-R)^-1 beta_bar^T,
    where sigma sums block entries at (k,l) = (1,1).
    """
    check = in_domain_rho(p)
    if not check.ok:
        raise DomainError(f"(tau, w, rho) outside D^rho, margin {check.margin:.3f}")
    r = r_matrix(p.tau, p.w, p.rho, n, tol, half_power_sign)
    beta = beta_vector(p.tau, p.w, p.rho, n, tol, half_power_sign)
    rows = np.zeros((2 * n, 2), dtype=complex)
    rows[0, 0] = 1.0       # unit vectors at (a, k=1)
    rows[n, 1] = 1.0
    cols = solve_id_minus(r.flat, rows)          # (I-R)^-1 e_(b,1)
    sig11 = cols[0, 0] + cols[0, 1] + cols[n, 0] + cols[n, 1]
    beta_inv = solve_id_minus(r.flat.T, beta.flat)  # beta (I-R)^-1 as column
    sig_b1 = beta_inv @ rows[:, 0] + beta_inv @ rows[:, 1]
    bbar = beta.barred().flat
    sr = half_power_sign * cmath.sqrt(p.rho)
    om11 = TWO_PI_I * p.tau - p.rho * sig11
    om12 = p.w - sr * sig_b1
    om22 = _log_head(p, tol) - beta_inv @ bbar
    return PeriodMatrix(om11 / TWO_PI_I, om12 / TWO_PI_I, om22 / TWO_PI_I)


def _rho_chain_weights(r, n_order: int, budget: int):
    """Yield ((k0,a0), (k1,a1), weight) over necklace chains whose total
    parameter exponent fits the budget; single nodes yield weight 1."""
    count = 0
    for a0 in (1, 2):
        for k0 in range(1, budget + 1):
            yield (k0, a0), (k0, a0), 1.0 + 0j  # degenerate necklace

    def entry(ka, lb):
        (k, a), (l, b) = ka, lb
        return r.flat[(a - 1) * n_order + k - 1, (b - 1) * n_order + l - 1]

    def rec(cur, weight, spent):
        nonlocal count
        for b in (1, 2):
            for l in range(1, budget + 1):
                # edge (k,a) -> (l,b) costs (k+l)/2; track via doubled units
                cost2 = cur[0] + l
                if spent + cost2 > 2 * budget:
                    break
                count += 1
                if count > _NECKLACE_BUDGET:
                    raise BudgetError("necklace enumeration budget exceeded")
                w = weight * entry(cur, (l, b))
                if w != 0:
                    yield (l, b), w
                    yield from rec((l, b), w, spent + cost2)

    for a0 in (1, 2):
        for k0 in range(1, budget + 1):
            start = (k0, a0)
            # exponent bookkeeping in half units: chain spans (k0+...+kend)/2
            for end, w in rec(start, 1.0 + 0j, 0):
                yield start, end, w


def necklace_period_rho(p: RhoPoint, max_rho_order: int,
                        tol: SeriesTolerance = DEFAULT_TOL) -> PeriodMatrix:
    """Necklace-sum evaluation of the self-sewing period matrix, exact in
    rho through max_rho_order; agrees with the matrix route to
    O(rho^(max_rho_order+1))."""
    check = in_domain_rho(p)
    if not check.ok:
        raise DomainError(f"point outside D^rho, margin {check.margin:.3f}")
    if max_rho_order < 1:
        raise InvalidArgumentError("max_rho_order must be >= 1")
    n = max_rho_order
    r = r_matrix(p.tau, p.w, p.rho, n, tol)
    beta = beta_vector(p.tau, p.w, p.rho, n, tol)
    bbar = beta.barred()

    def beta_at(ka):
        k, a = ka
        return beta.flat[(a - 1) * n + k - 1]

    def bbar_at(ka):
        k, a = ka
        return bbar.flat[(a - 1) * n + k - 1]

    om11 = 0j
    om_b1 = 0j
    om_bb = 0j
    sr = cmath.sqrt(p.rho)
    for start, end, w in _rho_chain_weights(r, n, max_rho_order):
        (k0, a0), (k1, a1) = start, end
        if k0 == 1 and k1 == 1:
            om11 += w
        if k1 == 1:
            om_b1 += beta_at(start) * w
        om_bb += beta_at(start) * w * bbar_at(end)
    om11_full = TWO_PI_I * p.tau - p.rho * om11
    om12_full = p.w - sr * om_b1
    om22_full = _log_head(p, tol) - om_bb
    return PeriodMatrix(om11_full / TWO_PI_I, om12_full / TWO_PI_I,
                        om22_full / TWO_PI_I)


def l_action_rho(g: LElement, p: RhoPoint,
                 tol: SeriesTolerance = DEFAULT_TOL) -> RhoPoint:
    """Left action of L on D^rho with branch transport.

    mu(a,b,c) translates w by 2pi*i(a tau + b) and shifts the lifted log by
    2pi*i a^2 tau + 2aw + 2pi*i(ab+c); gamma1 rescales (w, rho) by the
    cocycle and shifts the lifted log by -c1 w^2 / (2pi*i (c1 tau + d1)).
    The integer branch of the image realizes those laws exactly.
    """
    check = in_domain_rho(p)
    if not check.ok:
        raise DomainError("point outside D^rho")
    head = _log_head(p, tol)
    if g.kind == "mu":
        a, b, c = g.abc
        img = RhoPoint(p.tau, p.w + TWO_PI_I * (a * p.tau + b), p.rho, 0)
        lifted = head + TWO_PI_I * a * a * p.tau + 2.0 * a * p.w + TWO_PI_I * (a * b + c)
    else:
        (_, _), (c1, d1) = g.mat
        j = c1 * p.tau + d1
        img = RhoPoint(mobius(g.mat, p.tau), p.w / j, p.rho / (j * j), 0)
        lifted = head - c1 * p.w**2 / (TWO_PI_I * j)
    base = _log_head(img, tol)  # branch-0 head at the image point
    shift = (lifted - base) / TWO_PI_I
    branch = round(shift.real)
    if abs(shift - branch) > 1e-6:
        raise InvalidArgumentError(
            f"branch transport failed to land on an integer: {shift}")
    img = RhoPoint(img.tau, img.w, img.rho, branch)
    assert in_domain_rho(img).ok
    return img


def sp4_action_rho(g: LElement, omega: PeriodMatrix) -> PeriodMatrix:
    return symplectic_action(g.sp4(), omega)


def equivariance_residual_rho(g: LElement, p: RhoPoint, n: int = 16,
                              tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """max-entry |F(g.p) - g.(F(p))| with exact branch bookkeeping."""
    left = period_matrix_rho(l_action_rho(g, p, tol), n, tol)
    right = sp4_action_rho(g, period_matrix_rho(p, n, tol))
    return left.max_abs_diff(right)


def degeneration_period(c: ChiPoint, tol: SeriesTolerance = DEFAULT_TOL) -> PeriodMatrix:
    """Leading-order (through w^2) period matrix near the two-tori
    degeneration at fixed chi; the remainder is O(w^4)."""
    require_tau(c.tau)
    if not abs(c.chi) < 0.25:
        raise DomainError("degeneration chart needs |chi| < 1/4")
    f = catalan_f(c.chi, tol)
    g = catalan_g(c.chi, tol=tol)
    e2 = eisenstein(2, c.tau, tol)
    w2 = c.w * c.w
    fac = 1.0 - 4.0 * c.chi
    om11 = TWO_PI_I * c.tau + w2 * fac * g
    om12 = c.w * cmath.sqrt(fac) * (1.0 + w2 * fac * e2 * g)
    om22 = cmath.log(f) + w2 * fac * e2
    return PeriodMatrix(om11 / TWO_PI_I, om12 / TWO_PI_I, om22 / TWO_PI_I)


def chi_period(c: ChiPoint, n: int = 12,
               tol: SeriesTolerance = DEFAULT_TOL) -> PeriodMatrix:
    """F^chi: the full rho-pipeline in the chi chart (branch 0)."""
    return period_matrix_rho(c.rho_point(), n, tol)


def _chi_seed(target: PeriodMatrix) -> ChiPoint:
    f0 = cmath.exp(TWO_PI_I * target.omega22)
    chi0 = f0 / (1.0 + f0) ** 2
    w0 = TWO_PI_I * target.omega12 / cmath.sqrt(1.0 - 4.0 * chi0)
    return ChiPoint(target.omega11, w0, chi0)


def invert_chi(target: PeriodMatrix, seed: ChiPoint | None = None,
               newton_tol: float = 1e-10, n: int = 12,
               tol: SeriesTolerance = DEFAULT_TOL) -> ChiPoint:
    """Invert F^chi near a two-tori degeneration point.

    Targets with vanishing off-diagonal entry return the w = 0 fixed point
    (tau, 0, chi) directly.
    """
    if seed is None:
        seed = _chi_seed(target)
    if abs(target.omega12) < 1e-14:
        return ChiPoint(target.omega11, 0j, seed.chi)
    goal = np.array([target.omega11, target.omega12, target.omega22])

    def f(v: np.ndarray) -> np.ndarray:
        cp = ChiPoint(v[0], v[1], v[2])
        if not cp.tau.imag > 0.0:
            raise DomainError("tau left the upper half-plane")
        if not (0 < abs(cp.chi) < 0.25):
            raise DomainError("chi left the chart")
        om = chi_period(cp, n, tol)
        return np.array([om.omega11, om.omega12, om.omega22]) - goal

    x = _newton(f, np.array([seed.tau, seed.w, seed.chi]), newton_tol)
    return ChiPoint(complex(x[0]), complex(x[1]), complex(x[2]))


def eps_from_rho(c: ChiPoint, n: int = 12, newton_tol: float = 1e-10,
                 tol: SeriesTolerance = DEFAULT_TOL) -> EpsPoint:
    """Composition into the two-tori chart: invert_eps(F^chi(c)).

    Leading behavior: tau1 ~ tau + w^2(1-4chi)/(24 pi i), tau2 ~
    log f(chi)/(2pi*i), eps ~ -w sqrt(1-4chi).
    """
    require_tau(c.tau)
    if abs(c.w) < 1e-14:
        f = catalan_f(c.chi, tol)
        return EpsPoint(c.tau, cmath.log(f) / TWO_PI_I, 0j)
    omega = chi_period(c, n, tol)
    return invert_eps(omega, newton_tol=newton_tol, n=n, tol=tol)
