"""The two-tori sewing pipeline: domain test, period matrix, necklace
expansion, bilinear form, the G-action and its equivariance residuals, and
Newton inversion of the sewing map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import DEFAULT_TOL, SeriesTolerance, eisenstein, weierstrass_range
from .errors import (
    BudgetError,
    ConvergenceError,
    DomainError,
    InvalidArgumentError,
)
from .lattice import TWO_PI_I, lattice_min, mobius, require_tau
from .moments import MomentMatrix, a_matrix, solve_id_minus, x_blocks
from .siegel import PeriodMatrix, symplectic_action

SL2_T = ((1, 1), (0, 1))
SL2_S = ((0, -1), (1, 0))

_NECKLACE_BUDGET = 2_000_000


@dataclass(frozen=True)
class EpsPoint:
    tau1: complex
    tau2: complex
    eps: complex


@dataclass(frozen=True)
class DomainCheck:
    ok: bool
    margin: float  # |parameter| relative to the sharp bound; < 1 inside

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class GElement:
    """Generator data for G = (SL(2,Z) x SL(2,Z)) semidirect Z_2."""

    kind: str  # "gamma1" | "gamma2" | "beta"
    mat: tuple | None = None  # 2x2 integer matrix for the gamma kinds

    def __post_init__(self):
        if self.kind not in ("gamma1", "gamma2", "beta"):
            raise InvalidArgumentError(f"unknown G element kind {self.kind!r}")
        if self.kind != "beta":
            (a, b), (c, d) = self.mat
            if a * d - b * c != 1:
                raise InvalidArgumentError("gamma must have determinant 1")

    def sp4(self) -> np.ndarray:
        g = np.eye(4, dtype=int)
        if self.kind == "beta":
            g = np.zeros((4, 4), dtype=int)
            g[0, 1] = g[1, 0] = g[2, 3] = g[3, 2] = 1
            return g
        (a, b), (c, d) = self.mat
        if self.kind == "gamma1":
            g[0, 0], g[0, 2], g[2, 0], g[2, 2] = a, b, c, d
        else:
            g[1, 1], g[1, 3], g[3, 1], g[3, 3] = a, b, c, d
        return g


def in_domain_eps(p: EpsPoint) -> DomainCheck:
    """|eps| < (1/4) D(Lambda_tau1) D(Lambda_tau2)."""
    require_tau(p.tau1)
    require_tau(p.tau2)
    bound = 0.25 * lattice_min(p.tau1) * lattice_min(p.tau2)
    margin = abs(p.eps) / bound
    return DomainCheck(margin < 1.0, margin)


def period_matrix_eps(p: EpsPoint, n: int = 12,
                      tol: SeriesTolerance = DEFAULT_TOL,
                      half_power_sign: int = 1) -> PeriodMatrix:
    """Genus-two period matrix from the moment-matrix formulas.

    2pi*i*Om11 = 2pi*i*tau1 + eps (A2 (I - A1 A2)^-1)(1,1), symmetrically for
    Om22, and 2pi*i*Om12 = -eps (I - A1 A2)^-1 (1,1).
    """
    check = in_domain_eps(p)
    if not check.ok:
        raise DomainError(f"(tau1, tau2, eps) outside D^eps, margin {check.margin:.3f}")
    a1 = a_matrix(p.tau1, p.eps, n, tol, half_power_sign)
    a2 = a_matrix(p.tau2, p.eps, n, tol, half_power_sign)
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    x12 = solve_id_minus(a1.entries @ a2.entries, e1)  # (I-A1A2)^-1 e1
    x21 = solve_id_minus(a2.entries @ a1.entries, e1)  # (I-A2A1)^-1 e1
    om11 = TWO_PI_I * p.tau1 + p.eps * (a2.entries @ x12)[0]
    om22 = TWO_PI_I * p.tau2 + p.eps * (a1.entries @ x21)[0]
    om12 = -p.eps * x12[0]
    return PeriodMatrix(om11 / TWO_PI_I, om12 / TWO_PI_I, om22 / TWO_PI_I)


def _necklace_chains(a_mats: dict[int, MomentMatrix], budget: int):
    """Yield (first_type, last_type, weight) over alternating chains with end
    labels 1 and interior labels summing to <= budget."""
    count = 0
    for t0 in (1, 2):
        # chain state: interior labels chosen so far, accumulated weight of
        # the edges consumed so far
        def rec(labels, weight, prev_label, next_type, spent):
            nonlocal count
            # close the chain: final edge prev_label -> 1 of type next_type
            w_close = weight * a_mats[next_type].entries[prev_label - 1, 0]
            yield next_type, w_close
            k = 1
            while spent + k <= budget:
                count += 1
                if count > _NECKLACE_BUDGET:
                    raise BudgetError("necklace enumeration budget exceeded")
                w = weight * a_mats[next_type].entries[prev_label - 1, k - 1]
                if w != 0:
                    yield from rec(labels + (k,), w, k, 3 - next_type, spent + k)
                k += 1

        for t_last, w in rec((), 1.0 + 0j, 1, t0, 0):
            yield t0, t_last, w


def necklace_period_eps(p: EpsPoint, max_eps_order: int,
                        tol: SeriesTolerance = DEFAULT_TOL) -> PeriodMatrix:
    """Independent evaluation of the period matrix by enumerating chequered
    necklaces with total parameter exponent <= max_eps_order.

    Agrees with ``period_matrix_eps`` to O(eps^(max_eps_order+1)).
    """
    check = in_domain_eps(p)
    if not check.ok:
        raise DomainError(f"point outside D^eps, margin {check.margin:.3f}")
    if max_eps_order < 0:
        raise InvalidArgumentError("max_eps_order must be >= 0")
    om = {(1, 1): 0j, (1, 2): 1.0 + 0j, (2, 1): 1.0 + 0j, (2, 2): 0j}
    # the degenerate necklace N0 (weight 1, exponent 0) sits in the
    # off-diagonal classes; chains carry exponent 1 + sum of interior labels
    if max_eps_order >= 1:
        n = max(1, max_eps_order - 1)
        a_mats = {1: a_matrix(p.tau1, p.eps, n, tol),
                  2: a_matrix(p.tau2, p.eps, n, tol)}
        budget = max_eps_order - 1
        for t0, t_last, w in _necklace_chains(a_mats, budget):
            if t0 == 2 and t_last == 2:
                om[(1, 1)] += w
            elif t0 == 1 and t_last == 1:
                om[(2, 2)] += w
            elif t0 == 1 and t_last == 2:
                om[(1, 2)] += w
            else:
                om[(2, 1)] += w
    pref = p.eps / TWO_PI_I
    return PeriodMatrix(p.tau1 + pref * om[(1, 1)],
                        -pref * 0.5 * (om[(1, 2)] + om[(2, 1)]),
                        p.tau2 + pref * om[(2, 2)])


def bilinear_form_eps(p: EpsPoint, x: complex, y: complex,
                      which_surface_pair: tuple[int, int], n: int = 12,
                      tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Scalar density f of the sewn bilinear form omega(x,y) = f dx dy.

    x lives on the surface-pair's first torus, y on the second, in the
    punctured-torus coordinates.
    """
    a, b = which_surface_pair
    if a not in (1, 2) or b not in (1, 2):
        raise InvalidArgumentError("surface labels must be 1 or 2")
    check = in_domain_eps(p)
    if not check.ok:
        raise DomainError(f"point outside D^eps, margin {check.margin:.3f}")
    taus = {1: p.tau1, 2: p.tau2}
    a1 = a_matrix(p.tau1, p.eps, n, tol)
    a2 = a_matrix(p.tau2, p.eps, n, tol)
    x11, x12, x21, x22 = x_blocks(a1, a2)
    xb = {(1, 1): x11, (1, 2): x12, (2, 1): x21, (2, 2): x22}
    se = np.sqrt(complex(p.eps))
    pk_x = weierstrass_range(n + 1, taus[a], x, tol)
    pk_y = weierstrass_range(n + 1, taus[b], y, tol)
    vec_x = np.array([math.sqrt(k) * se**k * pk_x[k + 1] for k in range(1, n + 1)])
    vec_y = np.array([math.sqrt(k) * se**k * pk_y[k + 1] for k in range(1, n + 1)])
    if a == b:
        abar = 3 - a
        base = weierstrass_range(2, taus[a], x - y, tol)[2]
        return base + vec_x @ xb[(abar, abar)] @ vec_y
    return vec_x @ (-np.eye(n) + xb[(3 - a, a)]) @ vec_y


def g_action_eps(g: GElement, p: EpsPoint) -> EpsPoint:
    """Left action of G on D^eps (Dehn-twist data stays implicit)."""
    if g.kind == "beta":
        img = EpsPoint(p.tau2, p.tau1, p.eps)
    elif g.kind == "gamma1":
        (_, _), (c, d) = g.mat
        img = EpsPoint(mobius(g.mat, p.tau1), p.tau2, p.eps / (c * p.tau1 + d))
    else:
        (_, _), (c, d) = g.mat
        img = EpsPoint(p.tau1, mobius(g.mat, p.tau2), p.eps / (c * p.tau2 + d))
    assert in_domain_eps(img).ok or not in_domain_eps(p).ok
    return img


def sp4_action(g: GElement, omega: PeriodMatrix) -> PeriodMatrix:
    """Action of a G element on H_2 through its Sp(4,Z) embedding."""
    return symplectic_action(g.sp4(), omega)


def equivariance_residual_eps(g: GElement, p: EpsPoint, n: int = 16,
                              tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """max-entry |F(g.p) - g.(F(p))|."""
    left = period_matrix_eps(g_action_eps(g, p), n, tol)
    right = sp4_action(g, period_matrix_eps(p, n, tol))
    return left.max_abs_diff(right)


def _eps_seed(target: PeriodMatrix, tol: SeriesTolerance) -> EpsPoint:
    om11, om22, om12 = target.omega11, target.omega22, target.omega12
    tau1 = om11 - TWO_PI_I * om12**2 * eisenstein(2, om22, tol)
    tau2 = om22 - TWO_PI_I * om12**2 * eisenstein(2, om11, tol)
    return EpsPoint(tau1, tau2, -TWO_PI_I * om12)


def _newton(f, x0: np.ndarray, newton_tol: float, max_iter: int = 50,
            rel_step: float = 1e-6):
    """Damped Newton on C^m -> C^m, each complex coordinate treated as two
    real ones; central-difference Jacobian."""
    m = len(x0)
    x = np.array(x0, dtype=complex)
    fx = f(x)
    res = float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        if res < newton_tol:
            return x
        jac = np.zeros((2 * m, 2 * m))
        for j in range(m):
            h = rel_step * (1.0 + abs(x[j]))
            for part, delta in ((0, h), (1, 1j * h)):
                xp = x.copy(); xp[j] += delta
                xm = x.copy(); xm[j] -= delta
                col = (f(xp) - f(xm)) / (2.0 * h)
                jac[0::2, 2 * j + part] = col.real
                jac[1::2, 2 * j + part] = col.imag
        rhs = np.empty(2 * m)
        rhs[0::2], rhs[1::2] = fx.real, fx.imag
        try:
            step_r = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Newton Jacobian",
                                   last_residual=res) from None
        step = step_r[0::2] + 1j * step_r[1::2]
        lam = 1.0
        for _ in range(30):
            try:
                fx_new = f(x - lam * step)
            except DomainError:
                lam *= 0.5
                continue
            res_new = float(np.max(np.abs(fx_new)))
            if res_new < res:
                break
            lam *= 0.5
        else:
            raise ConvergenceError(
                "Newton step could not reduce the residual inside the domain",
                last_residual=res)
        x = x - lam * step
        fx, res = fx_new, res_new
    if res < newton_tol:
        return x
    raise ConvergenceError(f"no convergence in {max_iter} iterations",
                           last_residual=res)


def invert_eps(target: PeriodMatrix, seed: EpsPoint | None = None,
               newton_tol: float = 1e-10, n: int = 12,
               tol: SeriesTolerance = DEFAULT_TOL) -> EpsPoint:
    """Invert the sewing map near the two-tori degeneration.

    Newton iteration on (tau1, tau2, eps); the auto-seed comes from the
    leading inversion formulas.  diag targets return (tau1, tau2, 0) exactly.
    """
    if abs(target.omega12) < 1e-15:
        return EpsPoint(target.omega11, target.omega22, 0j)
    if seed is None:
        seed = _eps_seed(target, tol)
    goal = np.array([target.omega11, target.omega22, target.omega12])

    def f(v: np.ndarray) -> np.ndarray:
        p = EpsPoint(v[0], v[1], v[2])
        if not (p.tau1.imag > 0.0 and p.tau2.imag > 0.0):
            raise DomainError("tau left the upper half-plane")
        om = period_matrix_eps(p, n, tol)
        return np.array([om.omega11, om.omega22, om.omega12]) - goal

    x = _newton(f, np.array([seed.tau1, seed.tau2, seed.eps]), newton_tol)
    return EpsPoint(complex(x[0]), complex(x[1]), complex(x[2]))
