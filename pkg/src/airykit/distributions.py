"""Distribution functions of the Airy processes as Fredholm determinants.

Most quantities come with two independent routes: an extended-kernel and a
boundary-value formula for finite-dimensional distributions, a mesh
route and an explicit-kernel route for continuum statistics, a determinant
difference and a resolvent route for the endpoint density.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
import scipy.linalg

from .airyfun import airy
from .fredholm import (NumericError, clamp_probability, det_i_minus,
                       nystrom_det, nystrom_det_block)
from .kernels import (CBRT2, TimeParameters, _exp_ai, airy_kernel_matrix,
                      airy_kernel_op, b_kernel, exp_h_kai_matrix, extended_airy1,
                      extended_airy2, gaussian, heat_b0_value, k_2to1_alpha,
                      propagator_h_value, psi_endpoint_value)
from .quadrature import gauss_legendre, mapped_rule, panel_rule, semi_infinite_rule

log = logging.getLogger("airykit")

CBRT4 = 4.0 ** (1.0 / 3.0)
# -zeta(1/2), for the discrete-monitoring shift of Broadie, Glasserman and Kou
_MZETA_HALF = 1.4603545088095868
BGK_BETA = _MZETA_HALF / math.sqrt(2 * math.pi)


class ConsistencyError(NumericError):
    pass


class CoverageError(ValueError):
    pass


def _default_order(s):
    # Airy oscillations on [s, 0] have wavelength ~ 2 pi / sqrt|s|
    return int(40 + 6 * max(-s, 0.0))


@dataclass
class DistributionTable:
    grid: np.ndarray
    values: np.ndarray
    route: str
    tolerance: float = 1e-8
    meta: dict = field(default_factory=dict)

    ROUTES = ("fredholm", "painleve", "montecarlo", "boundary_value", "extended_kernel")

    def __post_init__(self):
        self.grid = np.asarray(self.grid, float)
        self.values = np.asarray(self.values, float)
        if self.route not in self.ROUTES:
            raise ValueError("unknown route %r" % self.route)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ValueError("grid and values must be 1-d of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be increasing")

    def is_monotone(self, tol=None):
        tol = self.tolerance if tol is None else tol
        return bool(np.all(np.diff(self.values) >= -tol))

    def __call__(self, s):
        return np.interp(s, self.grid, self.values)


# ----------------------------------------------------------------------------
# Tracy-Widom distributions

def f_gue(s, order=None, with_error=False):
    """F_GUE(s) = det(I - P_s K_Ai P_s)."""
    s = float(s)
    if s < -12:
        return (0.0, 0.0) if with_error else 0.0
    order = order or _default_order(s)
    k = airy_kernel_op()
    v = nystrom_det(k, semi_infinite_rule(s, order))
    v = clamp_probability(v, "F_GUE(%g)" % s)
    if with_error:
        v2 = nystrom_det(k, semi_infinite_rule(s, 2 * order))
        return v, abs(v2 - v)
    return v


def _goe_direct(s, order):
    # det(I - P_s B_0 P_s); Ai(x + y) with x, y >= s is below 1e-19 once x + s > 16
    hi = max(16.0 - s, s + 8.0)
    r = mapped_rule(order, s, hi, "rational")
    return nystrom_det(b_kernel(0.0), r)


def _goe_shifted(s, order):
    # det(I - P_0 B_s P_0)
    hi = max(16.0 - s, 8.0)
    r = mapped_rule(order, 0.0, hi, "rational")
    return nystrom_det(b_kernel(s), r)


def goe_form_pair(s, order=None):
    """det(I - P_s B_0 P_s) and det(I - P_0 B_2s P_0).

    The two agree by the shift x -> x + s and both equal F_GOE(2s).
    """
    s = float(s)
    order = order or _default_order(2 * s)
    return _goe_direct(s, order), _goe_shifted(2 * s, order)


def f_goe(s, order=None, form="shifted", check=False, with_error=False):
    """F_GOE(s) = det(I - P_0 B_s P_0) = det(I - P_{s/2} B_0 P_{s/2})."""
    s = float(s)
    if s < -24:
        return (0.0, 0.0) if with_error else 0.0
    order = order or _default_order(s)
    if form == "shifted":
        fn = lambda o: _goe_shifted(s, o)
        other = lambda o: _goe_direct(s / 2, o)
    elif form == "direct":
        fn = lambda o: _goe_direct(s / 2, o)
        other = lambda o: _goe_shifted(s, o)
    else:
        raise ValueError("unknown form %r" % form)
    v = fn(order)
    if check:
        w = other(order)
        if abs(w - v) > 1e-10:
            raise ConsistencyError("F_GOE(%g) forms disagree: %.3e" % (s, abs(w - v)))
    v = clamp_probability(v, "F_GOE(%g)" % s)
    if with_error:
        return v, abs(fn(2 * order) - v)
    return v


def goe_mean(lo=-10.0, hi=8.0, order=80):
    """Mean of F_GOE, computed as hi - int_lo^hi F_GOE(s) ds."""
    r = gauss_legendre(order, lo, hi)
    vals = np.array([f_goe(x) for x in r.nodes])
    return hi - float(np.dot(r.weights, vals))


def f_goe_derivative(s, h=1e-3):
    return (f_goe(s + h) - f_goe(s - h)) / (2 * h)


# ----------------------------------------------------------------------------
# Finite-dimensional distributions

def _level_rules(levels, order, process="airy2"):
    if process == "airy1":
        # Ai(x + y) on (x_i, oo)^2 needs the window to reach 16 - x_i
        return [mapped_rule(order, x, max(16.0 - x, x + 8.0), "rational") for x in levels]
    return [semi_infinite_rule(x, order) for x in levels]


def _bv_operators(process):
    if process == "airy2":
        def V(dt, xs, zs):
            return exp_h_kai_matrix(dt, xs, zs)

        def X(dt, zs, ys):
            return propagator_h_value(dt, zs[:, None], ys[None, :])
    elif process == "airy1":
        def V(dt, xs, zs):
            return heat_b0_value(-dt, xs[:, None], zs[None, :])

        def X(dt, zs, ys):
            return gaussian(ys[None, :] - zs[:, None], dt)
    else:
        raise ValueError("process must be 'airy2' or 'airy1'")
    return V, X


def boundary_value_det(process, times, levels, order=32, zwidth=None, zorder=12, zlo=None):
    """Boundary-value determinant for P(A(t_i) <= x_i, i = 1..n).

    For Airy2 the operator is I - K_Ai + Pb_1 e^{(t1-t2)H} Pb_2 ... Pb_n e^{(tn-t1)H} K_Ai
    (Pb_i the projection onto (-oo, x_i]); for Airy1, e^{(t_{i+1}-t_i)Delta} and
    e^{(t1-tn)Delta} B_0.  Writing Q_i = Pb_i and telescoping with
    e^{(t1-t2)H} ... e^{(tn-t1)H} K_Ai = K_Ai, the perturbation of I equals
    sum_k U_k P_k V_k with V_k = e^{(tk-t1)H} K_Ai, U_1 = I and
    U_k = Q_1 X_1 ... Q_{k-1} X_{k-1}, so the determinant is
    det(I - [P_j V_j U_k P_k]_{jk}) on the half-lines (x_k, oo).  The
    intermediate variables live on (-oo, x_i] and are cut at zlo.
    """
    times = [float(t) for t in times]
    levels = [float(x) for x in levels]
    n = len(times)
    V, X = _bv_operators(process)
    rules = _level_rules(levels, order, process)
    if n == 1:
        xs = rules[0].nodes
        sw = np.sqrt(rules[0].weights)
        return det_i_minus(sw[:, None] * V(0.0, xs, xs) * sw[None, :])
    T = times[-1] - times[0]
    gaps = np.diff(times)
    if zlo is None:
        drift = T * T if process == "airy2" else 0.0
        zlo = min(levels) - drift - 2 * math.sqrt(40 * T) - 1.0
    if zwidth is None:
        zwidth = min(0.5, 2.0 * math.sqrt(gaps.min()))
    zr = []
    for i in range(n - 1):
        if levels[i] <= zlo:
            zr.append(None)
        else:
            zr.append(panel_rule(zlo, levels[i], zwidth, zorder))

    # R_k(z1, y) for y on the level-k rule, k >= 2
    R = {}
    if zr[0] is not None:
        z1 = zr[0].nodes
        S = None
        for k in range(1, n):
            yk = rules[k].nodes
            if k == 1:
                R[k] = X(gaps[0], z1, yk)
                if n > 2 and zr[1] is not None:
                    S = X(gaps[0], z1, zr[1].nodes)
                continue
            if S is None or zr[k - 1] is None:
                R[k] = np.zeros((len(z1), len(yk)))
                S = None
                continue
            wk = zr[k - 1].weights
            zk = zr[k - 1].nodes
            R[k] = (S * wk[None, :]) @ X(gaps[k - 1], zk, yk)
            if k + 1 < n and zr[k] is not None:
                S = (S * wk[None, :]) @ X(gaps[k - 1], zk, zr[k].nodes)
            else:
                S = None

    sws = [np.sqrt(r.weights) for r in rules]
    blocks = []
    for j in range(n):
        xj = rules[j].nodes
        dt = times[j] - times[0]
        vz = None
        if zr[0] is not None:
            vz = V(dt, xj, zr[0].nodes) * zr[0].weights[None, :]
        row = []
        for k in range(n):
            if k == 0:
                m = V(dt, xj, rules[0].nodes)
            elif vz is None:
                m = np.zeros((len(xj), len(rules[k].nodes)))
            else:
                m = vz @ R[k]
            row.append(sws[j][:, None] * m * sws[k][None, :])
        blocks.append(row)
    a = np.block(blocks)
    if not np.all(np.isfinite(a)):
        raise NumericError("non-finite entries in the boundary-value matrix")
    return det_i_minus(a)


def airy2_fdd(params, route="extended_kernel", order=None):
    """P(A2(t_1) <= x_1, ..., A2(t_n) <= x_n)."""
    if not isinstance(params, TimeParameters):
        params = TimeParameters(*params)
    order = order or max(_default_order(min(params.levels)), 36)
    if route == "extended_kernel":
        ek = extended_airy2(params)
        v = nystrom_det_block(ek, _level_rules(params.levels, order))
    elif route == "boundary_value":
        v = boundary_value_det("airy2", params.times, params.levels, order)
    else:
        raise ValueError("unknown route %r" % route)
    return clamp_probability(v, "Airy2 fdd")


def airy1_fdd(params, route="extended_kernel", order=None, theta=0.5):
    """P(A1(t_1) <= x_1, ..., A1(t_n) <= x_n)."""
    if not isinstance(params, TimeParameters):
        params = TimeParameters(*params)
    order = order or max(_default_order(2 * min(params.levels)), 36)
    if route == "extended_kernel":
        ek = extended_airy1(params, theta=theta)
        v = nystrom_det_block(ek, _level_rules(params.levels, order, "airy1"))
    elif route == "boundary_value":
        v = boundary_value_det("airy1", params.times, params.levels, order)
    else:
        raise ValueError("unknown route %r" % route)
    return clamp_probability(v, "Airy1 fdd")


# ----------------------------------------------------------------------------
# Parabolic barriers in the spectral variable

def parabola_barrier_prob(m, l, r, lam_order=64, width=0.5, panel_order=12):
    """P(A2(t) <= t^2 + m for t in [l, r]) from the explicit reflected kernel.

    With K_Ai = B_0 P_0 B_0 and e^{TH} B_0 = B_0 e^{-T lam}, T = r - l, the
    probability becomes det(I - P_0 N P_0) in the spectral variable, where
    N = e^{-T(lam+mu)/2} B_0 D B_0 and D = e^{-TH} - Theta is the part of the
    free propagator carried by paths that touch the barrier.  D is e^{-TH}
    unless both end points lie below the barrier (x <= a1 = l^2 + m,
    y <= a2 = r^2 + m), where it is the reflected kernel
    R(x, y) = exp(lx - ry + (r^3 - l^3)/3) G(x - l^2 + y - r^2 - 2m, T).
    The x-integral of R against the Airy functions over the whole line has
    a closed form; only integrals over the complementary half-lines are
    done numerically, which avoids the exponential growth of R as x -> -oo.
    """
    m = float(m)
    l, r = float(l), float(r)
    T = r - l
    if not T > 0:
        raise ValueError("need l < r")
    if r < -l:
        # the split below is benign when the factor e^{-ry} damps the
        # reflected kernel; time reversal maps [l, r] to [-r, -l]
        l, r = -r, -l
    a1 = l * l + m
    a2 = r * r + m
    Lam = max(18.0 - 2 * m, 8.0)
    rl = gauss_legendre(lam_order, 0.0, Lam)
    lam = rl.nodes
    half = 0.5 * T

    # (i), (ii-a): restrictions of e^{-TH} to x > a1 and to y > a2
    N = np.exp(half * (lam[None, :] - lam[:, None])) * airy_kernel_matrix(a1 + lam, a1 + lam)
    N += np.exp(half * (lam[:, None] - lam[None, :])) * airy_kernel_matrix(a2 + lam, a2 + lam)

    # x > a1 and y > a2, counted twice above
    xa = panel_rule(a1, max(a1 + 4.0, 18.0), width, panel_order)
    ya = panel_rule(a2, max(a2 + 4.0, 18.0), width, panel_order)
    ax = _exp_ai(-half * lam[None, :], xa.nodes[:, None] + lam[None, :]) * xa.weights[:, None]
    ay = _exp_ai(-half * lam[None, :], ya.nodes[:, None] + lam[None, :]) * ya.weights[:, None]
    E = propagator_h_value(T, xa.nodes[:, None], ya.nodes[None, :])
    N -= ax.T @ E @ ay

    # reflected part over x <= a1, y <= a2
    c0 = l * l + r * r + 2 * m
    K0 = (r ** 3 - l ** 3) / 3.0 - r * c0 + r * r * T + 2 * T ** 3 / 3.0 + T * (c0 - 2 * r * T)
    # whole line: int Ai(x+lam) e^{2lx} Ai(2a1 - x + mu) dx by the convolution identity
    ex = K0 + T * lam[None, :] - half * (lam[:, None] + lam[None, :]) + l * (2 * a1 + lam[None, :] - lam[:, None])
    N += _exp_ai(ex, (lam[:, None] + lam[None, :] + 2 * m) / CBRT2) / CBRT2
    # minus x > a1
    left = _exp_ai(-half * lam[None, :] + l * xa.nodes[:, None] + 0.5 * K0, xa.nodes[:, None] + lam[None, :])
    right = _exp_ai(l * xa.nodes[:, None] + 0.5 * K0 + half * lam[None, :],
                    2 * a1 - xa.nodes[:, None] + lam[None, :])
    N -= (left * xa.weights[:, None]).T @ right
    # minus x <= a1, y > a2
    wy = max(a2 + 4.0, 18.0) - a2
    shift = 2 * min(l, 0.0) * T
    xlo = a1 + shift - wy - 2 * math.sqrt(40 * T) - 2.0
    xb = panel_rule(xlo, a1, width, panel_order)
    axb = airy(xb.nodes[:, None] + lam[None, :])[0] * np.exp(-half * lam[None, :]) * xb.weights[:, None]
    X, Y = xb.nodes[:, None], ya.nodes[None, :]
    Rm = np.exp(l * X - r * Y + (r ** 3 - l ** 3) / 3.0 - np.square(X + Y - c0) / (4 * T)) / math.sqrt(4 * math.pi * T)
    N -= axb.T @ Rm @ ay

    sw = np.sqrt(rl.weights)
    a = sw[:, None] * N * sw[None, :]
    if not np.all(np.isfinite(a)):
        raise NumericError("non-finite entries in the parabola kernel")
    return det_i_minus(a)


def airy2_sup_parabola(m, L=None, route="finite_L", order=None):
    """P(A2(t) <= t^2 + m on [-L, L]) (finite_L) or its L -> oo limit F_GOE(4^{1/3} m)."""
    if route == "closed_form":
        s = CBRT4 * m
        return _goe_shifted(s, order or _default_order(s))
    if route != "finite_L":
        raise ValueError("unknown route %r" % route)
    if L is None or not L > 0:
        raise ValueError("finite_L needs L > 0")
    kw = {} if order is None else {"lam_order": order}
    return clamp_probability(parabola_barrier_prob(m, -L, L, **kw), "parabola probability")


# ----------------------------------------------------------------------------
# Airy_{2->1}

def g_2to1(alpha, m, order=None, route="kernel", L=None):
    """G_alpha(m) = det(I - P_m K_alpha P_m).

    route="sup" (alpha = 0 only) uses P(A2(t) <= t^2 + m for t in [-L, 0])
    with the explicit reflected kernel; L = 3 is already converged to 1e-15.
    """
    alpha, m = float(alpha), float(m)
    if route == "sup":
        if alpha != 0:
            raise ValueError("the sup route is implemented at alpha = 0 only")
        return parabola_barrier_prob(m, -(L or 3.0), 0.0)
    order = order or max(_default_order(m), 48)
    if alpha < 0:
        order += int(4 * min(-alpha, 5))
    k = k_2to1_alpha(alpha)
    hi = max(m, 0.0) + 16.0 + max(0.0, alpha) ** 2
    r = mapped_rule(order, m, hi, "rational")
    return clamp_probability(nystrom_det(k, r), "G_alpha")


# ----------------------------------------------------------------------------
# Airy1 persistence

def _first_passage_rules(L, v_order, s_max, s_width):
    rv = gauss_legendre(v_order, 0.0, math.sqrt(L))
    rs = panel_rule(0.0, s_max, s_width, 12)
    return rv, rs


def airy1_persistence(m, L, v_order=32, x_order=48, log=False):
    """P(A1(t) <= m for t in [0, L]).

    By the first-passage decomposition of the killed heat kernel,
    e^{L Delta} - Lambda = 1_{x>m} e^{L Delta} + 1_{x<=m} int_0^L h_x(sig) e^{(L-sig)Delta}(m, .) dsig
    with h_x(sig) = (m-x) exp(-(m-x)^2/4sig)/sqrt(4 pi sig^3).  Composing with
    e^{-L Delta} B_0 and moving the factors around gives det(I - BA) on
    L^2(m, oo) + L^2[0, L].  The sig^{-1/2} singularity of the first-passage
    average is removed by sig = v^2, and z = m - 2 sqrt(sig) s.
    """
    m, L = float(m), float(L)
    if not L > 0:
        raise ValueError("persistence needs L > 0")
    if L > 4.0:
        # the first-passage blocks grow like e^{L^3} against a determinant of
        # size e^{-3L}; beyond L = 4 double precision keeps no digits
        raise NumericError("persistence for L = %g > 4 is beyond double precision cancellation" % L)
    rv, rs = _first_passage_rules(L, v_order, L ** 1.5 + 8.0, 0.4)
    v = rv.nodes
    sig = v * v
    s, ws = rs.nodes, rs.weights
    ker = (2.0 / math.sqrt(math.pi)) * s * np.exp(-s * s) * ws      # s-weights
    # e^{-s^2} kept in the exponent where it meets the growing heat factor
    ker_log = -s * s
    ker_pre = (2.0 / math.sqrt(math.pi)) * s * ws
    z = m - 2.0 * v[:, None] * s[None, :]                            # (v, s)
    xh = max(m + 8.0, 16.0 - m)
    rx = mapped_rule(x_order, m, xh, "rational")
    x, wx = rx.nodes, rx.weights

    def phi(sg, zz, extra=0.0):
        # e^{extra} e^{-sig Delta} B_0 (m, z) = e^{extra - 2sig^3/3 - sig(m+z)} Ai(m + z + sig^2)
        y = m + zz
        return _exp_ai(extra - 2.0 * sg ** 3 / 3.0 - sg * y, y + sg * sg)

    # blocks of BA; columns indexed by sig carry the factor 2 dv (sig^{-1/2} absorbed)
    A_xx = airy(x[:, None] + x[None, :])[0]
    A_xs = np.einsum("ivs,s->iv", airy(x[:, None, None] + z[None, :, :])[0], ker)
    A_sx = phi(sig[:, None], x[None, :])
    A_ss = np.einsum("avs,s->av", phi(sig[:, None, None], z[None, :, :], ker_log), ker_pre)
    M = np.block([[A_xx * wx[None, :], A_xs * (2 * rv.weights)[None, :]],
                  [A_sx * wx[None, :], A_ss * (2 * rv.weights)[None, :]]])
    if not np.all(np.isfinite(M)):
        raise NumericError("non-finite entries in the persistence matrix")
    lu, piv = scipy.linalg.lu_factor(np.eye(len(M)) - M, check_finite=False)
    d = np.diag(lu)
    sign = (-1.0) ** np.count_nonzero(piv != np.arange(len(piv))) * np.prod(np.sign(d))
    logdet = float(np.sum(np.log(np.abs(d))))
    if log:
        return logdet
    if sign < 0:
        return clamp_probability(-math.exp(logdet), "persistence")
    return math.exp(logdet)


@dataclass
class PersistenceFit:
    kappa: float
    intercept: float
    residual: float
    L_grid: tuple
    log_p: tuple


def persistence_rate(m, L_grid=(1.0, 1.5, 2.0, 2.5), **kw):
    """Least-squares fit log P(L) = c - kappa L."""
    Ls = np.asarray(L_grid, float)
    if len(Ls) < 2:
        raise ValueError("need at least two L values")
    lp = np.array([airy1_persistence(m, L, log=True, **kw) for L in Ls])
    A = np.vstack([np.ones_like(Ls), -Ls]).T
    (c, kappa), *_ = np.linalg.lstsq(A, lp, rcond=None)
    res = float(np.max(np.abs(lp - (c - kappa * Ls))))
    return PersistenceFit(float(kappa), float(c), res, tuple(Ls), tuple(lp))


# ----------------------------------------------------------------------------
# Endpoint of the maximizer

class _EndpointSystem:
    """A = P_0 B_{4^{1/3} m} P_0 on a fixed rule, factorized once per m."""

    def __init__(self, m, order=56):
        self.m = float(m)
        s = CBRT4 * self.m
        hi = max(16.0 - 2 * s, 8.0)
        self.rule = mapped_rule(order, 0.0, hi, "rational")
        x = self.rule.nodes
        self.sw = np.sqrt(self.rule.weights)
        a = self.sw[:, None] * airy(x[:, None] + x[None, :] + s)[0] * self.sw[None, :]
        self.a = a
        self.lu = scipy.linalg.lu_factor(np.eye(len(x)) - a, check_finite=False)
        d = np.diag(self.lu[0])
        self.det = float(np.prod(d) * (-1.0) ** np.count_nonzero(self.lu[1] != np.arange(len(d))))

    def vectors(self, t):
        x = CBRT2 * self.rule.nodes
        u = psi_endpoint_value(t, self.m, x) * self.sw
        w = psi_endpoint_value(-t, self.m, x) * self.sw
        return u, w

    def gamma(self, t):
        u, w = self.vectors(t)
        sol = scipy.linalg.lu_solve(self.lu, u, check_finite=False)
        return CBRT2 * float(np.dot(w, sol))

    def density_resolvent(self, t):
        return self.det * self.gamma(t)

    def density_difference(self, t):
        u, w = self.vectors(t)
        b = CBRT2 * np.outer(u, w)
        return det_i_minus(self.a - b) - self.det


def endpoint_joint_density(t, m, route="resolvent", order=56):
    """Joint density f(t, m) of the location and value of max (A2(t) - t^2)."""
    sysm = _EndpointSystem(m, order)
    if route == "determinant_difference":
        v = sysm.density_difference(t)
    elif route == "resolvent":
        d = np.abs(np.diag(sysm.lu[0]))
        if d.min() <= 1e-14 * max(d.max(), 1.0):
            log.warning("resolvent singular at m=%g; using the determinant difference", m)
            v = sysm.density_difference(t)
        else:
            v = sysm.density_resolvent(t)
    else:
        raise ValueError("unknown route %r" % route)
    return clamp_probability(v, "endpoint density")


@dataclass
class EndpointDensityGrid:
    t_grid: np.ndarray
    m_grid: np.ndarray
    f_values: np.ndarray          # shape (len(t_grid), len(m_grid))
    marginal_t: np.ndarray
    marginal_m: np.ndarray
    stats: dict


def _trapz(y, x, axis=-1):
    return np.trapezoid(y, x, axis=axis) if hasattr(np, "trapezoid") else np.trapz(y, x, axis=axis)


def endpoint_marginals(t_grid=None, m_grid=None, order=56, edge_tol=1e-8, check=True):
    """Tabulate f(t, m), f_end(t) = int f dm and the moments of f_end."""
    t_grid = np.linspace(-3.5, 3.5, 70) if t_grid is None else np.asarray(t_grid, float)
    m_grid = np.linspace(-6.0, 6.0, 100) if m_grid is None else np.asarray(m_grid, float)
    f = np.empty((len(t_grid), len(m_grid)))
    for j, m in enumerate(m_grid):
        sysm = _EndpointSystem(m, order)
        for i, t in enumerate(t_grid):
            f[i, j] = sysm.density_resolvent(t)
    f = np.where((f < 0) & (f >= -1e-10), 0.0, f)
    if check:
        edges = {"t_min": f[0].max(), "t_max": f[-1].max(),
                 "m_min": f[:, 0].max(), "m_max": f[:, -1].max()}
        bad = {k: v for k, v in edges.items() if abs(v) > edge_tol}
        if bad:
            raise CoverageError("density above %.0e on grid edge(s): %s" % (
                edge_tol, ", ".join("%s (%.2e)" % kv for kv in sorted(bad.items()))))
    ft = _trapz(f, m_grid, axis=1)
    fm = _trapz(f, t_grid, axis=0)
    mass = float(_trapz(ft, t_grid))
    mean = float(_trapz(t_grid * ft, t_grid)) / mass
    var = float(_trapz((t_grid - mean) ** 2 * ft, t_grid)) / mass
    m4 = float(_trapz((t_grid - mean) ** 4 * ft, t_grid)) / mass
    stats = {"mass": mass, "mean": mean, "variance": var, "excess_kurtosis": m4 / var ** 2 - 3.0,
             "symmetry": float(np.max(np.abs(f - f[::-1])))}
    return EndpointDensityGrid(t_grid, m_grid, f, ft, fm, stats)


def endpoint_density_t(t, m_rule=None, order=56):
    """f_end(t) for an array of t, integrating over m by Gauss-Legendre on [-6, 6]."""
    t = np.atleast_1d(np.asarray(t, float))
    m_rule = m_rule or gauss_legendre(48, -6.0, 6.0)
    out = np.zeros(len(t))
    for m, w in zip(m_rule.nodes, m_rule.weights):
        sysm = _EndpointSystem(m, order)
        out += w * np.array([sysm.density_resolvent(tt) for tt in t])
    return out


def endpoint_tail_mass(t, width=2.5, order=24):
    """int_{|s| > t} f_end(s) ds, using the symmetry in s."""
    r = gauss_legendre(order, t, t + width)
    return 2.0 * float(np.dot(r.weights, endpoint_density_t(r.nodes)))


def _tail_exponent(t):
    return -(4.0 / 3.0) * t ** 3 + 2.0 * t * t


def fit_tail_envelope(t_fit=(3.0, 3.25, 3.5, 3.75, 4.0)):
    """Fit log tail - exponent = log C + c3 t^{3/2}, then raise C to an envelope."""
    ts = np.asarray(t_fit, float)
    lt = np.log([endpoint_tail_mass(t) for t in ts]) - _tail_exponent(ts)
    A = np.vstack([np.ones_like(ts), ts ** 1.5]).T
    (logc, c3), *_ = np.linalg.lstsq(A, lt, rcond=None)
    logc += float(np.max(lt - (logc + c3 * ts ** 1.5)))
    return {"logC": float(logc), "c3": float(c3), "t": ts, "log_tail": lt + _tail_exponent(ts)}


def endpoint_tail_check(t, envelope=None, slack=3.0):
    """Sanity bound on the tails of f_end; returns (flag, details)."""
    if t < 3:
        raise ValueError("endpoint_tail_check needs t >= 3")
    env = envelope or fit_tail_envelope()
    tail = endpoint_tail_mass(t)
    bound = math.exp(env["logC"] + env["c3"] * t ** 1.5 + _tail_exponent(t))
    ok = tail <= bound * (1 + 1e-9)
    t3 = endpoint_tail_mass(3.0)
    ok &= tail <= t3 * (1 + 1e-12)
    if t > 3:
        ratio = math.log(tail) - math.log(t3)
        ok &= ratio <= _tail_exponent(t) - _tail_exponent(3.0) + slack * (1 + t - 3.0)
    return bool(ok), {"tail": tail, "bound": bound, "tail3": t3}


# ----------------------------------------------------------------------------
# Continuum statistics on a mesh

def _mesh_prob(process, g, n_mesh, shift, order):
    l, r = g.interval
    ts = np.linspace(l, r, int(n_mesh))
    dt = (r - l) / (n_mesh - 1)
    levels = g(ts) - shift * math.sqrt(2 * dt)
    return boundary_value_det(process, ts, levels, order)


def continuum_barrier_prob(process, g, interval=None, n_mesh=65, order=24,
                           correction=True, extrapolate=True, tol=1e-2):
    """P(A(t) <= g(t) on [l, r]) for A = Airy2 or Airy1 from mesh approximations.

    The barrier is monitored at n_mesh equally spaced times.  Discrete
    monitoring of a locally Brownian path (diffusion coefficient 2) leaves
    an O(sqrt(dt)) error; correction=True lowers the barrier by
    beta sqrt(2 dt), beta = -zeta(1/2)/sqrt(2 pi), which removes the
    leading term.  With extrapolate=True the remaining first-order error is
    removed with the coarser dyadic mesh.  Returns (value, details).
    """
    if interval is not None and tuple(interval) != tuple(g.interval):
        raise ValueError("interval does not match the barrier's interval")
    if n_mesh < 2:
        raise ValueError("need n_mesh >= 2")
    shift = BGK_BETA if correction else 0.0
    fine = _mesh_prob(process, g, n_mesh, shift, order)
    coarse_n = (n_mesh - 1) // 2 + 1
    details = {"n_mesh": n_mesh, "fine": fine}
    if coarse_n >= 2:
        coarse = _mesh_prob(process, g, coarse_n, shift, order)
        inc = fine - coarse
        details.update(coarse=coarse, increment=inc)
        value = fine + inc if extrapolate else fine
        if abs(inc) > tol:
            raise NumericError("mesh refinement not converging: increment %.3e" % inc)
    else:
        value = fine
    details["value"] = value
    return clamp_probability(value, "barrier probability"), details
