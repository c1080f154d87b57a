"""Hastings-McLeod solution of q'' = 2q^3 + sq and the Tracy-Widom integral formulas.

Marching leftwards from q ~ Ai is exponentially unstable, so the solution is
computed as a two-point boundary value problem by Chebyshev collocation with
damped Newton iterations.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
import scipy.linalg

from .airyfun import airy
from .quadrature import gauss_legendre

log = logging.getLogger("airykit")


class SolverError(RuntimeError):
    pass


class ConsistencyError(RuntimeError):
    pass


def cheb(n):
    """Chebyshev points x_j = cos(pi j / n) on [-1, 1] and the differentiation matrix."""
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    X = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (X + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def left_asymptote(s):
    """sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6) + 10657/(1024 s^9)), s -> -oo."""
    return math.sqrt(-s / 2.0) * (1 + 1 / (8 * s ** 3) - 73 / (128 * s ** 6)
                                  + 10657 / (1024 * s ** 9))


@dataclass(frozen=True)
class HastingsMcLeodSolution:
    s_grid: np.ndarray      # decreasing, s_max ... s_min
    q: np.ndarray
    q_prime: np.ndarray
    boundary_anchor: float
    s_min: float
    newton_residual: float
    meta: dict = field(default_factory=dict, compare=False)

    def _bary(self, s, vals):
        s = np.atleast_1d(np.asarray(s, float))
        n = len(self.s_grid) - 1
        w = (-1.0) ** np.arange(n + 1)
        w[0] *= 0.5
        w[-1] *= 0.5
        d = s[:, None] - self.s_grid[None, :]
        exact = d == 0
        d[exact] = 1.0
        t = w[None, :] / d
        out = (t @ vals) / t.sum(axis=1)
        hit = exact.any(axis=1)
        if hit.any():
            out[hit] = vals[np.argmax(exact[hit], axis=1)]
        return out

    def __call__(self, s):
        v = self._bary(s, self.q)
        return float(v[0]) if np.ndim(s) == 0 else v

    def derivative(self, s):
        v = self._bary(s, self.q_prime)
        return float(v[0]) if np.ndim(s) == 0 else v


def hastings_mcleod(s_min=-10.0, s_max=8.0, step_control=1e-10, n=200, max_iter=60):
    """Solve q'' = 2q^3 + sq on [s_min, s_max] with q(s_max) = Ai(s_max)."""
    if s_min < -10 or s_max < 6:
        raise ValueError("need s_min >= -10 and s_max >= 6")
    x, D = cheb(n)
    h = 0.5 * (s_max - s_min)
    s = s_min + h * (x + 1)          # s[0] = s_max, decreasing
    D = D / h
    D2 = D @ D
    a_max = airy(s_max)[0]
    q_left = left_asymptote(s_min)

    ai_s = airy(s)[0]
    q = np.sqrt(np.maximum(-s / 2.0, 0.0) + ai_s ** 2)
    q[0], q[-1] = a_max, q_left

    def residual(q):
        r = D2 @ q - 2 * q ** 3 - s * q
        r[0] = q[0] - a_max
        r[-1] = q[-1] - q_left
        return r

    r = residual(q)
    nr = np.max(np.abs(r))
    for it in range(max_iter):
        J = D2 - np.diag(6 * q ** 2 + s)
        J[0, :] = 0.0
        J[0, 0] = 1.0
        J[-1, :] = 0.0
        J[-1, -1] = 1.0
        dq = scipy.linalg.solve(J, -r)
        lam = 1.0
        while True:
            qn = q + lam * dq
            rn = residual(qn)
            nn = np.max(np.abs(rn))
            if nn < nr or lam < 1e-4:
                break
            lam *= 0.5
        q, r, nr = qn, rn, nn
        if np.max(np.abs(lam * dq)) < step_control * max(1.0, np.max(np.abs(q))):
            break
    else:
        raise SolverError("collocation did not converge; max residual %.3e" % nr)
    if nr > 1e-6:
        raise SolverError("collocation residual too large: %.3e" % nr)
    sol = HastingsMcLeodSolution(s, q, D @ q, s_max, s_min, nr, {"n": n, "iterations": it + 1})
    return sol


_default = {}


def default_solution():
    sol = _default.get("sol")
    if sol is None:
        sol = _default["sol"] = hastings_mcleod()
    return sol


def _tail_integrals(a):
    """int_a^oo Ai^2, int_a^oo x Ai^2, int_a^oo Ai (closed forms and one rule)."""
    ai, aip = airy(a)
    i0 = aip * aip - a * ai * ai
    i1 = -(a * a * ai * ai - a * aip * aip + ai * aip) / 3.0
    r = gauss_legendre(60, a, a + 14.0)
    j0 = float(np.dot(r.weights, airy(r.nodes)[0]))
    return i0, i1, j0


def _tail_x2(a):
    r = gauss_legendre(60, a, a + 14.0)
    return float(np.dot(r.weights, r.nodes ** 2 * airy(r.nodes)[0] ** 2))


def gue_exponents(s, soln):
    """(int_s^oo (x-s) q^2, int_s^oo (x-s)^2 q^2, int_s^oo q)."""
    smax = soln.boundary_anchor
    if not (soln.s_min <= s <= smax):
        raise ValueError("s = %g outside the solution grid" % s)
    if s < smax:
        r = gauss_legendre(max(40, int(8 * (smax - s)) + 40), s, smax)
        qv = soln(r.nodes)
        e1 = float(np.dot(r.weights, (r.nodes - s) * qv ** 2))
        e2 = float(np.dot(r.weights, (r.nodes - s) ** 2 * qv ** 2))
        e0 = float(np.dot(r.weights, qv))
    else:
        e0 = e1 = e2 = 0.0
    i0, i1, j0 = _tail_integrals(smax)
    x2 = _tail_x2(smax)
    e1 += i1 - s * i0
    e2 += x2 - 2 * s * i1 + s * s * i0
    e0 += j0
    return e1, e2, e0


VARIANTS = ("standard", "printed")
_selection = {}


def _fredholm_gue0():
    from .fredholm import nystrom_det
    from .kernels import airy_kernel_op
    from .quadrature import semi_infinite_rule
    return nystrom_det(airy_kernel_op(), semi_infinite_rule(0.0, 60))


def select_variant(soln=None, reference=None):
    """Pick the exponent variant that matches the Fredholm value at s = 0.

    'standard' is exp(-int (x-s) q^2), 'printed' is exp(-int (x-s)^2 q^2).
    """
    soln = soln or default_solution()
    key = id(soln)
    if key in _selection and reference is None:
        return _selection[key]
    ref = _fredholm_gue0() if reference is None else reference
    e1, e2, _ = gue_exponents(0.0, soln)
    vals = {"standard": math.exp(-e1), "printed": math.exp(-e2)}
    good = [v for v in VARIANTS if abs(vals[v] - ref) <= 1e-4]
    if not good:
        raise ConsistencyError("neither exponent variant matches F_GUE(0) = %.10f: %r" % (ref, vals))
    choice = min(good, key=lambda v: abs(vals[v] - ref))
    log.info("Painleve exponent variant selected: %s (%r vs Fredholm %.12f)", choice, vals, ref)
    _selection[key] = {"variant": choice, "values": vals, "fredholm": ref}
    return _selection[key]


def f_gue_painleve(s, soln=None, variant=None):
    soln = soln or default_solution()
    if variant is None:
        variant = select_variant(soln)["variant"]
    e1, e2, _ = gue_exponents(s, soln)
    return math.exp(-(e1 if variant == "standard" else e2))


def f_goe_painleve(s, soln=None, variant=None):
    soln = soln or default_solution()
    _, _, e0 = gue_exponents(s, soln)
    return math.exp(-0.5 * e0) * math.sqrt(f_gue_painleve(s, soln, variant))


def ode_residual(soln, h=1e-2, pts=None):
    """max |q'' - 2q^3 - sq| with a fourth-order central difference for q''."""
    if pts is None:
        pts = np.linspace(soln.s_min + 3 * h, soln.boundary_anchor - 3 * h, 301)
    q = lambda v: soln(v)
    d2 = (-q(pts + 2 * h) + 16 * q(pts + h) - 30 * q(pts) + 16 * q(pts - h) - q(pts - 2 * h)) / (12 * h * h)
    qq = q(pts)
    return float(np.max(np.abs(d2 - 2 * qq ** 3 - pts * qq)))
