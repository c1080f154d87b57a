"""Nystrom discretization of Fredholm determinants det(I - K).

A kernel K on a quadrature rule (x_i, w_i) becomes the matrix
A_ij = w_i^{1/2} K(x_i, x_j) w_j^{1/2}, and det(I - K) is approximated by
det(I - A) computed from a dense LU factorization.
"""
from dataclasses import dataclass, field
import itertools
import logging
import math

import numpy as np
import scipy.linalg

log = logging.getLogger("airykit")


class NumericError(ArithmeticError):
    pass


class ResolventError(NumericError):
    pass


class Kernel:
    """A real kernel K(x, y) with broadcasting evaluation.

    func(x, y) must broadcast over numpy arrays.  An optional conjugation
    weight w > 0 replaces K by w(x) K(x, y) / w(y), which changes no
    determinant but keeps Nystrom matrices balanced.
    """

    def __init__(self, func, domain=None, symmetric=False, conjugation=None,
                 name=None, matrix=None):
        self.func = func
        self.domain = domain
        self.symmetric = symmetric
        self.conjugation = conjugation
        self.name = name or getattr(func, "__name__", "kernel")
        self._matrix = matrix

    def __call__(self, x, y):
        v = self.func(np.asarray(x, float), np.asarray(y, float))
        if self.conjugation is not None:
            v = self.conjugation(x) * v / self.conjugation(y)
        return v

    def matrix(self, xs, ys):
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        if self._matrix is not None:
            m = self._matrix(xs, ys)
        else:
            m = self.func(xs[:, None], ys[None, :])
        m = np.asarray(m, dtype=float)
        if m.shape != (len(xs), len(ys)):
            m = np.broadcast_to(m, (len(xs), len(ys))).copy()
        if self.conjugation is not None:
            m = self.conjugation(xs)[:, None] * m / self.conjugation(ys)[None, :]
        return m

    def conjugated(self, w):
        """Same operator conjugated by w (composed with any existing weight)."""
        old = self.conjugation
        new = w if old is None else (lambda x: old(x) * w(x))
        return Kernel(self.func, self.domain, self.symmetric, new, self.name, self._matrix)

    def scaled(self, c):
        f, m = self.func, self._matrix
        return Kernel(lambda x, y: c * f(x, y), self.domain, self.symmetric,
                      self.conjugation, "%g*%s" % (c, self.name),
                      None if m is None else (lambda xs, ys: c * m(xs, ys)))

    def __repr__(self):
        return "Kernel(%s)" % self.name


@dataclass
class ExtendedKernel:
    """Block kernel on {t_1..t_n} x R.

    block(i, j, xs, ys) returns the matrix K(t_i, xs; t_j, ys).
    weight(i, xs), if given, is a conjugation weight for time slice i.
    """
    times: list
    block: object
    cutoffs: list
    weight: object = None
    name: str = "extended"

    def __post_init__(self):
        if len(self.times) < 1:
            raise ValueError("extended kernel needs n >= 1 times")
        if len(self.cutoffs) != len(self.times):
            raise ValueError("one cutoff per time required")


@dataclass(frozen=True)
class NystromMatrix:
    matrix: np.ndarray
    provenance: tuple = field(default=())


def _check_finite(m, xs, ys, name):
    bad = ~np.isfinite(m)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NumericError("non-finite value of %s at node pair (%r, %r)"
                           % (name, float(xs[i]), float(ys[j])))


def nystrom_matrix(k, rule):
    x = rule.nodes
    sw = np.sqrt(rule.weights)
    m = k.matrix(x, x)
    _check_finite(m, x, x, k.name)
    return NystromMatrix(sw[:, None] * m * sw[None, :], (k.name, id(rule)))


def det_from_lu(lu, piv):
    d = np.diag(lu)
    sign = (-1.0) ** np.count_nonzero(piv != np.arange(len(piv)))
    return sign * float(np.prod(d))


def logdet_from_lu(lu, piv):
    d = np.diag(lu)
    sign = (-1.0) ** np.count_nonzero(piv != np.arange(len(piv)))
    sign *= float(np.prod(np.sign(d)))
    return sign, float(np.sum(np.log(np.abs(d))))


def det_i_minus(a):
    """det(I - a) for a dense square matrix, via LU with partial pivoting."""
    n = a.shape[0]
    if n == 0:
        return 1.0
    lu, piv = scipy.linalg.lu_factor(np.eye(n) - a, check_finite=False)
    return det_from_lu(lu, piv)


def logdet_i_minus(a):
    n = a.shape[0]
    if n == 0:
        return 1.0, 0.0
    lu, piv = scipy.linalg.lu_factor(np.eye(n) - a, check_finite=False)
    return logdet_from_lu(lu, piv)


def nystrom_det(k, rule):
    """det(I - K) on the rule's interval."""
    return det_i_minus(nystrom_matrix(k, rule).matrix)


def nystrom_logdet(k, rule):
    return logdet_i_minus(nystrom_matrix(k, rule).matrix)


def fredholm_series(k, rule, order):
    """Partial sum sum_{n<=order} (-1)^n/n! int det[K(x_i,x_j)] by direct quadrature."""
    if order < 0 or order > 4 or int(order) != order:
        raise ValueError("fredholm_series supports order 1..4")
    x = rule.nodes
    w = rule.weights
    K = k.matrix(x, x)
    _check_finite(K, x, x, k.name)
    n = len(x)
    total = 1.0
    for p in range(1, order + 1):
        acc = 0.0
        # sum over index tuples, chunked on the first index
        rest = np.array(list(itertools.product(range(n), repeat=p - 1)), dtype=int)
        if p == 1:
            acc = float(np.dot(w, np.diag(K)))
        else:
            wr = np.prod(w[rest], axis=1)
            for i0 in range(n):
                idx = np.concatenate([np.full((len(rest), 1), i0), rest], axis=1)
                sub = K[idx[:, :, None], idx[:, None, :]]
                acc += w[i0] * float(np.dot(wr, np.linalg.det(sub)))
        total += (-1) ** p * acc / math.factorial(p)
    return total


def _merge_equal_times(ek, rules):
    times = list(ek.times)
    keep = []
    for i, t in enumerate(times):
        if keep and t == times[keep[-1]]:
            j = keep[-1]
            if ek.cutoffs[i] < ek.cutoffs[j]:
                keep[-1] = i
        else:
            keep.append(i)
    return keep


def nystrom_block_matrix(ek, rules):
    if len(rules) != len(ek.times):
        raise ValueError("need one rule per time (%d != %d)" % (len(rules), len(ek.times)))
    keep = _merge_equal_times(ek, rules)
    sws = [np.sqrt(rules[i].weights) for i in keep]
    xs = [rules[i].nodes for i in keep]
    blocks = []
    for a, i in enumerate(keep):
        row = []
        for b, j in enumerate(keep):
            m = np.asarray(ek.block(i, j, xs[a], xs[b]), float)
            if ek.weight is not None:
                m = ek.weight(i, xs[a])[:, None] * m / ek.weight(j, xs[b])[None, :]
            _check_finite(m, xs[a], xs[b], "%s[%d,%d]" % (ek.name, i, j))
            row.append(sws[a][:, None] * m * sws[b][None, :])
        blocks.append(row)
    return np.block(blocks)


def nystrom_det_block(ek, rules):
    """det(I - f K f) for an extended kernel with cutoff indicators f.

    Repeated times are collapsed to a single slice with the lower level:
    the constraints A(t) <= x and A(t) <= x' together say A(t) <= min(x, x').
    """
    return det_i_minus(nystrom_block_matrix(ek, rules))


def resolvent_bilinear(k, f, g, rule, lu=None):
    """<(I - K)^{-1} P f, P g> with one solve against the Nystrom matrix."""
    sw = np.sqrt(rule.weights)
    x = rule.nodes
    if lu is None:
        a = nystrom_matrix(k, rule).matrix
        lu = scipy.linalg.lu_factor(np.eye(len(x)) - a, check_finite=False)
        d = np.abs(np.diag(lu[0]))
        if d.min() <= 1e-14 * max(d.max(), 1.0):
            cond = np.linalg.cond(np.eye(len(x)) - a)
            raise ResolventError("I - K is numerically singular (condition ~ %.3g)" % cond)
    fv = sw * np.asarray(f(x), float)
    gv = sw * np.asarray(g(x), float)
    u = scipy.linalg.lu_solve(lu, fv, check_finite=False)
    return float(np.dot(gv, u))


def trace_norm_estimate(k, rule):
    a = nystrom_matrix(k, rule).matrix
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def clamp_probability(value, what="probability"):
    """Clamp tiny negative determinants to 0 with a diagnostic."""
    if value < 0:
        if value >= -1e-10:
            log.info("%s %.3e clamped to 0", what, value)
            return 0.0
        log.warning("%s is negative (%.3e); discretization too coarse?", what, value)
    return value
