"""Explicit kernels: Airy kernel, B_s, extended Airy kernels, semigroup kernels,
parabolic-barrier kernels, the 2->1 crossover kernel and the endpoint kernels.

All kernel functions broadcast over numpy arrays.  H = -Delta + x is the
Airy Hamiltonian; H Ai(x + lam) = -lam Ai(x + lam).
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _fallback
from .airyfun import airy, airy_scaled, HAVE_CORE, _core
from .fredholm import ExtendedKernel, Kernel, NumericError
from .quadrature import panel_rule

CBRT2 = 2.0 ** (1.0 / 3.0)


def _bcast(x, y):
    return np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))


def _ai(z):
    return airy(np.asarray(z, float))[0] if np.ndim(z) else airy(float(z))[0]


def _exp_ai(expo, z):
    """exp(expo) * Ai(z) without overflow or spurious underflow."""
    expo, z = _bcast(expo, z)
    a, _ = airy_scaled(z)
    a = np.asarray(a)
    zeta = 2.0 / 3.0 * np.where(z > 0, z, 0.0) ** 1.5
    return np.exp(expo - zeta) * a


def _exp_airy(expo, z):
    """exp(expo) * (Ai(z), Ai'(z))."""
    expo, z = _bcast(expo, z)
    a, d = airy_scaled(z)
    zeta = 2.0 / 3.0 * np.where(z > 0, z, 0.0) ** 1.5
    e = np.exp(expo - zeta)
    return e * np.asarray(a), e * np.asarray(d)


# ----------------------------------------------------------------------------
# Airy kernel and B_s

def airy_kernel(x, y):
    """K_Ai(x, y) = int_0^oo Ai(x+l) Ai(y+l) dl (Christoffel-Darboux form)."""
    x, y = _bcast(x, y)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    y = np.atleast_1d(y)
    ax, dx = airy(x)
    ay, dy = airy(y)
    diff = x - y
    near = np.abs(diff) < 1e-4
    out = (ax * dy - dx * ay) / np.where(near, 1.0, diff)
    if near.any():
        c = 0.5 * (x[near] + y[near])
        e = 0.5 * (y[near] - x[near])
        a, d = airy(c)
        out[near] = d * d - c * a * a + e * e * (2 * c * d * d - 2 * c * c * a * a + a * d) / 3.0
    return float(out[0]) if scalar else out


def airy_kernel_matrix(xs, ys):
    xs = np.ascontiguousarray(xs, dtype=float)
    ys = np.ascontiguousarray(ys, dtype=float)
    if HAVE_CORE and xs.ndim == 1 and ys.ndim == 1:
        if xs.min() < -200 or ys.min() < -200:
            raise ValueError("airy kernel argument below -200")
        return _core.airy_kernel_matrix(xs, ys)
    if xs.ndim == 1 and ys.ndim == 1:
        return _fallback.airy_kernel_matrix(xs, ys, airy)
    return airy_kernel(xs[:, None], ys[None, :])


def airy_kernel_op(shift=0.0):
    """K_Ai(x + shift, y + shift) as a Kernel."""
    if shift == 0.0:
        return Kernel(airy_kernel, symmetric=True, name="K_Ai", matrix=airy_kernel_matrix)
    return Kernel(lambda x, y: airy_kernel(x + shift, y + shift), symmetric=True,
                  name="K_Ai[%g]" % shift,
                  matrix=lambda xs, ys: airy_kernel_matrix(xs + shift, ys + shift))


def b_kernel(s):
    """B_s(x, y) = Ai(x + y + s)."""
    def f(x, y):
        return _ai(np.add(x, y) + s)
    return Kernel(f, symmetric=True, name="B_%g" % s)


def heat_b0_value(s, x, y):
    z = np.add(x, y)
    return _exp_ai(2.0 * s ** 3 / 3.0 + s * z, z + s * s)


def heat_b0(s):
    """Kernel of e^{s Delta} B_0: exp(2s^3/3 + s(x+y)) Ai(x + y + s^2), any real s."""
    return Kernel(lambda x, y: heat_b0_value(s, x, y), symmetric=True, name="e^{%g D}B0" % s)


# ----------------------------------------------------------------------------
# Semigroups of H and of the heat equation

def gaussian(z, t):
    """Heat kernel of e^{t Delta}: exp(-z^2/4t)/sqrt(4 pi t)."""
    return np.exp(-np.square(z) / (4.0 * t)) / math.sqrt(4 * math.pi * t)


def heat_kernel(t):
    if t <= 0:
        raise ValueError("heat kernel needs t > 0")
    return Kernel(lambda x, y: gaussian(np.subtract(x, y), t), symmetric=True,
                  name="e^{%g D}" % t)


def mehler_value(l, r, x, y, form="exact"):
    t = r - l
    x, y = _bcast(x, y)
    if form == "printed":
        shift = 0.0
    else:
        shift = r * r - l * l
    expo = l * x - r * y + (r ** 3 - l ** 3) / 3.0 - np.square(y - x - shift) / (4.0 * t)
    return np.exp(expo) / math.sqrt(4 * math.pi * t)


def mehler_h(l, r, form="exact"):
    """Kernel of e^{-(r-l)H} written with the time labels l < r.

    form="printed" is exp(lx - ry + (r^3-l^3)/3) exp(-(x-y)^2/4(r-l))/sqrt(4pi(r-l)).
    It coincides with the propagator only when l = -r.  The default
    form="exact" adds the drift shift r^2 - l^2 inside the Gaussian, which
    makes it equal to e^{-(r-l)H} for every l < r (both forms agree at l = -r).
    """
    if not r > l:
        raise ValueError("mehler_h needs l < r")
    return Kernel(lambda x, y: mehler_value(l, r, x, y, form),
                  symmetric=(form != "printed" or l == -r),
                  name="e^{-%gH}" % (r - l))


def propagator_h(t):
    """e^{-tH}(x, y) = exp(-(x-y)^2/4t - t(x+y)/2 + t^3/12)/sqrt(4 pi t), t > 0."""
    return mehler_h(-t / 2.0, t / 2.0)


def propagator_h_value(t, x, y):
    x, y = _bcast(x, y)
    expo = -np.square(x - y) / (4.0 * t) - t * (x + y) / 2.0 + t ** 3 / 12.0
    return np.exp(expo) / math.sqrt(4 * math.pi * t)


def lambda_rule(lo, hi, zmin, order=16):
    """Composite rule in the spectral variable for integrands Ai(z + l) with z >= zmin."""
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    # panels narrow enough for the local Airy wavelength ~ 2 pi / sqrt(|z|)
    freq = math.sqrt(max(-zmin, 0.0) + max(abs(lo), abs(hi)) + 1.0)
    width = min(1.0, 4.0 / freq)
    r = panel_rule(lo, hi, width, order)
    return r.nodes, r.weights


def airy_product_matrix(xs, ys, sx, sy, lam, wts):
    """sum_k wts_k Ai(x_i + sx lam_k) Ai(y_j + sy lam_k)."""
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    if len(lam) == 0:
        return np.zeros((len(xs), len(ys)))
    ax = airy(xs[:, None] + sx * lam[None, :])[0]
    ay = airy(ys[:, None] + sy * lam[None, :])[0]
    return (ax * wts[None, :]) @ ay.T


def _decay_cut(zmin):
    # distance beyond which Ai(z_min + l) is below ~1e-19
    return max(16.0 - zmin, 0.5)


def exp_h_kai_matrix(t, xs, ys):
    """Matrix of e^{tH}K_Ai(x, y) = int_0^oo e^{-tl} Ai(x+l) Ai(y+l) dl, t >= 0."""
    if t < 0:
        raise ValueError("exp_h_kai needs t >= 0; use a propagator for negative times")
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    if t == 0:
        return airy_kernel_matrix(xs, ys)
    hi = _decay_cut(max(xs.min(), ys.min()))
    hi = min(hi, 40.0 / t)
    lam, w = lambda_rule(0.0, hi, min(xs.min(), ys.min()))
    return airy_product_matrix(xs, ys, 1.0, 1.0, lam, w * np.exp(-t * lam))


def _elementwise(matfun):
    # broadcasting evaluation from a matrix routine (used for pointwise calls)
    def f(x, y):
        x, y = _bcast(x, y)
        out = np.empty(x.shape)
        for idx in np.ndindex(x.shape):
            out[idx] = matfun(np.array([x[idx]]), np.array([y[idx]]))[0, 0]
        return out if out.ndim else float(out)
    return f


def exp_h_kai(t):
    """Kernel of e^{tH}K_Ai for t >= 0."""
    if t < 0:
        raise ValueError("exp_h_kai needs t >= 0; compose with mehler_h for negative times")
    m = lambda xs, ys: exp_h_kai_matrix(t, xs, ys)
    return Kernel(_elementwise(m), symmetric=True, name="e^{%gH}K_Ai" % t, matrix=m)


def upper_airy2_matrix(d, xs, ys, split=None):
    """-int_{-oo}^0 e^{l d} Ai(x+l) Ai(y+l) dl for d > 0 (u < u' branch)."""
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    if split is None:
        split = d < 0.25
    if not split:
        # direct: -int_0^oo e^{-mu d} Ai(x - mu) Ai(y - mu) dmu
        hi = 40.0 / d
        zmin = min(xs.min(), ys.min()) - hi
        if zmin < -200:
            raise NumericError("gap %g too small for the direct upper-branch integral" % d)
        lam, w = lambda_rule(0.0, hi, zmin)
        return -airy_product_matrix(xs, ys, -1.0, -1.0, lam, w * np.exp(-d * lam))
    # split: -e^{-dH}(x,y) + int_0^oo e^{l d} Ai(x+l) Ai(y+l) dl
    hi = _decay_cut(max(xs.min(), ys.min())) + 2 * d * d
    lam, w = lambda_rule(0.0, hi, min(xs.min(), ys.min()))
    pos = airy_product_matrix(xs, ys, 1.0, 1.0, lam, w * np.exp(d * lam))
    return pos - propagator_h_value(d, xs[:, None], ys[None, :])


# ----------------------------------------------------------------------------
# Parameter containers

@dataclass(frozen=True)
class TimeParameters:
    times: tuple
    levels: tuple
    interval: tuple = None

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(self.times))
        x = tuple(float(v) for v in np.atleast_1d(self.levels))
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "levels", x)
        if len(t) < 1 or len(t) != len(x):
            raise ValueError("need as many levels as times (n >= 1)")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("times must be strictly increasing")
        if self.interval is not None and not self.interval[0] < self.interval[1]:
            raise ValueError("interval needs l < r")


@dataclass(frozen=True)
class BarrierFunction:
    """Piecewise-linear barrier through breakpoints (t_k, g_k)."""
    ts: tuple
    gs: tuple

    def __post_init__(self):
        ts = tuple(float(v) for v in self.ts)
        gs = tuple(float(v) for v in self.gs)
        if len(ts) < 2 or len(ts) != len(gs):
            raise ValueError("barrier needs at least two breakpoints")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("breakpoints must be increasing in t")
        if not all(math.isfinite(v) for v in gs):
            raise ValueError("barrier values must be finite")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "gs", gs)

    @property
    def interval(self):
        return self.ts[0], self.ts[-1]

    def __call__(self, t):
        return np.interp(t, self.ts, self.gs)

    def reversed(self):
        """g^(t) = g(l + r - t) on the same interval."""
        l, r = self.interval
        return BarrierFunction(tuple(l + r - t for t in self.ts[::-1]), self.gs[::-1])

    @classmethod
    def constant(cls, m, l, r):
        return cls((l, r), (m, m))

    @classmethod
    def from_function(cls, f, l, r, n=257):
        ts = np.linspace(l, r, n)
        return cls(tuple(ts), tuple(f(ts)))

    @classmethod
    def parabola(cls, m, l, r, n=513):
        return cls.from_function(lambda t: t * t + m, l, r, n)


# ----------------------------------------------------------------------------
# Extended kernels

def extended_airy2(params):
    """Extended Airy2 kernel blocks K(t_i, x; t_j, y)."""
    times = params.times

    def block(i, j, xs, ys):
        ti, tj = times[i], times[j]
        if i == j:
            return airy_kernel_matrix(xs, ys)
        if ti == tj:
            raise ValueError("equal-time off-diagonal block requested")
        if ti > tj:
            return exp_h_kai_matrix(ti - tj, xs, ys)
        return upper_airy2_matrix(tj - ti, xs, ys)

    return ExtendedKernel(list(times), block, list(params.levels), name="K_Ai^ext")


def extended_airy1(params, theta=0.5):
    """Extended Airy1 kernel, conjugated by w_i(x) = exp(theta (t_i - t_1) x)."""
    times = params.times

    def block(i, j, xs, ys):
        d = times[j] - times[i]
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        out = heat_b0_value(d, xs[:, None], ys[None, :])
        if d > 0:
            out = out - gaussian(ys[None, :] - xs[:, None], d)
        return out

    t0 = times[0]

    def weight(i, xs):
        return np.exp(theta * (times[i] - t0) * np.asarray(xs, float))

    return ExtendedKernel(list(times), block, list(params.levels),
                          weight=weight if theta else None, name="K_1^ext")


# ----------------------------------------------------------------------------
# Parabolic barrier and killed heat kernels

def theta_parabolic(L, m):
    """Theta_L = Pbar e^{-2LH} Pbar - Pbar R_L Pbar with Pbar the projection on (-oo, m + L^2]."""
    if not L > 0:
        raise ValueError("theta_parabolic needs L > 0")
    a = m + L * L

    def f(x, y):
        x, y = _bcast(x, y)
        free = mehler_value(-L, L, x, y)
        refl = r_l_value(L, m, x, y)
        return np.where((x <= a) & (y <= a), free - refl, 0.0)

    return Kernel(f, symmetric=True, name="Theta_%g" % L)


def r_l_value(L, m, x, y):
    x, y = _bcast(x, y)
    s = x + y
    expo = -np.square(s - 2 * m - 2 * L * L) / (8 * L) - s * L + 2 * L ** 3 / 3.0
    return np.exp(expo) / math.sqrt(8 * math.pi * L)


def killed_heat(m, t):
    """Heat kernel of e^{t Delta} killed at level m (method of images)."""
    if not t > 0:
        raise ValueError("killed_heat needs t > 0")

    def f(x, y):
        x, y = _bcast(x, y)
        v = gaussian(x - y, t) - gaussian(x + y - 2 * m, t)
        return np.where((x < m) & (y < m), v, 0.0)

    return Kernel(f, symmetric=True, name="killed(%g,%g)" % (m, t))


# ----------------------------------------------------------------------------
# Airy_{2->1} crossover kernel

def k_2to1_parts(alpha, xs, ys):
    """Matrices of K^1_alpha and K^2_alpha.

    For alpha <= 0 both are direct integrals.  For alpha > 0 the growth of
    e^{2 alpha l} is removed with the identity
      int_R e^{p l} Ai(X - l) Ai(Y + l) dl = 2^{-1/3} e^{p(X-Y)/2} Ai(2^{-1/3}(X + Y - p^2/2)),
    leaving a decaying integral over l < 0.
    """
    xs = np.atleast_1d(np.asarray(xs, float))
    ys = np.atleast_1d(np.asarray(ys, float))
    a = max(0.0, alpha) ** 2
    k2 = airy_kernel_matrix(xs + a, ys + a)
    X = xs + a
    Y = ys + a
    if alpha <= 0:
        hi = _decay_cut(Y.min())
        if alpha < 0:
            hi = min(hi, 20.0 / -alpha)
        lo_arg = X.min() - hi
        if lo_arg < -200:
            raise NumericError("K_alpha truncation: integrand not decaying before Ai(-200)")
        lam, w = lambda_rule(0.0, hi, lo_arg)
        k1 = airy_product_matrix(X, Y, -1.0, 1.0, lam, w * np.exp(2 * alpha * lam))
    else:
        p = 2 * alpha
        full = CBRT2 ** -1 * _exp_ai(p * (X[:, None] - Y[None, :]) / 2,
                                     (X[:, None] + Y[None, :] - p * p / 2) / CBRT2)
        hi = min(_decay_cut(X.min()), 40.0 / p)
        lam, w = lambda_rule(0.0, hi, Y.min() - hi)
        # int_{-oo}^0 e^{p l} Ai(X - l) Ai(Y + l) dl = int_0^oo e^{-p u} Ai(X + u) Ai(Y - u) du
        neg = airy_product_matrix(X, Y, 1.0, -1.0, lam, w * np.exp(-p * lam))
        k1 = full - neg
    return k1, k2


def k_2to1_alpha(alpha):
    """K_alpha = K^1_alpha + K^2_alpha; conjugated by e^{-alpha x} when alpha > 0."""
    alpha = float(alpha)
    m = lambda xs, ys: np.add(*k_2to1_parts(alpha, xs, ys))
    conj = (lambda x: np.exp(-alpha * np.asarray(x, float))) if alpha > 0 else None
    return Kernel(_elementwise(m), name="K_alpha(%g)" % alpha, matrix=m, conjugation=conj)


# ----------------------------------------------------------------------------
# Endpoint kernels

def psi_endpoint_value(t, m, x):
    z = m + t * t + np.asarray(x, float)
    a, d = _exp_airy(t ** 3 + (m + np.asarray(x, float)) * t, z)
    return 2.0 * (d + t * a)


def psi_endpoint(t, m):
    """psi_{t,m}(x) = 2 e^{t^3 + (m+x)t} [Ai'(m + t^2 + x) + t Ai(m + t^2 + x)]."""
    return lambda x: psi_endpoint_value(t, m, x)


def Psi_rank1(t, m):
    """Psi_{t,m}(x, y) = 2^{1/3} psi_{t,m}(2^{1/3} x) psi_{-t,m}(2^{1/3} y)."""
    def f(x, y):
        x, y = _bcast(x, y)
        return CBRT2 * psi_endpoint_value(t, m, CBRT2 * x) * psi_endpoint_value(-t, m, CBRT2 * y)
    return Kernel(f, name="Psi(%g,%g)" % (t, m))


# ----------------------------------------------------------------------------
# Discretized barrier products

def mesh_times(l, r, n_mesh):
    if n_mesh < 2:
        raise ValueError("need at least 2 mesh points")
    return np.linspace(l, r, int(n_mesh))


def level_rule(lo, hi, width=0.5, order=12):
    return panel_rule(lo, hi, width, order)


def step_kernel(process, dt):
    """One mesh step: e^{-dt H} for airy2, e^{dt Delta} for airy1."""
    if process == "airy2":
        return lambda x, y: propagator_h_value(dt, x, y)
    if process == "airy1":
        return lambda x, y: gaussian(np.subtract(x, y), dt)
    raise ValueError("process must be 'airy2' or 'airy1'")


def discrete_barrier_product(g, n_mesh, process, zlo=None, width=0.5, order=12):
    """Kernel of Pbar_{gh(t_1)} X Pbar_{gh(t_2)} X ... X Pbar_{gh(t_n)} on the mesh.

    gh(t) = g(l + r - t) is the time-reversed barrier; X = e^{-dt H} for
    airy2 and e^{dt Delta} for airy1.  The interior variables are integrated
    by Gauss-Legendre panels on [zlo, gh(t_k)].
    """
    l, r = g.interval
    ts = mesh_times(l, r, n_mesh)
    gh = g.reversed()
    levels = np.asarray(gh(ts), float)
    dt = (r - l) / (len(ts) - 1)
    if zlo is None:
        zlo = levels.min() - 12.0 - (r - l) ** 2
    step = step_kernel(process, dt)
    rules = [level_rule(zlo, c, width, order) for c in levels]
    n = len(levels)
    if n == 2:
        inner = None
    else:
        # M = W^2 X W^3 X ... W^{n-1}, from level-2 nodes to level-(n-1) nodes
        M = np.diag(rules[1].weights)
        zcur = rules[1].nodes
        for k in range(2, n - 1):
            zk = rules[k].nodes
            M = (M @ step(zcur[:, None], zk[None, :])) * rules[k].weights[None, :]
            zcur = zk
        inner = (rules[1].nodes, M, zcur)
    c1, cn = levels[0], levels[-1]

    def f(x, y):
        x, y = _bcast(x, y)
        shape = x.shape
        xf, yf = x.ravel(), y.ravel()
        if inner is None:
            v = step(xf, yf)
        else:
            z1, M, zl = inner
            left = step(xf[:, None], z1[None, :])
            right = step(zl[:, None], yf[None, :])
            v = np.einsum("ia,ab,bi->i", left, M, right)
        v = np.where((xf <= c1) & (yf <= cn), v, 0.0)
        return v.reshape(shape) if shape else float(v[0])

    def mat(xs, ys):
        if inner is None:
            v = step(xs[:, None], ys[None, :])
        else:
            z1, M, zl = inner
            v = step(xs[:, None], z1[None, :]) @ M @ step(zl[:, None], ys[None, :])
        return v * (xs <= c1)[:, None] * (ys <= cn)[None, :]

    k = Kernel(f, name="barrier[%s,%d]" % (process, n), matrix=mat)
    k.levels = levels
    k.mesh = ts
    return k
