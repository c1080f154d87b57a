"""Airy function Ai and its derivative on the real line.

Three regimes:

* x >= 9: the scaled asymptotic expansion e^{-zeta}/(2 sqrt(pi) x^{1/4}) sum u_k/(-zeta)^k
* x <= -10: the oscillatory asymptotic expansion
* in between: Taylor series of the ODE y'' = x y around the nearest anchor
  of a table with spacing 1/8.

The anchor table is built once at import.  On x > 0 it is integrated
backwards from the asymptotic value at x = 9 (the direction in which Ai
is the dominant solution, so errors do not grow), on x < 0 it is
integrated outwards from the exact values at the origin.  Both halves are
cross-checked at x = 0 and at x = -10.
"""
from dataclasses import dataclass
import math

import numpy as np

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840

X_POS = 9.0
X_NEG = -10.0
X_MAX = 200.0
STEP = 0.125
N_TAYLOR = 28
N_ASYM = 40

_SQPI = math.sqrt(math.pi)


def _asym_coefficients(n):
    u = [1.0]
    v = [1.0]
    for k in range(1, n):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return np.array(u), np.array(v)


_U, _V = _asym_coefficients(N_ASYM)


def _series(coef, z, sign):
    """Sum coef[k] (sign/z)^k, stopping at the smallest term."""
    total = np.zeros_like(z)
    term_prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    p = np.ones_like(z)
    for k in range(len(coef)):
        term = coef[k] * p
        a = np.abs(term)
        active &= a < term_prev
        total = total + np.where(active, term, 0.0)
        term_prev = np.where(active, a, term_prev)
        active &= a > 1e-17 * np.abs(total)
        if not active.any():
            break
        p = p * (sign / z)
    return total


def _asym_pos_scaled(x):
    # e^{zeta} Ai(x), e^{zeta} Ai'(x) for large positive x
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    q = x ** 0.25
    ai = _series(_U, zeta, -1.0) / (2 * _SQPI * q)
    aip = -q * _series(_V, zeta, -1.0) / (2 * _SQPI)
    return ai, aip


def _alt_split(coef, zeta):
    # even and odd parts of sum (-1)^k c_k / zeta^k split as in the
    # oscillatory expansion: sum (-1)^k c_{2k}/zeta^{2k}, sum (-1)^k c_{2k+1}/zeta^{2k+1}
    ev = coef[0::2] * 1.0
    od = coef[1::2] * 1.0
    z2 = zeta * zeta
    e = _series(ev, z2, -1.0)
    o = _series(od, z2, -1.0) / zeta
    return e, o


def _asym_neg(x):
    z = -x
    zeta = 2.0 / 3.0 * z * np.sqrt(z)
    q = z ** 0.25
    # reduce the phase carefully: zeta + pi/4
    ph = np.mod(zeta, 2 * math.pi) + math.pi / 4
    s, c = np.sin(ph), np.cos(ph)
    ue, uo = _alt_split(_U, zeta)
    ve, vo = _alt_split(_V, zeta)
    ai = (s * ue - c * uo) / (_SQPI * q)
    aip = -q * (c * ve + s * vo) / _SQPI
    return ai, aip


def _taylor(x0, a0, a1, h, n=N_TAYLOR):
    """Ai and Ai' at x0 + h from values at x0 (arrays, vectorized)."""
    am1 = np.zeros_like(a0)  # a_{n-1}
    an = a0
    an1 = a1
    y = a0 + a1 * h
    dy = a1.copy()
    hp = h.copy()        # h^1
    hpm = np.ones_like(h)  # h^0
    for k in range(2, n):
        # a_k = (x0 a_{k-2} + a_{k-3}) / (k (k-1))
        ak = (x0 * an + am1) / (k * (k - 1.0))
        hpm = hp
        hp = hp * h
        y = y + ak * hp
        dy = dy + k * ak * hpm
        am1, an, an1 = an, an1, ak
    return y, dy


def _build_table():
    xs = np.arange(X_NEG, X_POS + STEP / 2, STEP)
    n = len(xs)
    ai = np.empty(n)
    aip = np.empty(n)
    i0 = int(round((0.0 - X_NEG) / STEP))
    ip = n - 1
    a, d = _asym_pos_scaled(np.array([X_POS]))
    e = math.exp(-2.0 / 3.0 * X_POS ** 1.5)
    ai[ip], aip[ip] = a[0] * e, d[0] * e
    # backwards from X_POS to 0, substeps of STEP/2 for margin
    for i in range(ip, i0, -1):
        y, dy = np.array([ai[i]]), np.array([aip[i]])
        x = xs[i]
        for _ in range(2):
            y, dy = _taylor(np.array([x]), y, dy, np.array([-STEP / 2]))
            x -= STEP / 2
        ai[i - 1], aip[i - 1] = y[0], dy[0]
    back0 = (ai[i0], aip[i0])
    ai[i0], aip[i0] = AI0, AIP0
    for i in range(i0, 0, -1):
        y, dy = np.array([ai[i]]), np.array([aip[i]])
        x = xs[i]
        for _ in range(2):
            y, dy = _taylor(np.array([x]), y, dy, np.array([-STEP / 2]))
            x -= STEP / 2
        ai[i - 1], aip[i - 1] = y[0], dy[0]
    an, dn = _asym_neg(np.array([X_NEG]))
    check = max(abs(back0[0] - AI0), abs(back0[1] - AIP0),
                abs(an[0] - ai[0]), abs(dn[0] - aip[0]))
    return xs, ai, aip, check


TABLE_X, TABLE_AI, TABLE_AIP, TABLE_CHECK = _build_table()


def _prepare(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("airy: non-finite argument")
    if np.any(x < -X_MAX):
        raise ValueError("airy: argument below -%g is outside the supported range" % X_MAX)
    return x


def _airy_numpy(x, scaled):
    shape = x.shape
    x = x.ravel()
    ai = np.empty_like(x)
    aip = np.empty_like(x)

    pos = x >= X_POS
    neg = x <= X_NEG
    mid = ~(pos | neg)

    if pos.any():
        xp = x[pos]
        a, d = _asym_pos_scaled(xp)
        if not scaled:
            e = np.exp(-2.0 / 3.0 * xp * np.sqrt(xp))
            a, d = a * e, d * e
        ai[pos], aip[pos] = a, d
    if neg.any():
        ai[neg], aip[neg] = _asym_neg(x[neg])
    if mid.any():
        xm = x[mid]
        idx = np.rint((xm - X_NEG) / STEP).astype(int)
        idx = np.clip(idx, 0, len(TABLE_X) - 1)
        x0 = TABLE_X[idx]
        a, d = _taylor(x0, TABLE_AI[idx], TABLE_AIP[idx], xm - x0)
        if scaled:
            e = np.exp(2.0 / 3.0 * np.where(xm > 0, xm, 0.0) ** 1.5)
            a, d = a * e, d * e
        ai[mid], aip[mid] = a, d
    return ai.reshape(shape), aip.reshape(shape)


try:
    from . import _core
    _core.set_table(TABLE_AI, TABLE_AIP, X_NEG, STEP, _U, _V)
    HAVE_CORE = True
except ImportError:  # pragma: no cover - exercised when the extension is not built
    _core = None
    HAVE_CORE = False


def _airy(x, scaled=False, backend=None):
    x = _prepare(x)
    use_core = HAVE_CORE if backend is None else backend == "core"
    if use_core:
        if _core is None:
            raise RuntimeError("compiled backend not available")
        flat = np.ascontiguousarray(x.ravel())
        a = np.empty_like(flat)
        d = np.empty_like(flat)
        _core.airy_eval(flat, 1 if scaled else 0, a, d)
        return a.reshape(x.shape), d.reshape(x.shape)
    return _airy_numpy(x, scaled)


def airy(x, backend=None):
    """Return (Ai(x), Ai'(x)); x scalar or array.  Ai underflows to 0 above x = 200."""
    a, d = _airy(x, False, backend)
    if np.ndim(a) == 0:
        return float(a), float(d)
    return a, d


def airy_scaled(x, backend=None):
    """Return e^{(2/3)x^{3/2}} (Ai, Ai') for x > 0 and plain (Ai, Ai') for x <= 0."""
    a, d = _airy(x, True, backend)
    if np.ndim(a) == 0:
        return float(a), float(d)
    return a, d


def ai(x):
    return airy(x)[0]


def ai_prime(x):
    return airy(x)[1]


def ai_scaled(x):
    return airy_scaled(x)[0]


def log_ai(x):
    """log Ai(x) for x > -2.33 (Ai positive there), robust for large x."""
    x = np.asarray(x, dtype=float)
    a, _ = airy_scaled(x)
    zeta = 2.0 / 3.0 * np.where(x > 0, x, 0.0) ** 1.5
    return np.log(a) - zeta


@dataclass(frozen=True)
class AiryValue:
    x: float
    ai: float
    ai_prime: float
    est_abs_err: float


def airy_value(x):
    a, d = airy(float(x))
    # roundoff of the Taylor sums scales with the largest partial term; a
    # conservative envelope from comparisons with independent references
    err = 4e-16 * (1.0 + abs(x)) ** 1.25 * max(1.0, abs(a) + abs(d))
    return AiryValue(float(x), a, d, err)


def ai_integral_tail(a):
    """int_a^inf Ai(x)^2 dx = Ai'(a)^2 - a Ai(a)^2."""
    v, d = airy(a)
    return d * d - a * v * v
