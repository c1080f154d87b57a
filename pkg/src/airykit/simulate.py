"""Monte-Carlo and brute-force checks: random matrix edges, geometric LPP,
and exact enumeration of small determinantal path ensembles.

Every random stream is a Philox generator keyed by (seed, sample index), so
sample i does not depend on how many samples are drawn or in which order.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
import math

import numpy as np
import scipy.linalg

from .fredholm import NumericError

try:
    from . import _core
    HAVE_CORE = True
except ImportError:  # pragma: no cover - exercised when the extension is not built
    _core = None
    HAVE_CORE = False
from . import _fallback


class ModelError(ValueError):
    pass


def stream(seed, index=0):
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ----------------------------------------------------------------------------
# random matrices

def _gue(N, rng, printed):
    # density exp(-tr A^2 / 2N): diagonal variance N, real and imaginary parts N/2
    s = math.sqrt(N / math.sqrt(2)) if printed else math.sqrt(N / 2.0)
    z = rng.normal(0.0, s, (N, N)) + 1j * rng.normal(0.0, s, (N, N))
    h = np.triu(z, 1)
    h = h + h.conj().T
    d = math.sqrt(N)
    h[np.diag_indices(N)] = rng.normal(0.0, d, N)
    return h


def _goe(N, rng, printed):
    # density exp(-tr A^2 / 4N): off-diagonal variance N, diagonal 2N
    x = rng.normal(0.0, math.sqrt(N), (N, N))
    h = np.triu(x, 1)
    h = h + h.T
    d = math.sqrt(math.sqrt(2) * N) if printed else math.sqrt(2.0 * N)
    h[np.diag_indices(N)] = rng.normal(0.0, d, N)
    return h


def sample_matrix_edge(ensemble, N, n_samples, seed=0, printed_variances=False, check=True):
    """(lambda_max - 2N) / N^{1/3} for GUE or GOE matrices.

    printed_variances uses the entry variances as literally stated in the text
    (GUE parts N/sqrt2, GOE diagonal sqrt2 N) instead of the ones that match
    the densities exp(-tr A^2/2N), exp(-tr A^2/4N).
    """
    if ensemble not in ("gue", "goe"):
        raise ValueError("ensemble must be 'gue' or 'goe'")
    if check and (N < 50 or n_samples < 100):
        raise ValueError("need N >= 50 and n_samples >= 100")
    make = _gue if ensemble == "gue" else _goe
    out = np.empty(n_samples)
    for i in range(n_samples):
        h = make(N, stream(seed, i), printed_variances)
        try:
            lam = scipy.linalg.eigvalsh(h, subset_by_index=[N - 1, N - 1])[0]
        except np.linalg.LinAlgError as e:
            raise NumericError("eigensolver failed on sample %d: %s" % (i, e))
        out[i] = (lam - 2.0 * N) / N ** (1.0 / 3.0)
    return out


# ----------------------------------------------------------------------------
# last passage percolation

@dataclass
class LppEnvironment:
    """Geometric weights P(w = k) = q (1-q)^k on an N x N box (shape 'box') or on
    the triangle i + j <= 2N used for point-to-line (shape 'line')."""
    N: int
    q: float
    seed: int
    index: int = 0
    shape: str = "box"
    weights: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not (0 < self.q < 1):
            raise ValueError("q must lie in (0, 1)")
        if self.N < 1 or self.N > 4000:
            raise ValueError("need 1 <= N <= 4000")
        if self.weights is None:
            rng = stream(self.seed, self.index)
            n = self.N * self.N if self.shape == "box" else self.N * (2 * self.N - 1)
            w = rng.geometric(self.q, n).astype(np.int64) - 1
            self.weights = w.reshape(self.N, self.N) if self.shape == "box" else w
        else:
            self.weights = np.ascontiguousarray(self.weights, dtype=np.int64)
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")


def lpp_point_to_point(env):
    w = np.ascontiguousarray(env.weights, dtype=np.int64)
    if w.ndim != 2:
        raise ValueError("point-to-point needs a box environment")
    if HAVE_CORE:
        return np.asarray(_core.lpp_point(w))
    return _fallback.lpp_point(w)


def lpp_line_profile(env):
    """L^point(i, 2N - i) for i = 1 .. 2N-1, i.e. k = i - N from -(N-1) to N-1.

    The two corners k = +-N are the zero boundary and never beat the interior.
    """
    if env.shape != "line":
        raise ValueError("point-to-line needs a 'line' environment")
    if HAVE_CORE:
        return np.asarray(_core.lpp_line(env.weights, env.N))
    return _fallback.lpp_line(env.weights, env.N)


@dataclass
class LineSamples:
    N: int
    q: float
    l_line: np.ndarray     # point-to-line passage times
    l_diag: np.ndarray     # L^point(N, N) from the same environment
    kappa: np.ndarray      # argmax k (ties broken uniformly at random)
    t_scaled: np.ndarray   # kappa N^{-2/3}


def lpp_line_and_endpoint(N, n_samples, q=0.5, seed=0):
    ll = np.empty(n_samples, dtype=np.int64)
    ld = np.empty(n_samples, dtype=np.int64)
    kap = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        env = LppEnvironment(N, q, seed, i, shape="line")
        prof = lpp_line_profile(env)
        best = prof.max()
        ties = np.flatnonzero(prof == best)
        if len(ties) == 1:
            j = ties[0]
        else:
            # a jumped copy of the environment stream, so weights and tie-breaks never overlap
            g = np.random.Generator(stream(seed, i).bit_generator.jumped())
            j = ties[g.integers(len(ties))]
        ll[i] = best
        ld[i] = prof[N - 1]
        kap[i] = j + 1 - N
    return LineSamples(N, q, ll, ld, kap, kap / N ** (2.0 / 3.0))


# ----------------------------------------------------------------------------
# Kolmogorov-Smirnov helpers

def ks_distance(samples, cdf):
    """sup |F_n - F| for a continuous F given as a vectorized callable."""
    x = np.sort(np.asarray(samples, float))
    n = len(x)
    f = np.clip(cdf(x), 0.0, 1.0)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(n) / n
    return float(max(hi.max(), lo.max()))


def standardize(samples):
    x = np.asarray(samples, float)
    return (x - x.mean()) / x.std()


@dataclass
class CdfTable:
    """A distribution tabulated on a grid, with its mean and standard deviation."""
    grid: np.ndarray
    cdf: np.ndarray
    mean: float
    sd: float

    def __call__(self, s):
        return np.interp(s, self.grid, self.cdf, left=0.0, right=1.0)

    def standardized(self):
        return lambda z: self(self.mean + self.sd * np.asarray(z))


def _moments_from_cdf(grid, cdf):
    # E X = int x dF via the midpoint of each cell
    dF = np.diff(cdf)
    mid = 0.5 * (grid[1:] + grid[:-1])
    mean = float(np.sum(mid * dF) / np.sum(dF))
    var = float(np.sum((mid - mean) ** 2 * dF) / np.sum(dF))
    return mean, math.sqrt(var)


def tw_table(kind, lo=-8.0, hi=6.0, step=0.02):
    from .distributions import f_gue, f_goe
    fn = f_gue if kind == "gue" else f_goe
    g = np.arange(lo, hi + step / 2, step)
    v = np.array([fn(s) for s in g])
    m, sd = _moments_from_cdf(g, v)
    return CdfTable(g, v, m, sd)


def endpoint_table(t_grid=None):
    from .distributions import endpoint_density_t
    t = np.linspace(-3.5, 3.5, 141) if t_grid is None else np.asarray(t_grid, float)
    f = endpoint_density_t(t)
    c = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])
    c /= c[-1]
    m, sd = _moments_from_cdf(t, c)
    return CdfTable(t, c, m, sd)


def ks_standardized(samples, table):
    """KS distance after matching mean and variance (shape-only comparison)."""
    return ks_distance(standardize(samples), table.standardized())


@dataclass
class SpreadSlope:
    Ns: tuple
    sd: np.ndarray
    slope: float


def kappa_spread_slope(Ns=(250, 500, 1000, 2000), n_samples=200, q=0.5, seed=0):
    """Log-log slope of sd(kappa_N) against N; expected near 2/3."""
    sd = np.array([lpp_line_and_endpoint(N, n_samples, q, seed).kappa.std() for N in Ns])
    slope = float(np.polyfit(np.log(Ns), np.log(sd), 1)[0])
    return SpreadSlope(tuple(Ns), sd, slope)


# ----------------------------------------------------------------------------
# finite determinantal path ensembles

@dataclass
class FiniteDPP:
    """k non-intersecting paths through point sets X^1 .. X^n.

    phi: k x |X^1| matrix phi_i(x), W[m]: |X^m| x |X^{m+1}|, psi: |X^n| x k.
    """
    points: list
    phi: np.ndarray
    W: list
    psi: np.ndarray

    def __post_init__(self):
        self.points = [np.asarray(p) for p in self.points]
        self.phi = np.asarray(self.phi, float)
        self.psi = np.asarray(self.psi, float)
        self.W = [np.asarray(w, float) for w in self.W]
        n = len(self.points)
        if len(self.W) != n - 1:
            raise ValueError("need n-1 transition matrices")
        if self.phi.shape[1] != len(self.points[0]) or self.psi.shape[0] != len(self.points[-1]):
            raise ValueError("phi/psi do not match the point sets")
        for m, w in enumerate(self.W):
            if w.shape != (len(self.points[m]), len(self.points[m + 1])):
                raise ValueError("W[%d] has shape %r" % (m, w.shape))

    @property
    def k(self):
        return self.phi.shape[0]

    @property
    def n(self):
        return len(self.points)

    def chain(self, i, j):
        """W_i ... W_{j-1} (times counted from 0); identity when i == j."""
        out = np.eye(len(self.points[i]))
        for m in range(i, j):
            out = out @ self.W[m]
        return out

    @property
    def M(self):
        return self.phi @ self.chain(0, self.n - 1) @ self.psi


def toy_dpp(sizes=(4, 4), k=2, a=0.6, c=0.7):
    """phi_i(x) = x^{i-1}, W(x, y) = a^{y-x} 1{y >= x}, psi_i(x) = x^{i-1} c^x on {0..}."""
    pts = [np.arange(s) for s in sizes]
    phi = np.array([pts[0] ** i for i in range(k)], float)
    W = []
    for m in range(len(sizes) - 1):
        x, y = pts[m][:, None], pts[m + 1][None, :]
        W.append(np.where(y >= x, a ** (y - x).astype(float), 0.0))
    x = pts[-1].astype(float)
    psi = np.array([x ** i * c ** x for i in range(k)]).T
    return FiniteDPP(pts, phi, W, psi)


def walk_dpp(sizes=(4, 5, 6), k=2, p=0.4):
    """Bernoulli walkers started at 0..k-1, ending anywhere with weight 1.

    One-step transitions W(x, y) = (1-p) 1{y = x} + p 1{y = x+1} are totally
    non-negative, so the measure is a genuine probability (non-intersection).
    """
    pts = [np.arange(s) for s in sizes]
    phi = np.zeros((k, sizes[0]))
    phi[np.arange(k), np.arange(k)] = 1.0
    W = []
    for m in range(len(sizes) - 1):
        x, y = pts[m][:, None], pts[m + 1][None, :]
        W.append((1 - p) * (y == x) + p * (y == x + 1))
    x = pts[-1].astype(float)
    psi = np.array([x ** i for i in range(k)]).T
    return FiniteDPP(pts, phi, W, psi)


def eynard_mehta_kernel(dpp):
    """Block matrix K[i][j] = W_i..W_{n-1} Psi M^{-1} Phi W_1..W_{j-1} - 1{i<j} W_i..W_{j-1}."""
    M = dpp.M
    if abs(np.linalg.det(M)) < 1e-300 or np.linalg.cond(M) > 1e14:
        raise ValueError("M is singular")
    n = dpp.n
    Minv = np.linalg.inv(M)
    left = [dpp.chain(i, n - 1) @ dpp.psi for i in range(n)]
    right = [dpp.phi @ dpp.chain(0, j) for j in range(n)]
    blocks = [[left[i] @ Minv @ right[j] - (dpp.chain(i, j) if i < j else 0.0)
               for j in range(n)] for i in range(n)]
    return np.block(blocks)


def block_offsets(dpp):
    return np.concatenate([[0], np.cumsum([len(p) for p in dpp.points])])


def enumerate_dpp_measure(dpp, tol=1e-12):
    """Exact weights Z^{-1} det[phi_i(x^1_j)] prod det[W_m(x^m_i, x^{m+1}_j)] det[psi_j(x^n_i)].

    Keys are tuples of index tuples (one increasing k-tuple per time).
    """
    k, n = dpp.k, dpp.n
    subsets = [list(combinations(range(len(p)), k)) for p in dpp.points]
    total = 1
    for s in subsets:
        total *= len(s)
    if total > 10 ** 6:
        raise ValueError("%d configurations exceed the enumeration budget" % total)
    w = {}
    for conf in product(*subsets):
        v = np.linalg.det(dpp.phi[:, conf[0]])
        for m in range(n - 1):
            if v == 0.0:
                break
            v *= np.linalg.det(dpp.W[m][np.ix_(conf[m], conf[m + 1])])
        if v != 0.0:
            v *= np.linalg.det(dpp.psi[conf[-1], :])
        w[conf] = v
    Z = sum(w.values())
    detM = np.linalg.det(dpp.M)
    if abs(Z - detM) > tol * max(1.0, abs(detM)) * 1e3:
        raise ModelError("normalization %.16g differs from det M = %.16g" % (Z, detM))
    scale = max(abs(v) for v in w.values())
    neg = [c for c, v in w.items() if v < -tol * scale]
    if neg:
        raise ModelError("negative weight on %d configurations, e.g. %r" % (len(neg), neg[0]))
    return {c: max(v, 0.0) / Z for c, v in w.items()}


def gap_probability_enumerated(measure, levels):
    """P(top path at time i is <= levels[i] for every i), indices into X^i."""
    return sum(p for c, p in measure.items() if all(max(x) <= z for x, z in zip(c, levels)))


def gap_probability_kernel(dpp, K, levels):
    off = block_offsets(dpp)
    idx = [off[i] + j for i, p in enumerate(dpp.points) for j in range(len(p)) if j > levels[i]]
    if not idx:
        return 1.0
    sub = K[np.ix_(idx, idx)]
    return float(np.linalg.det(np.eye(len(idx)) - sub))


def correlation_enumerated(measure, sites):
    """P(every (time, index) in sites is occupied)."""
    return sum(p for c, p in measure.items() if all(j in c[i] for i, j in sites))


def correlation_kernel(dpp, K, sites):
    off = block_offsets(dpp)
    idx = [off[i] + j for i, j in sites]
    return float(np.linalg.det(K[np.ix_(idx, idx)]))
