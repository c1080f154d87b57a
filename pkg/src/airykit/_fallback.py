"""Pure numpy versions of the routines in _core.pyx."""
import numpy as np


def airy_kernel_matrix(x, y, airy):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    ax, dx = airy(x)
    ay, dy = airy(y)
    diff = x[:, None] - y[None, :]
    near = np.abs(diff) < 1e-4
    out = (ax[:, None] * dy[None, :] - dx[:, None] * ay[None, :]) / np.where(near, 1.0, diff)
    if near.any():
        i, j = np.nonzero(near)
        c = 0.5 * (x[i] + y[j])
        e = 0.5 * (y[j] - x[i])
        a, d = airy(c)
        out[i, j] = d * d - c * a * a + e * e * (2 * c * d * d - 2 * c * c * a * a + a * d) / 3.0
    return out


def lpp_point(w):
    """L(i,j) = w(i,j) + max(L(i-1,j), L(i,j-1)), swept by anti-diagonals."""
    w = np.asarray(w, dtype=np.int64)
    n, m = w.shape
    L = np.zeros((n + 1, m + 1), dtype=np.int64)
    for d in range(n + m - 1):
        i = np.arange(max(0, d - m + 1), min(n, d + 1))
        j = d - i
        L[i + 1, j + 1] = w[i, j] + np.maximum(L[i, j + 1], L[i + 1, j])
    return L[1:, 1:]


def lpp_line(w, N):
    """Point-to-line DP on the triangle i + j <= 2N, rows stored consecutively."""
    w = np.asarray(w, dtype=np.int64)
    M = 2 * N
    buf = np.zeros(M + 1, dtype=np.int64)
    end = np.empty(M - 1, dtype=np.int64)
    off = 0
    for i in range(1, M):
        width = M - i
        row = w[off:off + width]
        # L(i, j) = w + max(L(i-1, j), L(i, j-1)): a running max along the row
        # cannot be vectorized directly, use cumulative max of (prev - prefix sums)
        cs = np.concatenate([[0], np.cumsum(row)])
        up = buf[1:width + 1]
        # L(i, j) = cs[j] + max_{k<=j} (up[k] - cs[k-1])
        best = np.maximum.accumulate(up - cs[:-1])
        new = cs[1:] + best
        buf[1:width + 1] = new
        buf[width + 1] = 0
        end[i - 1] = new[-1]
        off += width
    return end
