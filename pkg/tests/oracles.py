"""Independent reference computations used by the test suite.

Everything here is deliberately written from scratch (different algorithms,
no reuse of library internals) so the tests cross-check the package against
independent paths to the same quantities.
"""

import numpy as np
from scipy.optimize import brentq


def soft(x, a):
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - a, 0.0)


def norm_q(x, q):
    a = np.abs(np.asarray(x, dtype=float))
    if np.isinf(q):
        return float(a.max())
    m = float(a.max())
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** q) ** (1.0 / q))


def epsq_bisect(x, eps, q, iters=200):
    """Root of ||S_{(1-eps)v}(x)||_q - eps*v by plain interval halving."""
    a = np.abs(np.asarray(x, dtype=float))
    if a.max() == 0.0:
        return 0.0
    if np.isinf(q):
        return float(a.max())
    if eps == 1.0:
        return norm_q(a, q)

    def h(v):
        return norm_q(np.maximum(a - (1.0 - eps) * v, 0.0), q) - eps * v

    lo = 0.0
    hi = float(a.max()) / (1.0 - eps) + 1.0  # h(hi) = -eps*hi < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def project_ball(y, q, r):
    """Euclidean projection onto {||u||_q <= r}, written independently."""
    y = np.asarray(y, dtype=float)
    if r == 0.0:
        return np.zeros_like(y)
    if norm_q(y, q) <= r:
        return y.copy()
    if np.isinf(q):
        return np.clip(y, -r, r)
    if q == 2.0:
        return y * (r / norm_q(y, 2.0))
    a = np.abs(y)
    if q == 1.0:
        # threshold found by bisection instead of the sorted scan
        def excess(theta):
            return np.maximum(a - theta, 0.0).sum() - r

        lo, hi = 0.0, float(a.max())
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if excess(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return soft(y, 0.5 * (lo + hi))

    def mags(c):
        # solve u + c*u**(q-1) = a per coordinate
        if c == 0.0:
            return a.copy()
        if q == 1.5:
            w = 0.5 * (-c + np.sqrt(c * c + 4.0 * a))
            return w * w
        if q == 3.0:
            return (np.sqrt(1.0 + 4.0 * c * a) - 1.0) / (2.0 * c)
        lo = np.zeros_like(a)
        hi = a.copy()
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            over = mid + c * mid ** (q - 1.0) > a
            hi = np.where(over, mid, hi)
            lo = np.where(over, lo, mid)
        return 0.5 * (lo + hi)

    hi = 1.0
    while norm_q(mags(hi), q) > r:
        hi *= 4.0
    c_star = brentq(lambda c: norm_q(mags(c), q) - r, 0.0, hi, xtol=1e-15, rtol=1e-15)
    return np.sign(y) * mags(c_star)


def prox_group_pg(z, t, tau, w, alpha, max_iters=20000, tol=1e-13):
    """Prox via projected-gradient iterations on the dual-ball split (u, v).

    Minimizes 0.5*||z-u-v||^2 over the product of the l_{alpha*} ball of
    radius t(1-tau)w and the box of radius t*tau, with Nesterov acceleration
    and a monotone restart; the prox is z - u - v.
    """
    z = np.asarray(z, dtype=float)
    if np.isinf(alpha):
        astar = 1.0
    elif alpha == 1.0:
        astar = np.inf
    else:
        astar = alpha / (alpha - 1.0)
    r1 = t * (1.0 - tau) * w
    r2 = t * tau
    if r1 == 0.0:
        return z - np.clip(z, -r2, r2)
    if r2 == 0.0:
        return z - project_ball(z, astar, r1)
    s = 0.49  # < 1/L with L = 2 for the joint quadratic
    u = np.zeros_like(z)
    v = np.clip(z, -r2, r2)
    mu, mv = u.copy(), v.copy()
    tk = 1.0
    d = z - u - v
    obj = float(d @ d)
    for _ in range(max_iters):
        r = z - mu - mv
        un = project_ball(mu + s * r, astar, r1)
        vn = np.clip(mv + s * r, -r2, r2)
        dn = z - un - vn
        obj_n = float(dn @ dn)
        if obj_n > obj:  # restart momentum from the last accepted point
            tk = 1.0
            r = z - u - v
            un = project_ball(u + s * r, astar, r1)
            vn = np.clip(v + s * r, -r2, r2)
            dn = z - un - vn
            obj_n = float(dn @ dn)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        mu = un + ((tk - 1.0) / t_next) * (un - u)
        mv = vn + ((tk - 1.0) / t_next) * (vn - v)
        tk = t_next
        step = max(np.max(np.abs(un - u)), np.max(np.abs(vn - v)))
        u, v, obj = un, vn, obj_n
        if step <= tol * (1.0 + np.max(np.abs(z))):
            break
    # plain polish to settle at the fixed point
    for _ in range(200):
        r = z - u - v
        un = project_ball(u + s * r, astar, r1)
        vn = np.clip(v + s * r, -r2, r2)
        if max(np.max(np.abs(un - u)), np.max(np.abs(vn - v))) <= 1e-15 * (
            1.0 + np.max(np.abs(z))
        ):
            u, v = un, vn
            break
        u, v = un, vn
    return z - u - v


def prox_ds_pg(z, t, tau, weights, alphas, sizes, **kw):
    """Group-wise application of the projected-gradient prox reference."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    start = 0
    for w, alpha, size in zip(weights, alphas, sizes):
        out[start:start + size] = prox_group_pg(z[start:start + size], t, tau, w, alpha, **kw)
        start += size
    return out


def ista_lasso(X, y, lam, max_iters=300000, tol=1e-14):
    """Plain proximal-gradient loop for ||y-Xb||^2 + lam*||b||_1."""
    G = X.T @ X
    b_vec = X.T @ y
    eta = 1.0 / (2.0 * 1.05 * np.linalg.eigvalsh(G)[-1])
    beta = np.zeros(X.shape[1])
    for _ in range(max_iters):
        nxt = soft(beta - eta * 2.0 * (G @ beta - b_vec), eta * lam)
        if np.max(np.abs(nxt - beta)) <= tol:
            return nxt
        beta = nxt
    return beta


def ista_group_lasso(X, y, lam, weights, sizes, max_iters=300000, tol=1e-14):
    """Plain proximal-gradient loop for ||y-Xb||^2 + lam*sum_g w_g||b_g||_2."""
    G = X.T @ X
    b_vec = X.T @ y
    eta = 1.0 / (2.0 * 1.05 * np.linalg.eigvalsh(G)[-1])
    beta = np.zeros(X.shape[1])
    starts = np.concatenate(([0], np.cumsum(sizes)))

    def shrink(vec):
        out = vec.copy()
        for g, w in enumerate(weights):
            sl = slice(starts[g], starts[g + 1])
            nrm = np.linalg.norm(out[sl])
            radius = eta * lam * w
            out[sl] = 0.0 if nrm <= radius else out[sl] * (1.0 - radius / nrm)
        return out

    for _ in range(max_iters):
        nxt = shrink(beta - eta * 2.0 * (G @ beta - b_vec))
        if np.max(np.abs(nxt - beta)) <= tol:
            return nxt
        beta = nxt
    return beta


def max_over_circle(score, n_coarse=4096, refine_iters=80):
    """Maximize score(theta) over [0, 2pi) by coarse scan + golden-section refine."""
    thetas = 2.0 * np.pi * np.arange(n_coarse) / n_coarse
    vals = np.array([score(th) for th in thetas])
    i = int(np.argmax(vals))
    h = 2.0 * np.pi / n_coarse
    lo, hi = thetas[i] - h, thetas[i] + h
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = score(c), score(d)
    for _ in range(refine_iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = score(d)
    best = max(vals[i], fc, fd)
    return float(best)
