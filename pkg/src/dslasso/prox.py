"""Proximal operator of the double-sparsity penalty.

Computed group-wise through the Moreau identity: prox_{t*Omega}(z) equals
z minus the Euclidean projection of z onto the t-scaled dual-norm ball, and
that ball is a Minkowski sum of an l_{alpha*} ball of radius t(1-tau)w and an
l_inf ball of radius t*tau.  The sum projection is found by alternating exact
minimization over the two summands.  Closed-form fast paths cover tau = 1 and
alpha in {1, 2}.
"""

from dataclasses import dataclass

import numpy as np

from .dsnorm import DsParams
from .norms import conjugate_exponent, lq_norm, soft_threshold

__all__ = [
    "ProxSettings",
    "IterationLimitError",
    "project_lq_ball",
    "project_minkowski_sum",
    "prox_group",
    "prox_ds",
]


@dataclass(frozen=True)
class ProxSettings:
    """Iteration controls for the generic (projection-based) prox path."""

    max_alt_iters: int = 10000
    alt_tol: float = 1e-12
    lq_proj_tol: float = 1e-12

    def __post_init__(self):
        if self.max_alt_iters < 1:
            raise ValueError("max_alt_iters must be >= 1")
        if not self.alt_tol > 0 or not self.lq_proj_tol > 0:
            raise ValueError("tolerances must be positive")


DEFAULT_SETTINGS = ProxSettings()


class IterationLimitError(RuntimeError):
    """Alternating projection failed to converge; carries the last iterate."""

    def __init__(self, message, iterate=None, residual=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


def _shrink_magnitudes(a, c, q):
    """Solve u + c*u**(q-1) = a component-wise for u in [0, a], q > 1."""
    if c == 0.0:
        return a.copy()
    if q == 1.5:
        # substitute w = sqrt(u): w^2 + c*w - a = 0
        w = 0.5 * (-c + np.sqrt(c * c + 4.0 * a))
        return w * w
    if q == 3.0:
        # u + c*u^2 = a
        return (np.sqrt(1.0 + 4.0 * c * a) - 1.0) / (2.0 * c)
    lo = np.zeros_like(a)
    hi = a.copy()
    with np.errstate(over="ignore"):
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            too_big = mid + c * mid ** (q - 1.0) > a
            hi = np.where(too_big, mid, hi)
            lo = np.where(too_big, lo, mid)
    return 0.5 * (lo + hi)


def _project_lq_ball_general(a, q, r, tol, c0=None):
    """Projection magnitudes onto {||u||_q <= r} plus the multiplier found.

    Monotone scalar search on c in u + c*u**(q-1) = a; the hint c0 warm-starts
    the bracket when the same projection is solved repeatedly.
    """

    def norm_at(c):
        u = _shrink_magnitudes(a, c, q)
        return lq_norm(u, q), u

    lo, g_lo = 0.0, lq_norm(a, q) - r  # > 0 by the caller's feasibility check
    hi = c0 if (c0 is not None and c0 > 0) else 1.0
    n_hi, u = norm_at(hi)
    tries = 0
    while n_hi > r and tries < 200:
        lo, g_lo = hi, n_hi - r
        hi *= 4.0
        n_hi, u = norm_at(hi)
        tries += 1
    g_hi = n_hi - r
    target = tol * max(r, 1e-300)
    c = hi
    for _ in range(200):
        if abs(g_hi) <= target:
            c = hi
            break
        if abs(g_lo) <= target and lo > 0.0:
            c = lo
            u = _shrink_magnitudes(a, c, q)
            break
        if g_lo != g_hi:
            c = hi - g_hi * (hi - lo) / (g_hi - g_lo)  # secant through bracket
        else:
            c = 0.5 * (lo + hi)
        if not (lo < c < hi):
            c = 0.5 * (lo + hi)
        n_c, u = norm_at(c)
        g_c = n_c - r
        if abs(g_c) <= target or (hi - lo) <= 1e-15 * max(hi, 1.0):
            break
        if g_c > 0.0:
            lo, g_lo = c, g_c
        else:
            hi, g_hi = c, g_c
    else:
        u = _shrink_magnitudes(a, c, q)
    return u, c


def project_lq_ball(z, q, r, tol=1e-12):
    """Euclidean projection of z onto {u : ||u||_q <= r}."""
    z = np.asarray(z, dtype=float)
    if r != r or r < 0.0:
        raise ValueError(f"radius must be nonnegative, got {r!r}")
    if q != q or q < 1.0:
        raise ValueError(f"q must be >= 1 or inf, got {q!r}")
    if r == 0.0:
        return np.zeros_like(z)
    if lq_norm(z, q) <= r:
        return z.copy()
    if np.isinf(q):
        return np.clip(z, -r, r)
    if q == 2.0:
        return z * (r / lq_norm(z, 2.0))
    if q == 1.0:
        a = np.abs(z)
        s = np.sort(a)[::-1]
        css = np.cumsum(s) - r
        k = np.arange(1, s.size + 1)
        ok = s > css / k
        k_star = int(np.max(np.nonzero(ok)[0])) + 1
        theta = css[k_star - 1] / k_star
        return soft_threshold(z, theta)
    u, _ = _project_lq_ball_general(np.abs(z), q, r, tol)
    return np.sign(z) * u


def project_minkowski_sum(z, q, r1, r2, settings: ProxSettings = DEFAULT_SETTINGS):
    """Split-projection of z onto the sum of an l_q ball (r1) and an l_inf ball (r2).

    Returns (u, v) with ||u||_q <= r1 and ||v||_inf <= r2 minimizing
    ||z - u - v||_2, by alternating the two exact single-ball projections
    until the objective decrease drops below settings.alt_tol.
    """
    z = np.asarray(z, dtype=float)
    if r1 != r1 or r1 < 0.0 or r2 != r2 or r2 < 0.0:
        raise ValueError("radii must be nonnegative")
    if r1 == 0.0:
        return np.zeros_like(z), np.clip(z, -r2, r2)
    if r2 == 0.0:
        return project_lq_ball(z, q, r1, settings.lq_proj_tol), np.zeros_like(z)
    # membership test: the minimal-l_q split of z clips as much as possible
    # into the box, so z is inside the sum ball iff that split is feasible
    u_min = soft_threshold(z, r2)
    if lq_norm(u_min, q) <= r1 * (1.0 + 1e-15) + 1e-300:
        return u_min, z - u_min
    v = np.clip(z, -r2, r2)
    u = np.zeros_like(z)
    prev = np.inf
    c_hint = None
    general = not (np.isinf(q) or q in (1.0, 2.0))
    for _ in range(settings.max_alt_iters):
        w = z - v
        if general:
            mags, c_hint = _project_lq_ball_general(
                np.abs(w), q, r1, settings.lq_proj_tol, c_hint
            )
            u = np.sign(w) * mags
        else:
            u = project_lq_ball(w, q, r1, settings.lq_proj_tol)
        v = np.clip(z - u, -r2, r2)
        d = z - u - v
        obj = float(np.dot(d, d))
        if prev - obj < settings.alt_tol:
            return u, v
        prev = obj
    raise IterationLimitError(
        f"Minkowski-sum projection did not converge in {settings.max_alt_iters} "
        f"iterations (last objective decrease {prev - obj:.3e})",
        iterate=(u, v),
        residual=prev - obj,
    )


def _group_l2_shrink(x, r):
    n = lq_norm(x, 2.0) if x.size else 0.0
    if n <= r:
        return np.zeros_like(x)
    return x * (1.0 - r / n)


def prox_group(z, t, tau, w, alpha, settings: ProxSettings = DEFAULT_SETTINGS,
               force_generic=False):
    """prox of t * (tau*||.||_1 + (1-tau)*w*||.||_alpha) for one group.

    Fast paths: tau = 1 (soft threshold), alpha = 1 (soft threshold at the
    combined level) and alpha = 2 (soft threshold then group shrinkage).
    Everything else goes through the Minkowski-sum dual-ball projection;
    force_generic routes the fast cases through it too, for cross-checking.
    """
    z = np.asarray(z, dtype=float)
    if t != t or t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau!r}")
    if w <= 0.0:
        raise ValueError(f"weight must be positive, got {w!r}")
    if alpha != alpha or alpha < 1.0:
        raise ValueError(f"alpha must be >= 1 or inf, got {alpha!r}")
    if t == 0.0:
        return z.copy()
    if not force_generic:
        if tau == 1.0:
            return soft_threshold(z, t)
        if alpha == 1.0:
            return soft_threshold(z, t * (tau + (1.0 - tau) * w))
        if alpha == 2.0:
            return _group_l2_shrink(soft_threshold(z, t * tau), t * (1.0 - tau) * w)
    alpha_star = conjugate_exponent(alpha)
    r1 = t * (1.0 - tau) * w   # l_{alpha*} summand of the scaled dual ball
    r2 = t * tau               # l_inf summand
    u, v = project_minkowski_sum(z, alpha_star, r1, r2, settings)
    return z - u - v


def prox_ds(z, t, params: DsParams, settings: ProxSettings = DEFAULT_SETTINGS,
            force_generic=False):
    """prox of t * ds_norm, applied independently to every group."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size != params.p:
        raise ValueError(f"z has length {z.size}, expected {params.p}")
    if t != t or t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    if t == 0.0:
        return z.copy()
    alphas = params.alphas
    if not force_generic:
        if params.tau == 1.0:
            return soft_threshold(z, t)
        if np.all(alphas == 1.0):
            return soft_threshold(z, t * params._coord_scales)
        if np.all(alphas == 2.0):
            out = soft_threshold(z, t * params.tau)
            starts = params.groups.starts
            gn = np.sqrt(np.add.reduceat(out * out, starts))
            radii = t * (1.0 - params.tau) * params.weights
            factor = np.where(gn > radii, 1.0 - radii / np.maximum(gn, 1e-300), 0.0)
            return out * np.repeat(factor, params.groups.sizes)
    out = np.empty_like(z)
    for g in range(params.n_groups):
        sl = params.groups.slice_of(g)
        out[sl] = prox_group(
            z[sl], t, params.tau, params.weights[g], alphas[g],
            settings, force_generic=force_generic,
        )
    return out
