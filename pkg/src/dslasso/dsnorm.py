"""Group-structured double-sparsity penalty and its dual norm.

The penalty on a coefficient vector beta partitioned into contiguous groups is

    tau * ||beta||_1 + (1 - tau) * sum_g w_g ||beta_(g)||_{alpha_g},

a convex combination of element-wise and group-wise sparsity terms.  Its dual
is a per-group maximum of interpolating norms (see :mod:`dslasso.norms`) with
mixing weights eps_g = (1-tau) w_g / (tau + (1-tau) w_g) and conjugate
exponents alpha*_g.
"""

import math
from dataclasses import dataclass

import numpy as np

from .norms import EpsQ, conjugate_exponent, epsq_norm, lq_norm

__all__ = [
    "GroupStructure",
    "DsParams",
    "group_lq_norms",
    "ds_norm",
    "ds_norm_groupwise",
    "ds_dual_norm",
    "mixed_norm",
    "params_to_json",
    "params_from_json",
]


@dataclass(frozen=True, eq=False)
class GroupStructure:
    """Partition of {0, ..., p-1} into contiguous groups of the given sizes."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) == 0:
            raise ValueError("at least one group is required")
        if any(s < 1 for s in sizes):
            raise ValueError(f"all group sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        starts = np.concatenate(([0], np.cumsum(sizes)))
        object.__setattr__(self, "_starts", starts)

    @property
    def n_groups(self):
        return len(self.sizes)

    @property
    def total_size(self):
        return int(self._starts[-1])

    @property
    def starts(self):
        """Start offsets of each group (length n_groups)."""
        return self._starts[:-1]

    def slice_of(self, g):
        return slice(int(self._starts[g]), int(self._starts[g + 1]))

    def split(self, x):
        """Views of x per group, in group order."""
        x = np.asarray(x)
        return [x[self.slice_of(g)] for g in range(self.n_groups)]


def _as_group_array(value, groups, name, default):
    if value is None:
        arr = np.array([default(s) for s in groups.sizes], dtype=float)
    else:
        arr = np.asarray(value, dtype=float).ravel()
        if arr.size != groups.n_groups:
            raise ValueError(
                f"{name} must have one entry per group "
                f"({groups.n_groups}), got {arr.size}"
            )
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DsParams:
    """Penalty parameters: mixing tau, per-group weights and exponents.

    weights default to sqrt(group size); alphas default to 2.  Derived
    quantities (per-group scale tau + (1-tau) w_g, mixing weight eps_g and
    conjugate exponent alpha*_g) are precomputed and immutable.
    """

    groups: GroupStructure
    tau: float = 0.5
    weights: np.ndarray = None
    alphas: np.ndarray = None

    def __post_init__(self):
        if not (self.tau == self.tau and 0.0 <= self.tau <= 1.0):
            raise ValueError(f"tau must be in [0, 1], got {self.tau!r}")
        weights = _as_group_array(
            self.weights, self.groups, "weights", lambda s: math.sqrt(s)
        )
        alphas = _as_group_array(self.alphas, self.groups, "alphas", lambda s: 2.0)
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be positive and finite")
        if np.any(alphas < 1) or np.any(np.isnan(alphas)):
            raise ValueError("alphas must be >= 1 (inf allowed)")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "alphas", alphas)

        scales = self.tau + (1.0 - self.tau) * weights
        epsilons = (1.0 - self.tau) * weights / scales
        alpha_stars = np.array([conjugate_exponent(a) for a in alphas])
        coord_scales = np.repeat(scales, self.groups.sizes)
        for arr in (scales, epsilons, alpha_stars, coord_scales):
            arr.flags.writeable = False
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "epsilons", epsilons)
        object.__setattr__(self, "alpha_stars", alpha_stars)
        object.__setattr__(self, "_coord_scales", coord_scales)

    @property
    def p(self):
        return self.groups.total_size

    @property
    def n_groups(self):
        return self.groups.n_groups


def _check_length(x, params, name="vector"):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != params.p:
        raise ValueError(
            f"{name} has length {x.size}, expected {params.p} from the group structure"
        )
    return x


def group_lq_norms(x, groups: GroupStructure, alphas):
    """Array of per-group l_{alpha_g} norms of x."""
    x = np.asarray(x, dtype=float).ravel()
    alphas = np.asarray(alphas, dtype=float)
    starts = groups.starts
    a0 = alphas[0]
    if np.all(alphas == a0):
        ax = np.abs(x)
        if a0 == 2.0:
            return np.sqrt(np.add.reduceat(ax * ax, starts))
        if a0 == 1.0:
            return np.add.reduceat(ax, starts)
        if np.isinf(a0):
            return np.maximum.reduceat(ax, starts)
    return np.array(
        [lq_norm(x[groups.slice_of(g)], alphas[g]) for g in range(groups.n_groups)]
    )


def ds_norm(beta, params: DsParams):
    """tau*||beta||_1 + (1-tau)*sum_g w_g ||beta_(g)||_{alpha_g}."""
    beta = _check_length(beta, params, "beta")
    gn = group_lq_norms(beta, params.groups, params.alphas)
    return float(
        params.tau * np.abs(beta).sum() + (1.0 - params.tau) * np.dot(params.weights, gn)
    )


def ds_norm_groupwise(beta, params: DsParams):
    """Group-factored form of the same penalty.

    Evaluates sum_g (tau + (1-tau) w_g) * [eps_g ||beta_(g)||_{alpha_g}
    + (1-eps_g) ||beta_(g)||_1]; agrees with :func:`ds_norm`.
    """
    beta = _check_length(beta, params, "beta")
    total = 0.0
    for g in range(params.n_groups):
        bg = beta[params.groups.slice_of(g)]
        eg = params.epsilons[g]
        total += params.scales[g] * (
            eg * lq_norm(bg, params.alphas[g]) + (1.0 - eg) * np.abs(bg).sum()
        )
    return float(total)


def ds_dual_norm(x, params: DsParams):
    """Dual norm: max_g of the per-group (eps_g, alpha*_g) norm over its scale."""
    x = _check_length(x, params, "x")
    eps = params.epsilons
    ast = params.alpha_stars
    starts = params.groups.starts
    if np.all(eps == 0.0):
        # pure l1 penalty (tau = 1); dual is a scaled max norm
        return float((np.abs(x) / params._coord_scales).max())
    if np.all(eps == 1.0) and np.all(ast == ast[0]) and ast[0] in (1.0, 2.0):
        ax = np.abs(x)
        if ast[0] == 2.0:
            gn = np.sqrt(np.add.reduceat(ax * ax, starts))
        else:
            gn = np.add.reduceat(ax, starts)
        return float((gn / params.scales).max())
    best = 0.0
    for g in range(params.n_groups):
        xg = x[params.groups.slice_of(g)]
        eg = eps[g]
        if eg == 0.0:
            val = float(np.abs(xg).max())
        elif eg == 1.0:
            val = lq_norm(xg, ast[g])
        else:
            val = epsq_norm(xg, EpsQ(eg, ast[g]))
        best = max(best, val / params.scales[g])
    return float(best)


def mixed_norm(x, groups: GroupStructure, outer, inner):
    """Outer norm (1 or inf) of the vector of per-group inner l-norms."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != groups.total_size:
        raise ValueError(
            f"vector has length {x.size}, expected {groups.total_size}"
        )
    if outer not in (1, 1.0) and not (isinstance(outer, float) and np.isinf(outer)):
        raise ValueError(f"outer norm must be 1 or inf, got {outer!r}")
    gn = group_lq_norms(x, groups, np.full(groups.n_groups, float(inner)))
    if outer in (1, 1.0):
        return float(gn.sum())
    return float(gn.max())


def _alpha_to_json(a):
    return "inf" if np.isinf(a) else float(a)


def _alpha_from_json(a):
    if isinstance(a, str):
        if a.strip().lower() in ("inf", "infinity", "+inf"):
            return np.inf
        raise ValueError(f"unrecognized exponent value {a!r}")
    return float(a)


def params_to_json(params: DsParams):
    """JSON-ready dict: {"sizes": [...], "tau": t, "weights": [...], "alphas": [...]}."""
    return {
        "sizes": [int(s) for s in params.groups.sizes],
        "tau": float(params.tau),
        "weights": [float(w) for w in params.weights],
        "alphas": [_alpha_to_json(a) for a in params.alphas],
    }


def params_from_json(obj):
    """Build DsParams from the JSON object form; "inf" is accepted for alphas.

    weights/alphas may be omitted, in which case the defaults apply.
    """
    if not isinstance(obj, dict):
        raise ValueError("penalty parameters must be a JSON object")
    if "sizes" not in obj or "tau" not in obj:
        raise ValueError('penalty parameters need at least "sizes" and "tau"')
    groups = GroupStructure(tuple(obj["sizes"]))
    weights = obj.get("weights")
    alphas = obj.get("alphas")
    if alphas is not None:
        alphas = [_alpha_from_json(a) for a in alphas]
    return DsParams(groups=groups, tau=float(obj["tau"]), weights=weights, alphas=alphas)
