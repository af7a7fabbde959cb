"""Closed-form constants and bounds for the double-sparsity estimator.

Everything here is plain arithmetic on the penalty parameters, the design
covariance and the noise level: the restricted-eigenvalue ingredients kappa1
and kappa2, the recommended penalty level, the matching high-probability bound
on the noise dual norm, the squared-L2 error bound, and the closed forms the
general expressions reduce to in the classical single- and double-sparsity
special cases.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dsnorm import DsParams

__all__ = [
    "DesignModel",
    "SparsityLevel",
    "TheoryReport",
    "CaseFormulas",
    "kappa1",
    "kappa2",
    "lambda_recommendation",
    "noise_dual_bound",
    "l2_error_bound",
    "case_specialization",
]


def _pos(x):
    return x if x > 0.0 else 0.0


@dataclass(frozen=True, eq=False)
class DesignModel:
    """Row covariance of the Gaussian design plus the noise scale."""

    sigma_matrix: np.ndarray
    noise_sigma: float

    def __post_init__(self):
        sm = np.asarray(self.sigma_matrix, dtype=float)
        if sm.ndim != 2 or sm.shape[0] != sm.shape[1]:
            raise ValueError(f"covariance must be square, got shape {sm.shape}")
        if np.max(np.abs(sm - sm.T)) > 1e-10:
            raise ValueError("covariance must be symmetric (within 1e-10)")
        eigs = np.linalg.eigvalsh(sm)
        if eigs[0] <= 0.0:
            raise ValueError(
                f"covariance must be positive definite; smallest eigenvalue {eigs[0]:.3e}"
            )
        if not self.noise_sigma > 0.0:
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma!r}")
        sm = sm.copy()
        sm.flags.writeable = False
        object.__setattr__(self, "sigma_matrix", sm)
        object.__setattr__(self, "min_eigenvalue", float(eigs[0]))

    @classmethod
    def identity(cls, p, noise_sigma=1.0):
        return cls(np.eye(int(p)), noise_sigma)

    @property
    def p(self):
        return self.sigma_matrix.shape[0]


@dataclass(frozen=True)
class SparsityLevel:
    """Element support size s and group support size s_G of the truth."""

    s: int
    s_G: int

    def __post_init__(self):
        if self.s < 0 or self.s_G < 0:
            raise ValueError("sparsity levels must be nonnegative")
        if self.s_G > 0 and self.s < self.s_G:
            raise ValueError(
                f"s = {self.s} nonzeros cannot occupy s_G = {self.s_G} groups"
            )
        if self.s_G == 0 and self.s > 0:
            raise ValueError("s > 0 requires s_G >= 1")


@dataclass(frozen=True, eq=False)
class TheoryReport:
    """Computed constants for one (penalty, covariance, n, lambda, sparsity) tuple.

    l2_bound is a bound on ||beta_hat - beta*||_2^2, or None when the sample
    size precondition fails (n <= n_min or a nonpositive RE constant).
    """

    kappa1: float
    kappa2: float
    re_constant: float
    lambda_min_recommended: float
    n_min: int
    l2_bound: float | None

    @property
    def precondition_ok(self):
        return self.l2_bound is not None

    def to_json_dict(self):
        return {
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "re_constant": self.re_constant,
            "lambda_min_recommended": self.lambda_min_recommended,
            "n_min": self.n_min,
            "l2_bound": self.l2_bound if self.l2_bound is not None
            else "precondition-violated",
        }


def _check_model(params, model):
    if model.p != params.p:
        raise ValueError(
            f"covariance is {model.p}x{model.p} but the penalty expects p = {params.p}"
        )


def kappa1(params: DsParams, model: DesignModel):
    """Dual-norm concentration constant of the design covariance.

    Per group the value is the smaller of a trace branch and a log branch;
    singleton groups contribute 0 through log(1) = 0.
    """
    _check_model(params, model)
    best = 0.0
    diag = np.diag(model.sigma_matrix)
    for g in range(params.n_groups):
        sl = params.groups.slice_of(g)
        pg = float(params.groups.sizes[g])
        alpha = params.alphas[g]
        eg = params.epsilons[g]
        scale = params.scales[g]
        inv_alpha = 0.0 if np.isinf(alpha) else 1.0 / alpha
        trace_g = float(np.trace(model.sigma_matrix[sl, sl]))
        b1 = pg ** _pos(0.5 - inv_alpha) * math.sqrt(trace_g) / scale
        denom = scale * (1.0 - eg + eg * pg ** (inv_alpha - 1.0))
        b2 = 3.0 * math.sqrt(math.log(pg) * float(np.max(diag[sl]))) / denom
        best = max(best, min(b1, b2))
    return float(best)


def kappa2(params: DsParams):
    """sqrt(G) * max_g (tau*sqrt(p_g) + (1-tau)*w_g*p_g^{(1/alpha_g - 1/2)_+})."""
    vals = []
    for g in range(params.n_groups):
        pg = float(params.groups.sizes[g])
        alpha = params.alphas[g]
        inv_alpha = 0.0 if np.isinf(alpha) else 1.0 / alpha
        vals.append(
            params.tau * math.sqrt(pg)
            + (1.0 - params.tau) * params.weights[g] * pg ** _pos(inv_alpha - 0.5)
        )
    return float(math.sqrt(params.n_groups) * max(vals))


def _group_lambda_pieces(params, g, n):
    """(amplitude, min of the two deviation branches) for group g at sample size n."""
    pg = float(params.groups.sizes[g])
    alpha = params.alphas[g]
    ast = params.alpha_stars[g]
    eg = params.epsilons[g]
    inv_alpha = 0.0 if np.isinf(alpha) else 1.0 / alpha
    inv_ast = 0.0 if np.isinf(ast) else 1.0 / ast
    amp = eg * pg ** _pos(inv_alpha - 0.5) + (1.0 - eg) * math.sqrt(pg)
    b1 = pg ** _pos(0.5 - inv_alpha) * math.sqrt(n * pg)
    pia = pg ** inv_ast
    b2 = pia * math.sqrt(2.0 * n * math.log(pg)) / (pia * (1.0 - eg) + eg)
    return amp, min(b1, b2)


def lambda_recommendation(params: DsParams, n: int, model: DesignModel):
    """Smallest penalty level the error bound is stated for.

    2*sigma*max_g [amp_g * min(branches) + sqrt(6 n log G)] / scale_g; the
    log branch vanishes for singleton groups, which is what produces the
    classical pure-l1 level.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_model(params, model)
    log_g = math.log(params.n_groups)
    best = 0.0
    for g in range(params.n_groups):
        amp, dev = _group_lambda_pieces(params, g, n)
        best = max(best, (amp * dev + math.sqrt(6.0 * n * log_g)) / params.scales[g])
    return float(2.0 * model.noise_sigma * best)


def noise_dual_bound(params: DsParams, n: int, model: DesignModel):
    """High-probability bound on ||X^T eps||*_ds / n (probability >= 1 - 2/G^2).

    Stated directly in its own 1/sqrt(n) form; algebraically this equals
    lambda_recommendation / (2n).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_model(params, model)
    log_g = math.log(params.n_groups)
    best = 0.0
    for g in range(params.n_groups):
        amp, dev = _group_lambda_pieces(params, g, n)
        val = (amp * (dev / n) + math.sqrt(6.0 * log_g / n)) / params.scales[g]
        best = max(best, val)
    return float(model.noise_sigma * best)


def _sparsity_factor(params, sparsity):
    """tau*sqrt(s) + (1-tau)*sqrt(s_G)*max_g w_g p_g^{(1/alpha_g - 1/2)_+}."""
    wmax = 0.0
    for g in range(params.n_groups):
        pg = float(params.groups.sizes[g])
        alpha = params.alphas[g]
        inv_alpha = 0.0 if np.isinf(alpha) else 1.0 / alpha
        wmax = max(wmax, params.weights[g] * pg ** _pos(inv_alpha - 0.5))
    return params.tau * math.sqrt(sparsity.s) + (
        1.0 - params.tau
    ) * math.sqrt(sparsity.s_G) * wmax


def l2_error_bound(params: DsParams, model: DesignModel, n: int, lam: float,
                   sparsity: SparsityLevel):
    """Full report: kappas, RE constant, sample-size threshold and the squared bound.

    The bound 4 lambda^2 [tau sqrt(s) + (1-tau) sqrt(s_G) max_g w_g
    p_g^{(1/alpha-1/2)_+}]^2 / re^4 is only meaningful past the sample-size
    threshold n_min = ceil(144 kappa1^2 kappa2^2 / lambda_min(Sigma)); below
    it the report carries the precondition flag instead of a number.
    """
    if not lam > 0.0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_model(params, model)
    k1 = kappa1(params, model)
    k2 = kappa2(params)
    lmin = model.min_eigenvalue
    n_min = int(math.ceil(144.0 * k1 * k1 * k2 * k2 / lmin))
    re = math.sqrt(n) / 4.0 * math.sqrt(lmin) - 3.0 * k1 * k2
    lam_rec = lambda_recommendation(params, n, model)
    if n > n_min and re > 0.0:
        bound = 4.0 * lam * lam * _sparsity_factor(params, sparsity) ** 2 / re ** 4
    else:
        bound = None
    return TheoryReport(
        kappa1=k1,
        kappa2=k2,
        re_constant=float(re),
        lambda_min_recommended=lam_rec,
        n_min=n_min,
        l2_bound=bound,
    )


@dataclass(frozen=True)
class CaseFormulas:
    """Per-case closed forms.

    lambda_value is the case's penalty level.  bound_value bounds the squared
    L2 error; it is exact for case 1 (evaluated at bound_lambda) and an
    order-form with all hidden universal constants set to 1 for cases 2-7.
    """

    case_id: int
    lambda_value: float
    bound_value: float
    bound_lambda: float
    exact: bool


def _require(cond, case_id, what):
    if not cond:
        raise ValueError(f"case {case_id} requires {what}")


def _uniform_alpha(params, value, case_id):
    if np.isinf(value):
        _require(bool(np.all(np.isinf(params.alphas))), case_id, "alpha = inf for all groups")
    else:
        _require(bool(np.all(params.alphas == value)), case_id, f"alpha = {value} for all groups")


def case_specialization(case_id: int, params: DsParams, n: int, model: DesignModel,
                        sparsity: SparsityLevel):
    """Evaluate the closed forms of specialization cases 1-7.

    1: tau=1 (pure l1, singleton groups);  2: tau=0, alpha=1;  3: tau=0,
    alpha=2;  4: tau=0, alpha=inf;  5/6/7: tau in (0,1) with alpha = 1/2/inf.
    """
    if case_id not in range(1, 8):
        raise ValueError(f"case id must be 1..7, got {case_id}")
    _check_model(params, model)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sigma = model.noise_sigma
    G = params.n_groups
    sizes = np.asarray(params.groups.sizes, dtype=float)
    w = params.weights
    tau = params.tau
    scales = params.scales
    eps = params.epsilons
    log_g = math.log(G)
    s, s_g = sparsity.s, sparsity.s_G

    if case_id == 1:
        _require(tau == 1.0, 1, "tau = 1")
        _require(bool(np.all(sizes == 1.0)), 1, "singleton groups (p_g = 1, G = p)")
        p = G
        lam = 2.0 * sigma * math.sqrt(6.0 * n * math.log(p))
        bound_lambda = sigma * math.sqrt(6.0 * n * math.log(p))
        lmin_sq = model.min_eigenvalue ** 2  # = lambda_min(Sigma^2) for SPD Sigma
        bound = 6144.0 / lmin_sq * sigma ** 2 * s * math.log(p) / n
        return CaseFormulas(1, float(lam), float(bound), float(bound_lambda), True)

    if case_id == 2:
        _require(tau == 0.0, 2, "tau = 0")
        _uniform_alpha(params, 1.0, 2)
        lam = 2.0 * sigma * math.sqrt(n) * float(
            np.max((np.sqrt(2.0 * sizes * np.log(sizes)) + math.sqrt(6.0 * log_g)) / w)
        )
        m1 = float(np.max(sizes ** 2 * np.log(sizes)))
        m2 = float(np.max(sizes))
        bound = sigma ** 2 * s_g * (
            math.sqrt(m1 / n) + math.sqrt(m2 * log_g / n)
        ) ** 2
        return CaseFormulas(2, float(lam), float(bound), float(lam), False)

    if case_id == 3:
        _require(tau == 0.0, 3, "tau = 0")
        _uniform_alpha(params, 2.0, 3)
        lam = 2.0 * sigma * float(
            np.max((np.sqrt(n * sizes) + math.sqrt(6.0 * n * log_g)) / w)
        )
        m2 = float(np.max(sizes))
        bound = sigma ** 2 * s_g * (math.sqrt(m2 / n) + math.sqrt(log_g / n)) ** 2
        return CaseFormulas(3, float(lam), float(bound), float(lam), False)

    if case_id == 4:
        _require(tau == 0.0, 4, "tau = 0")
        _uniform_alpha(params, np.inf, 4)
        lam = 2.0 * sigma * math.sqrt(n) * float(
            np.max((sizes + math.sqrt(6.0 * log_g)) / w)
        )
        m3 = float(np.max(sizes ** 2))
        bound = sigma ** 2 * s_g * (math.sqrt(m3 / n) + math.sqrt(log_g / n)) ** 2
        return CaseFormulas(4, float(lam), float(bound), float(lam), False)

    _require(0.0 < tau < 1.0, case_id, "tau strictly inside (0, 1)")

    if case_id == 5:
        _uniform_alpha(params, 1.0, 5)
        lam = 2.0 * sigma * math.sqrt(n) * float(
            np.max((np.sqrt(2.0 * sizes * np.log(sizes)) + math.sqrt(6.0 * log_g)) / scales)
        )
        m1 = float(np.max(sizes ** 2 * np.log(sizes)))
        m2 = float(np.max(sizes))
        bound = sigma ** 2 * s_g * (
            math.sqrt(m1 / n) + math.sqrt(m2 * log_g / n)
        ) ** 2
        return CaseFormulas(5, float(lam), float(bound), float(lam), False)

    if case_id == 6:
        _uniform_alpha(params, 2.0, 6)
        inner = (eps + (1.0 - eps) * np.sqrt(sizes)) * np.sqrt(sizes)
        lam = 2.0 * sigma * math.sqrt(n) * float(
            np.max((inner + math.sqrt(6.0 * log_g)) / scales)
        )
        mix = tau * math.sqrt(s) + (1.0 - tau) * math.sqrt(s_g) * float(np.max(w))
        bound = sigma ** 2 / n * (float(np.max(inner)) + math.sqrt(6.0 * log_g)) ** 2 * mix ** 2
        return CaseFormulas(6, float(lam), float(bound), float(lam), False)

    _uniform_alpha(params, np.inf, 7)
    inner = (eps + (1.0 - eps) * np.sqrt(sizes)) * sizes
    lam = 2.0 * sigma * math.sqrt(n) * float(
        np.max((inner + math.sqrt(6.0 * log_g)) / scales)
    )
    mix = tau * math.sqrt(s) + (1.0 - tau) * math.sqrt(s_g) * float(np.max(w))
    bound = sigma ** 2 / n * (float(np.max(inner)) + math.sqrt(6.0 * log_g)) ** 2 * mix ** 2
    return CaseFormulas(7, float(lam), float(bound), float(lam), False)
