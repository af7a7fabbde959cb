"""Synthetic Gaussian-design experiments for validating the rate formulas.

Instances are y = X beta* + noise with rows of X drawn N(0, Sigma); beta* is
(s, s_G)-sparse with seeded group choice, round-robin coordinate placement and
Rademacher signs.  The experiment runner sweeps a sample-size grid, solves
each instance at a configured penalty rule, and records estimation error,
duality gap, the penalty used, and the realized noise dual norm per trial.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dsnorm import DsParams, ds_dual_norm
from .solver import Problem, solve
from .theory import DesignModel, SparsityLevel, l2_error_bound, lambda_recommendation

__all__ = [
    "InstanceSpec",
    "ExperimentConfig",
    "TrialResult",
    "ExperimentRecord",
    "gaussian_design",
    "run_experiment",
    "rate_fit",
    "summarize",
    "write_record_csv",
]


@dataclass(frozen=True, eq=False)
class InstanceSpec:
    """Everything needed to draw one (X, beta*, y) instance deterministically."""

    n: int
    params: DsParams
    model: DesignModel
    sparsity: SparsityLevel
    signal_magnitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.model.p != self.params.p:
            raise ValueError("covariance size does not match the group structure")
        if self.sparsity.s_G > self.params.n_groups:
            raise ValueError("s_G exceeds the number of groups")
        if not self.signal_magnitude > 0.0:
            raise ValueError("signal_magnitude must be positive")


def _place_support(groups, sparsity, rng):
    """Pick s_G groups uniformly, then spread s coordinates round-robin."""
    s, s_g = sparsity.s, sparsity.s_G
    if s == 0:
        return np.array([], dtype=int)
    chosen = np.sort(rng.choice(groups.n_groups, size=s_g, replace=False))
    capacity = sum(groups.sizes[g] for g in chosen)
    if s > capacity:
        raise ValueError(
            f"s = {s} nonzeros do not fit in the chosen groups (capacity {capacity})"
        )
    used = {g: 0 for g in chosen}
    support = []
    g_cycle = 0
    while len(support) < s:
        g = chosen[g_cycle % s_g]
        if used[g] < groups.sizes[g]:
            start = int(groups.starts[g])
            support.append(start + used[g])
            used[g] += 1
        g_cycle += 1
    return np.array(sorted(support), dtype=int)


def gaussian_design(spec: InstanceSpec):
    """Draw (X, beta*, y); fully deterministic given spec.seed.

    X = W L^T with W standard normal and L the Cholesky factor of Sigma, so
    rows are N(0, Sigma).  Noise is N(0, sigma^2 I); sigma = 0 gives y = X beta*.
    """
    rng = np.random.default_rng(np.uint64(spec.seed))
    p = spec.params.p
    try:
        chol = np.linalg.cholesky(spec.model.sigma_matrix)
    except np.linalg.LinAlgError as exc:
        raise ValueError("sigma_matrix is not positive definite") from exc
    W = rng.standard_normal((spec.n, p))
    X = W @ chol.T
    support = _place_support(spec.params.groups, spec.sparsity, rng)
    beta_star = np.zeros(p)
    if support.size:
        signs = rng.integers(0, 2, size=support.size) * 2 - 1
        beta_star[support] = spec.signal_magnitude * signs
    noise = spec.model.noise_sigma * rng.standard_normal(spec.n)
    y = X @ beta_star + noise
    return X, beta_star, y


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Grid of sample sizes and solver/penalty settings for a Monte Carlo run.

    lambda_rule is "recommended", ("scaled", factor), or ("fixed", value).
    """

    n_grid: tuple
    trials_per_n: int
    params: DsParams
    lambda_rule: object = "recommended"
    tol: float = 1e-6
    max_iters: int = 20000
    base_seed: int = 0

    def __post_init__(self):
        n_grid = tuple(int(n) for n in self.n_grid)
        if len(n_grid) == 0:
            raise ValueError("n_grid must be nonempty")
        if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials_per_n < 1:
            raise ValueError("trials_per_n must be >= 1")
        object.__setattr__(self, "n_grid", n_grid)


@dataclass(frozen=True)
class TrialResult:
    n: int
    trial: int
    error_l2: float
    gap: float
    lam: float
    noise_dual: float
    converged: bool
    column_norm_constant: float  # realized max_j ||X_j||_2 / sqrt(n)


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    rows: tuple

    def errors_by_n(self):
        out = {}
        for r in self.rows:
            out.setdefault(r.n, []).append(r.error_l2)
        return out


def _trial_seed(base_seed, n, trial):
    ss = np.random.SeedSequence([int(base_seed), int(n), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _resolve_lambda(rule, params, n, model):
    if rule == "recommended":
        return lambda_recommendation(params, n, model)
    kind, value = rule
    if kind == "fixed":
        return float(value)
    if kind == "scaled":
        return float(value) * lambda_recommendation(params, n, model)
    raise ValueError(f"unknown lambda rule {rule!r}")


def run_trial(cfg: ExperimentConfig, model: DesignModel, sparsity: SparsityLevel,
              n: int, trial: int, signal_magnitude: float = 1.0):
    """One (n, trial) cell; independent of any other cell."""
    spec = InstanceSpec(
        n=n, params=cfg.params, model=model, sparsity=sparsity,
        signal_magnitude=signal_magnitude, seed=_trial_seed(cfg.base_seed, n, trial),
    )
    X, beta_star, y = gaussian_design(spec)
    lam = _resolve_lambda(cfg.lambda_rule, cfg.params, n, model)
    result = solve(Problem(X, y, lam, cfg.params), tol=cfg.tol, max_iters=cfg.max_iters)
    eps_vec = y - X @ beta_star
    noise_dual = ds_dual_norm(X.T @ eps_vec, cfg.params) / n
    col_const = float(np.max(np.sqrt(np.sum(X * X, axis=0))) / math.sqrt(n))
    return TrialResult(
        n=n,
        trial=trial,
        error_l2=float(np.linalg.norm(result.beta_hat - beta_star)),
        gap=float(result.duality_gap),
        lam=float(lam),
        noise_dual=float(noise_dual),
        converged=bool(result.converged),
        column_norm_constant=col_const,
    )


def run_experiment(cfg: ExperimentConfig, model: DesignModel, sparsity: SparsityLevel,
                   signal_magnitude: float = 1.0):
    """Run the full (n, trial) grid; rows are keyed so order never matters."""
    rows = []
    for n in cfg.n_grid:
        for trial in range(cfg.trials_per_n):
            rows.append(run_trial(cfg, model, sparsity, n, trial, signal_magnitude))
    rows.sort(key=lambda r: (r.n, r.trial))
    return ExperimentRecord(rows=tuple(rows))


def rate_fit(record: ExperimentRecord):
    """Least-squares slope/intercept of log(median error) against log(n)."""
    by_n = record.errors_by_n()
    if len(by_n) < 3:
        raise ValueError(f"rate fit needs >= 3 distinct n values, got {len(by_n)}")
    ns = np.array(sorted(by_n))
    med = np.array([np.median(by_n[n]) for n in ns])
    if np.any(med <= 0):
        raise ValueError("rate fit needs positive median errors")
    slope, intercept = np.polyfit(np.log(ns), np.log(med), 1)
    return float(slope), float(intercept)


def summarize(record: ExperimentRecord, cfg: ExperimentConfig, model: DesignModel,
              sparsity: SparsityLevel):
    """Medians per n, rate fit when possible, and the theory-bound event rate."""
    by_n = record.errors_by_n()
    medians = {int(n): float(np.median(v)) for n, v in sorted(by_n.items())}
    summary = {
        "medians": medians,
        "trials": len(record.rows),
        "converged_fraction": float(np.mean([r.converged for r in record.rows])),
        "column_norm_constant_median": float(
            np.median([r.column_norm_constant for r in record.rows])
        ),
    }
    try:
        slope, intercept = rate_fit(record)
        summary["rate_fit"] = {"slope": slope, "intercept": intercept}
    except ValueError:
        summary["rate_fit"] = None
    eligible = 0
    violations = 0
    for r in record.rows:
        report = l2_error_bound(cfg.params, model, r.n, r.lam, sparsity)
        if report.l2_bound is None:
            continue
        eligible += 1
        if r.error_l2 ** 2 > report.l2_bound:
            violations += 1
    summary["bound_eligible_trials"] = eligible
    summary["bound_violation_fraction"] = (
        violations / eligible if eligible else None
    )
    return summary


def write_record_csv(record: ExperimentRecord, path):
    from .fileio import write_csv

    write_csv(
        path,
        ["n", "trial", "error_l2", "gap", "lambda", "noise_dual"],
        [
            (r.n, r.trial, r.error_l2, r.gap, r.lam, r.noise_dual)
            for r in record.rows
        ],
    )
