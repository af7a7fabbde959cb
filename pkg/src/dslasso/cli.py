"""Command-line front end: norm, decompose, solve, theory, experiment, ball.

Exit codes: 0 success, 1 numerical failure (solver did not converge),
2 input error (bad files, bad flags, inconsistent dimensions).
"""

import argparse
import sys

import numpy as np

from . import fileio
from .dsnorm import DsParams, GroupStructure, params_from_json, params_to_json
from .norms import EpsQ, epsq_ball_boundary, epsq_decompose, epsq_dual_norm, epsq_norm
from .prox import IterationLimitError
from .simulate import (
    ExperimentConfig,
    run_experiment,
    summarize,
    write_record_csv,
)
from .solver import Problem, solve, solve_result_to_json_dict, write_trace_csv
from .theory import (
    DesignModel,
    SparsityLevel,
    case_specialization,
    l2_error_bound,
    lambda_recommendation,
)

__all__ = ["main"]


def _parse_extended_float(text):
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return float("inf")
    return float(text)


def _parse_float_list(text):
    return [_parse_extended_float(tok) for tok in str(text).split(",") if tok.strip()]


def _params_from_args(args):
    if getattr(args, "params", None):
        return params_from_json(fileio.load_json(args.params))
    if getattr(args, "groups", None) is None:
        raise ValueError("provide --params FILE or --groups SIZES")
    sizes = [int(s) for s in str(args.groups).split(",") if s.strip()]
    weights = _parse_float_list(args.weights) if getattr(args, "weights", None) else None
    alphas = _parse_float_list(args.alphas) if getattr(args, "alphas", None) else None
    tau = args.tau if getattr(args, "tau", None) is not None else 0.5
    return DsParams(GroupStructure(tuple(sizes)), tau=tau, weights=weights, alphas=alphas)


def _design_model_from_args(args, p):
    if getattr(args, "sigma_matrix", None):
        sm = fileio.load_matrix(args.sigma_matrix)
    elif getattr(args, "sigma_identity", False):
        sm = np.eye(p)
    else:
        raise ValueError("provide --sigma-matrix FILE or --sigma-identity")
    if args.sigma is None:
        raise ValueError("--sigma (noise level) is required here")
    return DesignModel(sm, args.sigma)


def _emit(doc, out_path):
    text = fileio.dumps_json(doc)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_norm(args):
    x = fileio.load_vector(args.vector)
    p = EpsQ(args.eps, args.q)
    if args.dual:
        doc = {"dual_norm": epsq_dual_norm(x, p)}
    else:
        doc = {"value": epsq_norm(x, p)}
    _emit(doc, args.out)
    return 0


def _cmd_decompose(args):
    x = fileio.load_vector(args.vector)
    dec = epsq_decompose(x, EpsQ(args.eps, args.q))
    _emit(
        {
            "norm_value": dec.norm_value,
            "spiky": list(dec.spiky),
            "flat": list(dec.flat),
        },
        args.out,
    )
    return 0


def _cmd_ball(args):
    pts = epsq_ball_boundary(EpsQ(args.eps, args.q), args.resolution)
    if args.out:
        fileio.write_csv(args.out, ["x", "y"], [(float(a), float(b)) for a, b in pts])
    else:
        sys.stdout.write("x,y\n")
        for a, b in pts:
            sys.stdout.write(f"{a:.17g},{b:.17g}\n")
    return 0


def _cmd_solve(args):
    X = fileio.load_matrix(args.x)
    y = fileio.load_vector(args.y)
    params = _params_from_args(args)
    if str(args.lam).strip().lower() == "auto":
        model = _design_model_from_args(args, params.p)
        lam = lambda_recommendation(params, X.shape[0], model)
    else:
        lam = float(args.lam)
    result = solve(
        Problem(X, y, lam, params), tol=args.tol, max_iters=args.max_iters
    )
    doc = solve_result_to_json_dict(result)
    doc["lambda"] = float(lam)
    _emit(doc, args.out)
    if args.trace:
        write_trace_csv(result, args.trace)
    return 0 if result.converged else 1


def _cmd_theory(args):
    params = _params_from_args(args)
    model = _design_model_from_args(args, params.p)
    sparsity = SparsityLevel(args.s, args.s_g)
    if args.case is not None:
        formulas = case_specialization(args.case, params, args.n, model, sparsity)
        _emit(
            {
                "case": formulas.case_id,
                "lambda": formulas.lambda_value,
                "l2_bound": formulas.bound_value,
                "bound_lambda": formulas.bound_lambda,
                "exact": formulas.exact,
            },
            args.out,
        )
        return 0
    if str(args.lam).strip().lower() == "auto":
        lam = lambda_recommendation(params, args.n, model)
    else:
        lam = float(args.lam)
    report = l2_error_bound(params, model, args.n, lam, sparsity)
    doc = report.to_json_dict()
    doc["lambda"] = float(lam)
    _emit(doc, args.out)
    return 0


def _cmd_experiment(args):
    cfg_doc = fileio.load_json(args.config)
    params = params_from_json(cfg_doc["params"])
    sigma_spec = cfg_doc.get("sigma", "identity")
    if sigma_spec == "identity":
        sm = np.eye(params.p)
    else:
        sm = np.asarray(sigma_spec, dtype=float)
    model = DesignModel(sm, float(cfg_doc["noise_sigma"]))
    sp = cfg_doc.get("sparsity", {"s": 0, "s_G": 0})
    sparsity = SparsityLevel(int(sp["s"]), int(sp["s_G"]))
    rule = cfg_doc.get("lambda_rule", "recommended")
    if isinstance(rule, dict):
        (kind, value), = rule.items()
        rule = (kind, float(value))
    base_seed = args.seed if args.seed is not None else int(cfg_doc.get("base_seed", 0))
    cfg = ExperimentConfig(
        n_grid=tuple(int(n) for n in cfg_doc["n_grid"]),
        trials_per_n=int(cfg_doc["trials_per_n"]),
        params=params,
        lambda_rule=rule,
        tol=float(cfg_doc.get("tol", 1e-6)),
        max_iters=int(cfg_doc.get("max_iters", 20000)),
        base_seed=base_seed,
    )
    magnitude = float(cfg_doc.get("signal_magnitude", 1.0))
    record = run_experiment(cfg, model, sparsity, magnitude)
    out = args.out or "experiment"
    write_record_csv(record, out + ".csv")
    fileio.dump_json(summarize(record, cfg, model, sparsity), out + ".json")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dslasso",
        description="Double-sparsity regression toolkit: interpolating norms, "
        "certified proximal solves, rate formulas and Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    q_type = _parse_extended_float

    p_norm = sub.add_parser("norm", help="evaluate the (eps, q) norm of a vector file")
    p_norm.add_argument("vector", help="CSV or JSON vector file")
    p_norm.add_argument("--eps", type=float, required=True)
    p_norm.add_argument("--q", type=q_type, required=True)
    p_norm.add_argument("--dual", action="store_true", help="evaluate the dual norm")
    p_norm.add_argument("--out")
    p_norm.set_defaults(func=_cmd_norm)

    p_dec = sub.add_parser("decompose", help="spiky/flat split of a vector")
    p_dec.add_argument("vector")
    p_dec.add_argument("--eps", type=float, required=True)
    p_dec.add_argument("--q", type=q_type, required=True)
    p_dec.add_argument("--out")
    p_dec.set_defaults(func=_cmd_decompose)

    p_ball = sub.add_parser("ball", help="2-d unit-ball boundary as CSV")
    p_ball.add_argument("--eps", type=float, required=True)
    p_ball.add_argument("--q", type=q_type, required=True)
    p_ball.add_argument("--resolution", type=int, default=256)
    p_ball.add_argument("--out")
    p_ball.set_defaults(func=_cmd_ball)

    def add_params_flags(p):
        p.add_argument("--params", help="penalty parameters JSON file")
        p.add_argument("--groups", help="comma-separated group sizes")
        p.add_argument("--tau", type=float)
        p.add_argument("--weights", help="comma-separated per-group weights")
        p.add_argument("--alphas", help="comma-separated exponents; 'inf' allowed")

    p_solve = sub.add_parser("solve", help="solve one penalized regression instance")
    p_solve.add_argument("--x", required=True, help="design matrix CSV/JSON")
    p_solve.add_argument("--y", required=True, help="response vector CSV/JSON")
    add_params_flags(p_solve)
    p_solve.add_argument("--lambda", dest="lam", required=True,
                         help="penalty level, or 'auto' for the recommended value")
    p_solve.add_argument("--sigma", type=float, help="noise level for --lambda auto")
    p_solve.add_argument("--sigma-matrix", help="covariance CSV/JSON for --lambda auto")
    p_solve.add_argument("--sigma-identity", action="store_true")
    p_solve.add_argument("--tol", type=float, default=1e-8)
    p_solve.add_argument("--max-iters", type=int, default=10000)
    p_solve.add_argument("--out", help="result JSON path (default: stdout)")
    p_solve.add_argument("--trace", help="optional iteration trace CSV path")
    p_solve.set_defaults(func=_cmd_solve)

    p_th = sub.add_parser("theory", help="constants, penalty level and error bound")
    add_params_flags(p_th)
    p_th.add_argument("--n", type=int, required=True)
    p_th.add_argument("--sigma", type=float, required=True, help="noise level")
    p_th.add_argument("--sigma-matrix")
    p_th.add_argument("--sigma-identity", action="store_true")
    p_th.add_argument("--s", type=int, default=0)
    p_th.add_argument("--s-g", type=int, default=0)
    p_th.add_argument("--lambda", dest="lam", default="auto")
    p_th.add_argument("--case", type=int, help="emit a case 1-7 closed form instead")
    p_th.add_argument("--out")
    p_th.set_defaults(func=_cmd_theory)

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo config")
    p_exp.add_argument("config", help="experiment configuration JSON")
    p_exp.add_argument("--seed", type=int, help="override the config base seed")
    p_exp.add_argument("--out", help="output prefix (writes .csv and .json)")
    p_exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
