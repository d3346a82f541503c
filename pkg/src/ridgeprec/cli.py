"""Command-line interface.

Subcommands: estimate, cv, ggm, simulate, moments. All output tables are
CSV with 17-significant-digit values; a one-line provenance header goes to
stderr. Exit codes: 0 success, 1 usage error, 2 data/numeric error.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__, cv, estimators, ggm, matio, moments, simulate
from .errors import InvalidParameterError, RidgeprecError
from .estimators import Target
from .matio import fmt


class UsageError(Exception):
    """Bad flag value or flag combination; exits 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems by default; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_target(spec: str):
    """Parse a target spec: zero | identity | scalar:PSI | ddiag | file:PATH."""
    if spec == "zero":
        return Target.zero()
    if spec == "identity":
        return Target.identity()
    if spec == estimators.DDIAG:
        return estimators.DDIAG
    if spec.startswith("scalar:"):
        try:
            psi = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad scalar target {spec!r}") from None
        return Target.scalar(psi)
    if spec.startswith("file:"):
        return Target.full(matio.read_matrix(spec.split(":", 1)[1]))
    raise UsageError(
        f"unknown target {spec!r}; expected zero, identity, scalar:PSI, ddiag, or file:PATH"
    )


def _parse_int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    try:
        return [int(tok) for tok in str(value).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {value!r}") from None


def _parse_kind_list(value) -> list[str]:
    kinds = [tok.strip() for tok in str(value).split(",") if tok.strip()]
    for kind in kinds:
        if kind not in estimators.KINDS:
            raise UsageError(
                f"unknown estimator {kind!r}; expected one of {', '.join(estimators.KINDS)}"
            )
    return kinds


def _positive_lambda(args) -> float | None:
    lam = getattr(args, "lambda")
    if lam is not None and lam <= 0:
        raise UsageError("lambda must be positive")
    return lam


def _grid_from_flags(args, S=None, Omega=None, kind=None) -> np.ndarray:
    given = (args.grid_min is not None, args.grid_max is not None)
    if any(given) and not all(given):
        raise UsageError("--grid-min and --grid-max must be given together")
    if all(given):
        if args.grid_min <= 0 or args.grid_max <= args.grid_min:
            raise UsageError("grid bounds must satisfy 0 < min < max")
        return np.logspace(np.log10(args.grid_min), np.log10(args.grid_max), args.grid_n)
    if S is not None:
        return cv.default_grid(S, num=args.grid_n, kind=kind)
    return simulate.default_risk_grid(Omega, num=args.grid_n)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_estimate(args) -> int:
    if not args.data:
        raise UsageError("--data FILE is required")
    lam = _positive_lambda(args)
    if args.auto_lambda and lam is not None:
        raise UsageError("give either --lambda or --auto-lambda, not both")
    Y = matio.read_data(args.data, header=args.header)
    S = estimators.sample_cov(Y, center=args.center)
    target = parse_target(args.target)
    if args.auto_lambda:
        grid = _grid_from_flags(args, S=S, kind=args.estimator)
        config = cv.CVConfig(
            grid=grid,
            scheme="aloocv",
            estimator=args.estimator,
            target=target,
            center=args.center,
        )
        lam = cv.select_lambda(Y, config, threads=args.threads).lambda_star
    if lam is None:
        raise UsageError("a penalty is required: --lambda or --auto-lambda")
    est = estimators.fit(args.estimator, S, lam, target)
    _emit(matio.matrix_to_csv(est.omega), args.output)
    return 0


def cmd_cv(args) -> int:
    if not args.data:
        raise UsageError("--data FILE is required")
    Y = matio.read_data(args.data, header=args.header)
    S = estimators.sample_cov(Y, center=args.center)
    target = parse_target(args.target)
    grid = _grid_from_flags(args, S=S, kind=args.estimator)
    fold_seed = args.fold_seed if args.fold_seed is not None else args.seed
    config = cv.CVConfig(
        grid=grid,
        scheme=args.scheme,
        k=args.k,
        fold_seed=fold_seed,
        estimator=args.estimator,
        target=target,
        center=args.center,
    )
    result = cv.select_lambda(Y, config, threads=args.threads)
    lines = ["lambda,score"]
    lines += [f"{fmt(la)},{fmt(sc)}" for la, sc in zip(result.grid, result.scores)]
    lines.append(f"lambda_star,{fmt(result.lambda_star)}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_ggm(args) -> int:
    if bool(args.data) == bool(args.omega):
        raise UsageError("give exactly one of --data and --omega")
    lam = _positive_lambda(args)
    if not 0.0 <= args.threshold <= 1.0:
        raise UsageError("threshold must be in [0, 1]")
    if args.omega and (lam is not None or args.auto_lambda):
        raise UsageError("--lambda/--auto-lambda apply only with --data")
    if args.auto_lambda and lam is not None:
        raise UsageError("give either --lambda or --auto-lambda, not both")
    target = parse_target(args.target)
    grid = None
    if args.data and (args.grid_min is not None or args.grid_max is not None):
        # Bounds must be fully given here, so the S fallback is never reached.
        grid = _grid_from_flags(args, S=np.eye(2))
    res = ggm.extract_network(
        Y=matio.read_data(args.data, header=args.header) if args.data else None,
        omega=matio.read_matrix(args.omega, header=args.header) if args.omega else None,
        estimator=args.estimator,
        target=target,
        lam=lam,
        auto_lambda=args.auto_lambda,
        grid=grid,
        threshold=args.threshold,
        center=args.center,
        threads=args.threads,
    )
    edge_lines = ["i,j,partial_corr,one_minus_lfdr,selected"]
    for (i, j), prob in res.probabilities.items():
        sel = 1 if (i, j) in res.selected else 0
        edge_lines.append(f"{i},{j},{fmt(res.partials[i, j])},{fmt(prob)},{sel}")
    edges_csv = "\n".join(edge_lines) + "\n"
    sparse_csv = matio.matrix_to_csv(res.sparsified)
    report_lines = [
        f"eta0,{fmt(res.fit.eta0)}",
        f"kappa,{fmt(res.fit.kappa)}",
        f"min_eigenvalue,{fmt(res.min_eigenvalue)}",
        f"lambda,{fmt(res.lambda_used) if res.lambda_used is not None else 'NA'}",
    ]
    report = "\n".join(report_lines) + "\n"
    if res.min_eigenvalue <= 0:
        print(
            "warning: sparsified precision is not positive definite "
            f"(min eigenvalue {fmt(res.min_eigenvalue)})",
            file=sys.stderr,
        )
    if args.edges_out:
        _emit(edges_csv, args.edges_out)
    if args.sparsified_out:
        _emit(sparse_csv, args.sparsified_out)
    out = []
    if not args.edges_out:
        out.append("# edges\n" + edges_csv)
    if not args.sparsified_out:
        out.append("# sparsified_precision\n" + sparse_csv)
    out.append("# report\n" + report)
    sys.stdout.write("".join(out))
    return 0


def cmd_simulate(args) -> int:
    sizes = _parse_int_list(args.n)
    if not sizes:
        raise UsageError("--n needs at least one sample size")
    kinds = _parse_kind_list(args.estimators)
    target = parse_target(args.target)
    spec = simulate.PopulationSpec(
        topology=args.topology,
        p=args.p,
        seed=args.seed,
        n0=args.n0,
        blocks=args.blocks,
        offdiag=args.offdiag,
    )
    Omega = simulate.population_precision(spec)
    grid = _grid_from_flags(args, Omega=Omega)
    config = simulate.RiskConfig(
        population=spec,
        sample_sizes=sizes,
        grid=grid,
        estimators=kinds,
        target=target,
        reps=args.reps,
        loss=args.loss,
        base_seed=args.seed,
    )
    curve = simulate.risk_curve(config, threads=args.threads)
    lines = ["estimator,target,n,lambda,median_loss"]
    for kind in kinds:
        label = "none" if kind in ("alt-2", "archetype-2") else curve.target_label
        for n in sizes:
            med = curve.medians[(kind, n)]
            lines += [
                f"{kind},{label},{n},{fmt(la)},{fmt(m)}"
                for la, m in zip(curve.grid, med)
            ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_moments(args) -> int:
    if not args.sigma:
        raise UsageError("--sigma FILE is required")
    lam = _positive_lambda(args)
    if lam is None:
        raise UsageError("--lambda is required")
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    Sigma = matio.read_matrix(args.sigma, header=args.header)
    approx = moments.bias_approx_type2(Sigma, args.n, lam)
    out = ["# approximation\n" + matio.matrix_to_csv(approx)]
    if args.mc_reps is not None:
        if args.mc_reps < 1:
            raise UsageError("--mc-reps must be a positive integer")
        mc = moments.mc_moments(Sigma, args.n, lam, reps=args.mc_reps, seed=args.seed)
        out.append("# mc_estimate\n" + matio.matrix_to_csv(mc))
    _emit("".join(out), args.output)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_common(sp) -> None:
    sp.add_argument("--seed", type=int, default=0, help="base RNG seed (64-bit)")
    sp.add_argument(
        "--threads", type=int, default=1, help="worker threads; 0 means one per CPU"
    )
    sp.add_argument("--config", help="JSON file mirroring the flags; flags override it")
    sp.add_argument("--header", action="store_true", help="input CSV has a header row")
    sp.add_argument("--output", help="write the main output here instead of stdout")


def _add_grid_flags(sp) -> None:
    sp.add_argument("--grid-min", type=float, help="smallest grid penalty")
    sp.add_argument("--grid-max", type=float, help="largest grid penalty")
    sp.add_argument("--grid-n", type=int, default=50, help="number of grid points")


def _add_estimator_flags(sp) -> None:
    sp.add_argument(
        "--estimator",
        choices=estimators.KINDS,
        default="alt-1",
        help="estimator kind",
    )
    sp.add_argument(
        "--target",
        default="ddiag",
        help="target spec: zero | identity | scalar:PSI | ddiag | file:PATH",
    )
    sp.add_argument(
        "--center", action="store_true", help="subtract column means before S = Y'Y/n"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ridgeprec", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_est = sub.add_parser("estimate", help="fit a precision matrix from data")
    p_est.add_argument("--data", help="n x p data CSV")
    p_est.add_argument("--lambda", type=float, help="penalty in the estimator's own scale")
    p_est.add_argument(
        "--auto-lambda", action="store_true", help="choose the penalty by approximate LOOCV"
    )
    _add_estimator_flags(p_est)
    _add_grid_flags(p_est)
    _add_common(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_cv = sub.add_parser("cv", help="cross-validate the penalty")
    p_cv.add_argument("--data", help="n x p data CSV")
    p_cv.add_argument("--scheme", choices=cv.SCHEMES, default="aloocv")
    p_cv.add_argument("--k", type=int, default=5, help="folds for the kfold scheme")
    p_cv.add_argument("--fold-seed", type=int, help="fold shuffle seed (defaults to --seed)")
    _add_estimator_flags(p_cv)
    _add_grid_flags(p_cv)
    _add_common(p_cv)
    p_cv.set_defaults(func=cmd_cv)

    p_ggm = sub.add_parser("ggm", help="extract a conditional-independence graph")
    p_ggm.add_argument("--data", help="n x p data CSV")
    p_ggm.add_argument("--omega", help="p x p precision CSV (skips estimation)")
    p_ggm.add_argument("--lambda", type=float, help="penalty in the estimator's own scale")
    p_ggm.add_argument(
        "--auto-lambda", action="store_true", help="choose the penalty by approximate LOOCV"
    )
    p_ggm.add_argument(
        "--threshold", type=float, default=0.99, help="posterior presence cutoff"
    )
    p_ggm.add_argument("--edges-out", help="write the edge list here instead of stdout")
    p_ggm.add_argument(
        "--sparsified-out", help="write the sparsified precision here instead of stdout"
    )
    _add_estimator_flags(p_ggm)
    _add_grid_flags(p_ggm)
    _add_common(p_ggm)
    p_ggm.set_defaults(func=cmd_ggm)

    p_sim = sub.add_parser("simulate", help="Monte Carlo risk curves")
    p_sim.add_argument("--topology", choices=simulate.TOPOLOGIES, default="chain")
    p_sim.add_argument("--p", type=int, default=10, help="dimension")
    p_sim.add_argument("--n", default="10", help="comma-separated sample sizes")
    p_sim.add_argument("--reps", type=int, default=100, help="replicates per sample size")
    p_sim.add_argument("--loss", choices=simulate.LOSSES, default="quadratic")
    p_sim.add_argument(
        "--estimators",
        default="alt-1,archetype-1",
        help="comma-separated estimator kinds",
    )
    p_sim.add_argument("--n0", type=int, default=10000, help="draws behind the random topology")
    p_sim.add_argument("--blocks", type=int, default=5, help="clique block count")
    p_sim.add_argument("--offdiag", type=float, default=0.25, help="clique off-diagonal value")
    _add_estimator_flags(p_sim)
    _add_grid_flags(p_sim)
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_mom = sub.add_parser("moments", help="bias approximation and MC moments")
    p_mom.add_argument("--sigma", help="p x p population covariance CSV")
    p_mom.add_argument("--n", type=int, default=10, help="sample size behind S")
    p_mom.add_argument("--lambda", type=float, help="alternative-scale penalty")
    p_mom.add_argument("--mc-reps", type=int, help="also run a Monte Carlo estimate")
    _add_common(p_mom)
    p_mom.set_defaults(func=cmd_moments)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Expand ``--config FILE`` into argv tokens; explicit flags win."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    with open(path) as fh:
        try:
            loaded = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"bad config JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise InvalidParameterError("config JSON must be an object of flag values")
    present = {tok.split("=", 1)[0] for tok in argv if tok.startswith("--")}
    out = list(argv)
    for key, value in loaded.items():
        flag = "--" + str(key).replace("_", "-")
        if flag == "--config" or flag in present:
            continue
        if isinstance(value, bool):
            if value:
                out.append(flag)
        elif isinstance(value, (list, tuple)):
            out.append(f"{flag}=" + ",".join(str(v) for v in value))
        else:
            out.append(f"{flag}={value}")
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(argv)
    except (RidgeprecError, OSError) as exc:
        print(f"ridgeprec: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    print(f"ridgeprec {__version__} {args.command} seed={args.seed}", file=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ridgeprec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except RidgeprecError as exc:
        print(f"ridgeprec {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ridgeprec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
