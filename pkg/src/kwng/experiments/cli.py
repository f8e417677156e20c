"""Command-line entry point for the desk-scale experiment suite.

Subcommands: sweep-n, sweep-m, sweep-d, sweep-bandwidth, trajectory,
invariance, selftest.  Relative error is defined throughout as
||estimate - exact|| / ||exact||.  Exit codes: 0 success, 1 usage error,
2 numerical failure, 3 self-test failure.
"""

import argparse
import dataclasses
import sys

import numpy as np

from ..errors import KwngError
from ..kernels import KernelSpec
from . import svgplot
from .invariance import run_invariance
from .records import write_records
from .selftest import run_selftest
from .svgplot_compose import compose_horizontal
from .sweeps import SweepConfig, median_by, run_bandwidth_sweep, run_error_sweep
from .trajectory import run_trajectory, write_trajectory_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _basis(text):
    if text == "dsqrtn":
        return "dsqrtn"
    return _ints(text)


def _bandwidth(text):
    if text in ("meansq", "median"):
        return (text, 1.0)
    if text.startswith("fixed:"):
        try:
            return ("fixed", float(text.split(":", 1)[1]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"expected fixed:<value>, meansq or median, got {text!r}"
    )


def _clip(text):
    if text == "off":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a norm or 'off', got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("clip norm must be positive")
    return value


def _floats(text):
    if text.startswith("logspace:"):
        try:
            lo, hi, k = text.split(":", 1)[1].split(",")
            return tuple(np.geomspace(float(lo), float(hi), int(k)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad logspace spec {text!r}")
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _add_common(sub):
    sub.add_argument("--config", default=None, help="key = value defaults file")
    sub.add_argument("--model", default="sphere",
                     choices=["gaussian", "sphere", "lognormal"])
    sub.add_argument("--dim", type=_ints, default=(3,),
                     help="comma-separated sample-space dimensions")
    sub.add_argument("--samples", type=_ints, default=(5000,),
                     help="comma-separated sample sizes N")
    sub.add_argument("--basis", type=_basis, default="dsqrtn",
                     help="comma-separated basis sizes M, or 'dsqrtn'")
    sub.add_argument("--kernel", default="gaussian", choices=["gaussian", "rq"])
    sub.add_argument("--sigma0", type=float, default=1.0)
    sub.add_argument("--bandwidth", type=_bandwidth, default=("fixed", 1.0),
                     help="fixed:<value>, meansq, or median")
    sub.add_argument("--rq-alpha", type=float, default=1.0)
    sub.add_argument("--eps", type=float, default=1e-5)
    sub.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sub.add_argument("--damping", default="ttildecols",
                     choices=["identity", "tcols", "ttildecols"])
    sub.add_argument("--clip", type=_clip, default=None, help="norm bound or 'off'")
    sub.add_argument("--runs", type=int, default=50)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None, help="CSV output path")
    sub.add_argument("--plot", default=None, help="SVG output path")
    sub.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = _Parser(prog="kwng", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name, txt in [
        ("sweep-n", "relative error as the sample size varies"),
        ("sweep-m", "relative error as the basis size varies"),
        ("sweep-d", "relative error as the dimension varies"),
        ("sweep-bandwidth", "relative error as the bandwidth varies"),
    ]:
        sub = subs.add_parser(name, help=txt)
        _add_common(sub)
        if name == "sweep-bandwidth":
            sub.add_argument("--sigmas", type=_floats,
                             default=tuple(np.geomspace(0.1, 10.0, 7)),
                             help="comma floats or logspace:<lo>,<hi>,<count>")

    sub = subs.add_parser("trajectory", help="descent trace comparison with PCA projection")
    _add_common(sub)
    sub.add_argument("--steps", type=int, default=200)
    sub.add_argument("--gamma-natural", type=float, default=0.1)
    sub.add_argument("--gamma-euclidean", type=float, default=1e-4)

    sub = subs.add_parser("invariance", help="reparametrization invariance check")
    _add_common(sub)
    sub.add_argument("--gammas", type=_floats, default=(1e-2, 5e-3, 2.5e-3))
    sub.add_argument("--cond", type=float, default=1e3)
    sub.add_argument("--horizon", type=float, default=1.0)
    sub.add_argument("--method", default="exact_wng",
                     choices=["exact_wng", "euclidean"])

    sub = subs.add_parser("selftest", help="run internal consistency suites")
    sub.add_argument("--config", default=None)
    sub.add_argument("--filter", dest="filter_name", default=None)
    return parser


def _load_config_tokens(argv):
    """Expand --config <file> into leading CLI tokens (flags still win)."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    tokens = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line (need key = value): {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            tokens += [f"--{key}", value]
    # insert after the subcommand so user-provided flags override
    return argv[:1] + tokens + argv[1:]


def _sweep_config(args):
    family_kwargs = dict(
        family=args.kernel, sigma0=args.sigma0, rq_alpha=args.rq_alpha,
        bandwidth=args.bandwidth[0], fixed_value=args.bandwidth[1],
    )
    return SweepConfig(
        model=args.model, dims=args.dim, samples=args.samples,
        basis_rule=args.basis, kernel=KernelSpec(**family_kwargs),
        epsilon=args.eps, lam=args.lam, damping=args.damping,
        clip_norm=args.clip, runs=args.runs, seed=args.seed,
        threads=args.threads,
    )


def _emit_sweep(args, records, axis):
    if args.out:
        write_records(args.out, records)
    if args.plot:
        key = {"N": "n", "M": "m", "d": "d", "sigma": "sigma0"}[axis]
        med = median_by(records, key)
        xs, ys = list(med.keys()), list(med.values())
        logx = axis != "d"
        svg = svgplot.line_chart(
            [("median", xs, ys)],
            xlabel=axis, ylabel="relative error",
            title=f"{args.model}: median relative error vs {axis}",
            logx=logx, logy=True,
        )
        svgplot.write_svg(args.plot, svg)
    for key, value in median_by(records, {"N": "n", "M": "m", "d": "d",
                                          "sigma": "sigma0"}[axis]).items():
        print(f"{axis}={key:g} median_rel_error={value:.6g}")


def _cmd_sweep(args, axis):
    cfg = _sweep_config(args)
    if axis == "sigma":
        records = run_bandwidth_sweep(cfg, args.sigmas)
    else:
        records = run_error_sweep(cfg)
    _emit_sweep(args, records, axis)
    return 0


def _cmd_trajectory(args):
    d = args.dim[0]
    gammas = {
        "exact_wng": args.gamma_natural,
        "kwng": args.gamma_natural,
        "euclidean": args.gamma_euclidean,
    }
    result = run_trajectory(
        d=d, steps=args.steps, seed=args.seed, gammas=gammas,
        n_samples=args.samples[0], n_basis=100 if args.basis == "dsqrtn" else args.basis[0],
        epsilon=args.eps, lam=args.lam, damping=args.damping,
        clip_norm=args.clip,
        kernel=KernelSpec(family=args.kernel, sigma0=args.sigma0,
                          rq_alpha=args.rq_alpha,
                          bandwidth=args.bandwidth[0],
                          fixed_value=args.bandwidth[1]),
    )
    if args.out:
        write_trajectory_csv(args.out, result)
    if args.plot:
        loss_chart = svgplot.line_chart(
            [(m, tr.iterations, tr.losses) for m, tr in result.traces.items()],
            xlabel="iteration", ylabel="loss",
            title="training loss per iteration", logy=True,
        )
        path_chart = svgplot.line_chart(
            [(m, proj[:, 0], proj[:, 1]) for m, proj in result.projections.items()],
            xlabel="pc1", ylabel="pc2",
            title="trajectories in the natural-gradient plane",
        )
        svgplot.write_svg(args.plot, compose_horizontal([loss_chart, path_chart]))
    for method, tr in result.traces.items():
        print(f"{method}: final loss {tr.final_loss:.6g} after {tr.iterations[-1]} steps")
    return 0


def _cmd_invariance(args):
    report = run_invariance(
        gammas=args.gammas, condition=args.cond, d=args.dim[0],
        horizon=args.horizon, seed=args.seed, method=args.method,
    )
    for g, dev in zip(report.gammas, report.deviations):
        print(f"gamma={g:g} max_deviation={dev:.6g}")
    for i, ratio in enumerate(report.ratios):
        print(f"halving ratio {report.gammas[i]:g} -> {report.gammas[i+1]:g}: {ratio:.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("gamma,max_deviation\n")
            for g, dev in zip(report.gammas, report.deviations):
                fh.write(f"{g:.17g},{dev:.17g}\n")
    return 0


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _load_config_tokens(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep-n":
            return _cmd_sweep(args, "N")
        if args.command == "sweep-m":
            return _cmd_sweep(args, "M")
        if args.command == "sweep-d":
            return _cmd_sweep(args, "d")
        if args.command == "sweep-bandwidth":
            return _cmd_sweep(args, "sigma")
        if args.command == "trajectory":
            return _cmd_trajectory(args)
        if args.command == "invariance":
            return _cmd_invariance(args)
        if args.command == "selftest":
            return run_selftest(args.filter_name)
    except (KwngError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
