"""
Command-line front end.

Exit codes: 0 success, 1 failed self-test, 2 argument/domain/window error,
3 numeric failure (enumeration budget or solver bracket).
"""

from __future__ import annotations

import argparse
import io
import math
import sys

from . import bsc, exact, exponents, montecarlo
from .errors import BudgetError, DomainError, NumericFailure
from .exponents import LN2, Direction, SumSpec, TailQuery
from .records import OutputRecord, format_real

TRAJECTORY_HEADER = "k,mean_pi_true,mean_log_odds"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DomainError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="FILE", help="write the record here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="statsum", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exponent", help="theorem bounds and the numeric Chernoff bound")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--direction", choices=("upper", "lower"), default="upper")
    p.add_argument("--method", choices=("analytic", "chernoff", "both"), default="both")
    _common(p)

    p = sub.add_parser("tail", help="exact or Monte Carlo tail probability")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--direction", choices=("upper", "lower"), default="upper")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int)
    p.add_argument("--chunk-size", type=int, default=4096)
    _common(p)

    p = sub.add_parser("concentration", help="empirical check of the concentration threshold")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _common(p)

    p = sub.add_parser("rates", help="capacity, sphere-packing and tangent solvers")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--R", type=float)
    p.add_argument("--E0", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--bits", action="store_true", help="interpret --R in bits per symbol")
    _common(p)

    p = sub.add_parser("feedback-sim", help="random-coding posterior simulation over BSC(p)")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bits", action="store_true", help="interpret --R in bits per symbol")
    p.add_argument("--traj-out", metavar="FILE", help="write the per-step trajectory CSV here")
    _common(p)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--all", action="store_true", help="include the slow Monte Carlo criteria")
    _common(p)
    return parser


# ============================================================================

def _query(args) -> TailQuery:
    return TailQuery(SumSpec(args.z, args.M, args.n), args.A, Direction(args.direction))


def cmd_exponent(args) -> OutputRecord:
    q = _query(args)
    q.spec.require_nondegenerate()
    out = {}
    if args.method in ("analytic", "both"):
        below = q.spec.z < 1.0
        # the bound functions check the window first, so their message names it
        if q.direction is Direction.UPPER:
            sw = (exponents.thm1_upper_tail_sandwich if below else exponents.thm2_upper_tail_sandwich)(q)
            bounds = dict(lower=sw.lower, upper=sw.upper, center=sw.center)
        else:
            fn = exponents.thm1_lower_tail_bound if below else exponents.thm2_lower_tail_bound
            bounds = dict(upper=fn(q))
        out["a_star"] = exponents.entropy_argument(q)
        out.update(bounds)
        if below:
            out["stationary_lambda"] = exponents.stationary_lambda(q)
        threshold, log_bound = exponents.corollary1_bound(q.spec)
        out.update(corollary1_threshold=threshold, corollary1_log_bound=log_bound)
    if args.method in ("chernoff", "both"):
        curve = exponents.chernoff_numeric(q)
        out.update(lambda_star=curve.lambda_star, chernoff_value=curve.value,
                   chernoff_a=curve.a_at_optimum)
    inputs = dict(z=q.spec.z, n=q.spec.n, A=q.A, M=q.spec.M, direction=q.direction.value,
                  method=args.method)
    return OutputRecord("exponent", inputs, out)


def cmd_tail(args) -> OutputRecord:
    q = _query(args)
    inputs = dict(z=q.spec.z, M=q.spec.M, n=q.spec.n, A=q.A, direction=q.direction.value,
                  mode=args.mode)
    if args.mode == "exact":
        return OutputRecord("tail", inputs, {"log_probability": exact.exact_tail(q)})
    if args.seed is None:
        raise DomainError("--mode mc requires --seed")
    cfg = montecarlo.McConfig(args.seed, args.trials, args.chunk_size)
    est = montecarlo.estimate_tail(q, cfg)
    inputs.update(trials=cfg.trials, seed=cfg.seed, chunk_size=cfg.chunk_size)
    out = dict(point=est.point, stderr=est.stderr, log_point=est.log_point)
    if est.note:
        out["note"] = est.note
    return OutputRecord("tail", inputs, out)


def cmd_concentration(args) -> OutputRecord:
    spec = SumSpec(args.z, args.M, args.n)
    res = montecarlo.concentration_experiment(spec, args.runs, montecarlo.McConfig(args.seed, args.runs))
    inputs = dict(z=spec.z, M=spec.M, n=spec.n, runs=args.runs, seed=args.seed)
    out = dict(violations=res.violations, threshold=res.threshold, bound_log=res.bound_log,
               max_abs_deviation=res.max_abs_deviation)
    return OutputRecord("concentration", inputs, out)


def cmd_rates(args) -> OutputRecord:
    ch = bsc.ChannelParams(args.p)
    inputs = {"p": ch.p}
    out = {"capacity": bsc.capacity(ch)}
    R = None
    if args.R is not None:
        R = args.R * LN2 if args.bits else args.R
        inputs.update(R=args.R, bits=bool(args.bits))
        sol = bsc.sphere_packing(R, ch)
        out.update(rho=sol.rho, E_sp=sol.E_sp, rate_residual=sol.residual)
        if 0.0 < R < out["capacity"]:
            out["z1"] = bsc.z1_of_rate(R, ch)
        if args.c is not None:
            inputs["c"] = args.c
            out["odds_tail_exponent"] = bsc.odds_tail_exponent(ch, R, args.c)
    if args.E0 is not None:
        inputs["E0"] = args.E0
        t = bsc.critical_tangent(ch, args.E0)
        out.update(lambda0=t.lambda0, R_crit=t.R_crit, rho_crit=t.rho_crit,
                   tangent_residual=t.residual)
        if R is not None:
            out["F_upper"] = bsc.f_upper_bound(R, ch, args.E0, t)
    r1 = bsc.rho1_matching(ch)
    out["rho1"] = r1.rho1 if r1.exists else "none"
    if r1.exists:
        out["rho1_residual"] = r1.residual
    return OutputRecord("rates", inputs, out)


def trajectory_csv(summary: bsc.FeedbackSummary) -> str:
    buf = io.StringIO()
    buf.write(TRAJECTORY_HEADER + "\n")
    for k, (pi, lo) in enumerate(zip(summary.mean_pi_true, summary.mean_log_odds)):
        buf.write(f"{k},{format_real(pi)},{format_real(lo)}\n")
    return buf.getvalue()


def cmd_feedback_sim(args) -> tuple[OutputRecord, str]:
    ch = bsc.ChannelParams(args.p)
    setup = bsc.CodeSetup.from_bits(args.n, args.R) if args.bits else bsc.CodeSetup(args.n, args.R)
    summary = bsc.simulate_feedback(setup, ch, args.trials, args.seed)
    inputs = dict(p=ch.p, R=args.R, bits=bool(args.bits), n=setup.n, M=setup.M,
                  trials=args.trials, seed=args.seed)
    out = dict(error_rate=summary.error_rate, errors=summary.errors,
               empirical_exponent=bsc.empirical_exponent(summary.error_rate, setup.n),
               final_mean_pi_true=float(summary.mean_pi_true[-1]),
               max_normalization_error=summary.max_norm_dev)
    return OutputRecord("feedback-sim", inputs, out), trajectory_csv(summary)


def cmd_selftest(args, echo=print) -> OutputRecord:
    from .acceptance import run_all

    results = run_all(fast_only=not args.all, echo=echo)
    out = {f"C{r.number}": ("pass" if r.passed else "fail") for r in results}
    out["passed"] = sum(r.passed for r in results)
    out["failed"] = sum(not r.passed for r in results)
    return OutputRecord("selftest", {"all": bool(args.all)}, out)


# ============================================================================

def _dispatch(args):
    trajectory = None
    if args.command == "exponent":
        rec = cmd_exponent(args)
    elif args.command == "tail":
        rec = cmd_tail(args)
    elif args.command == "concentration":
        rec = cmd_concentration(args)
    elif args.command == "rates":
        rec = cmd_rates(args)
    elif args.command == "feedback-sim":
        rec, trajectory = cmd_feedback_sim(args)
    else:
        rec = cmd_selftest(args, echo=lambda line: print(line, file=sys.stderr))
    return rec, trajectory


def execute(argv: list[str]) -> str:
    """Run one command and return the rendered record; library errors propagate."""
    args = build_parser().parse_args(argv)
    rec, _ = _dispatch(args)
    return rec.render(args.format)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        rec, trajectory = _dispatch(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, NumericFailure) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    text = rec.render(args.format)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if trajectory is not None and args.traj_out:
        _write(args.traj_out, trajectory)
    if args.command == "selftest" and rec.outputs["failed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
