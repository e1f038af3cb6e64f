"""Command-line front door.

One binary with subcommand dispatch; every number is computed by the
library, so this module only parses arguments, routes, and formats.

Exit codes: 0 success, 1 usage error, 2 domain or parameter error,
3 verification failure, 4 internal-consistency error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from datetime import datetime, timezone
from decimal import Decimal, localcontext
from fractions import Fraction
from importlib import metadata

import numpy as np

from .betarec import beta_purity_moments
from .density import (
    certify_matrix_ode_flue,
    certify_matrix_ode_lue,
    certify_ode_flue,
    certify_ode_mp,
    certify_ode_u2,
    density_csv,
    flue_density_from_lue,
    lue_density,
    mp_density,
    mp_support,
)
from .errors import (
    ConventionError,
    ConvergenceError,
    DomainError,
    InternalConsistencyError,
    ParameterError,
    SingularMatrixError,
    TruncationError,
    VerificationFailure,
)
from .moments import (
    EnsembleParams,
    flue_moment_recurrence,
    flue_Tq_mean_3f2,
    flue_Tq_mean_narayana,
    flue_Tq_moment_table,
)
from .painleve import flue_purity_cumulants, piv_lue_cumulants
from .sampling import (
    ALGORITHM_ID,
    SHARD_SIZE,
    batch_csv,
    estimate_linear_statistic,
    histogram_csv,
    kernels,
    normalized_purity_statistic,
    power_sum_statistic,
    purity_statistic,
    RngSpec,
    sample_beta_laguerre,
    sample_flue,
    sample_lue,
    sample_sun,
    trace_power_abs2_statistic,
    trace_power_statistic,
)
from .suncorr import (
    bulk_residual_csv,
    correlation_csv,
    covariance_linear_stats,
    rho1_sun,
)
from .verification import available_checks, run_suite

__all__ = ["main"]

SEED_ENV_VAR = "FTLAGUERRE_SEED"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as exit code 1."""

    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# small formatting helpers
# ---------------------------------------------------------------------------

def _version() -> str:
    try:
        return metadata.version("ftlaguerre")
    except metadata.PackageNotFoundError:  # running from a source tree
        return "unpackaged"


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not a rational number: {text!r}") from exc


def _decimal_str(value: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 10
        d = Decimal(value.numerator) / Decimal(value.denominator)
        return str(d.quantize(Decimal(1).scaleb(-digits)))


def _rational_entry(value: Fraction, digits: int) -> dict[str, str]:
    return {"rational": str(value), "decimal": _decimal_str(value, digits)}


def _document(command: str, parameters: dict, payload: dict) -> str:
    doc = {
        "tool": "ftlaguerre",
        "version": _version(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "parameters": parameters,
        **payload,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _certificate_json(cert) -> dict:
    out = {"label": cert.label, "ok": bool(cert)}
    if not cert:
        out["witness"] = str(cert.witness)
    return out


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_moments(args) -> int:
    p = EnsembleParams(N=args.N, a=_rational(args.a))
    if args.route == "sum":
        table = flue_Tq_moment_table(p, args.q, args.kmax)
        entries = {k: table.moment(k) for k in table.orders}
        route = table.route
    else:
        if args.kmax != 1:
            raise _UsageError(
                f"route {args.route!r} provides only the first moment; "
                "use --kmax 1 or the default route"
            )
        if args.route == "3f2":
            mean = flue_Tq_mean_3f2(p, args.q)
            route = "terminating-3f2"
        elif args.route == "narayana":
            mean = flue_Tq_mean_narayana(p, args.q)
            route = "narayana-sum"
        else:  # recurrence: read <T_q> off the spectral-moment ladder
            mean = flue_moment_recurrence(p, args.q).moment(args.q)
            route = "three-term-recurrence"
        entries = {1: mean}
    payload = {
        "ensemble": "fLUE",
        "statistic": f"T{args.q}",
        "route": route,
        "moments": {
            str(k): _rational_entry(v, args.digits) for k, v in entries.items()
        },
    }
    params = {
        "N": args.N,
        "a": str(p.a),
        "tau": str(p.tau),
        "q": args.q,
        "kmax": args.kmax,
        "digits": args.digits,
    }
    sys.stdout.write(_document("moments", params, payload))
    return 0


def _cmd_cumulants(args) -> int:
    p = EnsembleParams(N=args.N, a=_rational(args.a))
    if args.ensemble == "lue":
        kappas = piv_lue_cumulants(p, args.nmax)
    else:
        kappas = flue_purity_cumulants(p, args.nmax)
    payload = {
        "ensemble": args.ensemble.upper().replace("FLUE", "fLUE"),
        "statistic": "T2",
        "route": "sigma-equation-series",
        "cumulants": {
            str(i + 1): _rational_entry(k, args.digits)
            for i, k in enumerate(kappas)
        },
    }
    params = {
        "N": args.N,
        "a": str(p.a),
        "nmax": args.nmax,
        "ensemble": args.ensemble,
        "digits": args.digits,
    }
    sys.stdout.write(_document("cumulants", params, payload))
    return 0


def _cmd_beta_moments(args) -> int:
    p = EnsembleParams(N=args.N, a=_rational(args.a), tau=_rational(args.tau))
    table = beta_purity_moments(p, args.qmax, fixed_trace=args.fixed_trace)
    payload = {
        "ensemble": table.ensemble,
        "statistic": table.statistic,
        "route": table.route,
        "moments": {
            str(k): _rational_entry(table.moment(k), args.digits)
            for k in table.orders
        },
    }
    params = {
        "N": args.N,
        "a": str(p.a),
        "tau": str(p.tau),
        "beta": str(2 * p.tau),
        "qmax": args.qmax,
        "fixed_trace": args.fixed_trace,
        "digits": args.digits,
    }
    sys.stdout.write(_document("beta-moments", params, payload))
    return 0


def _float_csv(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def _cmd_density(args) -> int:
    if args.ensemble == "mp":
        if args.alpha is None:
            raise _UsageError("--ensemble mp requires --alpha")
        alpha = _rational(args.alpha)
        lo, hi = mp_support(alpha)
        ys = [lo + (hi - lo) * j / args.grid for j in range(args.grid + 1)]
        csv_text = _float_csv(
            "y,rho", ((y, mp_density(alpha, y)) for y in ys)
        )
        certificates = [certify_ode_mp(alpha)] if args.certify else []
        params = {"ensemble": "mp", "alpha": str(alpha), "grid": args.grid}
    else:
        if args.N is None or args.a is None:
            raise _UsageError(f"--ensemble {args.ensemble} requires --N and --a")
        p = EnsembleParams(N=args.N, a=_rational(args.a))
        d = lue_density(p)
        params = {
            "ensemble": args.ensemble,
            "N": args.N,
            "a": str(p.a),
            "grid": args.grid,
        }
        if args.ensemble == "lue":
            xmax = 2 * (2 * p.N + math.ceil(p.a))  # above the spectral edge
            grid = [Fraction(j * xmax, args.grid) for j in range(args.grid + 1)]
            csv_text = density_csv(d, grid, args.digits)
            certificates = (
                [certify_ode_u2(d), certify_matrix_ode_lue(d)]
                if args.certify
                else []
            )
        else:
            fd = flue_density_from_lue(d)
            grid = [Fraction(j, args.grid) for j in range(args.grid + 1)]
            csv_text = density_csv(fd, grid, args.digits)
            certificates = (
                [certify_ode_flue(fd), certify_matrix_ode_flue(fd)]
                if args.certify
                else []
            )
    if args.certify:
        payload = {
            "certificates": [_certificate_json(c) for c in certificates],
            "all_certified": all(bool(c) for c in certificates),
        }
        sys.stdout.write(_document("density", params, payload))
        if args.csv is not None:
            _emit(csv_text, args.csv)
        return 0 if payload["all_certified"] else 3
    _emit(csv_text, args.csv)
    return 0


_STAT_FORMS = re.compile(
    r"^(?:T(?P<q>\d+)|(?P<purity>purity)|(?P<npurity>normalized-purity)"
    r"|(?P<re>ReTrU)(?P<rp>\d+)|(?P<im>ImTrU)(?P<ip>\d+)"
    r"|(?P<abs>AbsTrU)(?P<ap>\d+)Sq)$"
)


def _parse_statistic(name: str, ensemble: str):
    m = _STAT_FORMS.match(name)
    if m is None:
        raise ParameterError(
            f"unknown statistic {name!r}; use T<q>, purity, "
            "normalized-purity, ReTrU<p>, ImTrU<p>, or AbsTrU<p>Sq"
        )
    circular = ensemble == "sun"
    if m.group("q") is not None:
        stat, ok = power_sum_statistic(int(m.group("q"))), not circular
    elif m.group("purity"):
        stat, ok = purity_statistic(), not circular
    elif m.group("npurity"):
        stat, ok = normalized_purity_statistic(), not circular
    elif m.group("re"):
        stat, ok = trace_power_statistic(int(m.group("rp")), "re"), circular
    elif m.group("im"):
        stat, ok = trace_power_statistic(int(m.group("ip")), "im"), circular
    else:
        stat, ok = trace_power_abs2_statistic(int(m.group("ap"))), circular
    if not ok:
        raise ParameterError(
            f"statistic {name!r} does not apply to ensemble {ensemble!r}"
        )
    return stat


def _cmd_mc(args) -> int:
    if args.seed is not None:
        seed, seed_source = args.seed, "flag"
    elif SEED_ENV_VAR in os.environ:
        raw = os.environ[SEED_ENV_VAR]
        try:
            seed = int(raw)
        except ValueError as exc:
            raise ParameterError(
                f"{SEED_ENV_VAR} must be an integer, got {raw!r}"
            ) from exc
        seed_source = "env"
    else:
        seed, seed_source = 0, "default"
    spec = RngSpec(seed=seed)

    if args.ensemble == "sun":
        for flag, name in ((args.a, "--a"), (args.beta, "--beta")):
            if flag is not None:
                raise _UsageError(f"{name} does not apply to --ensemble sun")
        if args.fixed_trace:
            raise _UsageError("--fixed-trace does not apply to --ensemble sun")
        batch = sample_sun(args.N, args.draws, spec, jobs=args.jobs)
        default_stat = "ReTrU1"
    else:
        a = _rational(args.a) if args.a is not None else Fraction(0)
        beta = _rational(args.beta) if args.beta is not None else Fraction(2)
        if args.ensemble in ("lue", "flue"):
            if beta != 2:
                raise _UsageError(
                    f"--ensemble {args.ensemble} is the beta = 2 class; "
                    "use --ensemble beta for other values"
                )
            if args.fixed_trace:
                raise _UsageError(
                    "--fixed-trace applies to --ensemble beta only; "
                    "flue is already trace-normalized"
                )
            p = EnsembleParams(N=args.N, a=a)
            sampler = sample_lue if args.ensemble == "lue" else sample_flue
            batch = sampler(p, args.draws, spec, jobs=args.jobs)
        else:
            p = EnsembleParams(N=args.N, a=a, tau=beta / 2)
            batch = sample_beta_laguerre(
                p, args.draws, spec, jobs=args.jobs, fixed_trace=args.fixed_trace
            )
        default_stat = "purity"

    stat_name = args.statistic if args.statistic is not None else default_stat
    stat = _parse_statistic(stat_name, args.ensemble)
    result = estimate_linear_statistic(batch, stat)

    if args.csv is not None:
        if args.hist is not None:
            if args.hist_eigenvalues:
                values = batch.draws.ravel()
                hist_of = "eigenvalues"
            else:
                values = stat.values(batch)
                hist_of = stat.name
            lo, hi = float(values.min()), float(values.max())
            if lo == hi:  # keep the single occupied bin well-defined
                lo, hi = lo - 0.5, hi + 0.5
            edges = np.linspace(lo, hi, args.hist + 1)
            meta = dict(batch.params)
            meta.update(
                ensemble=batch.ensemble, seed=str(seed), histogram_of=hist_of
            )
            _emit(histogram_csv(values, edges, meta), args.csv)
        else:
            _emit(batch_csv(batch), args.csv)
    elif args.hist is not None:
        raise _UsageError("--hist requires --csv PATH for the table")

    params = {
        "ensemble": args.ensemble,
        "N": args.N,
        "draws": args.draws,
        "jobs": args.jobs,
        "statistic": stat.name,
        **{k: v for k, v in batch.params.items() if k not in ("N",)},
    }
    payload = {
        "seed": seed,
        "seed_source": seed_source,
        "algorithm": ALGORITHM_ID,
        "shard_size": SHARD_SIZE,
        "kernels": "numba" if kernels.NUMBA_ENABLED else "numpy-fallback",
        "rejected": batch.rejected,
        "estimate": {
            "statistic": result.statistic,
            "mean": result.mean,
            "stderr": result.stderr,
            "count": result.count,
        },
    }
    sys.stdout.write(_document("mc", params, payload))
    return 0


def _parse_modes(text: str) -> dict[int, complex]:
    """JSON object {mode: coefficient}, coefficient a number or [re, im]."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"mode map is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParameterError("mode map must be a JSON object")
    modes: dict[int, complex] = {}
    for key, val in raw.items():
        try:
            mode = int(key)
        except ValueError as exc:
            raise ParameterError(f"mode {key!r} is not an integer") from exc
        if isinstance(val, (int, float)):
            modes[mode] = complex(val)
        elif (
            isinstance(val, list)
            and len(val) == 2
            and all(isinstance(x, (int, float)) for x in val)
        ):
            modes[mode] = complex(val[0], val[1])
        else:
            raise ParameterError(
                f"coefficient for mode {key} must be a number or [re, im]"
            )
    return modes


def _parse_stat_modes(text: str) -> dict[int, complex]:
    """Shorthand retr:<p> / imtr:<p> for the real/imaginary trace powers."""
    m = re.match(r"^(retr|imtr):(\d+)$", text)
    if m is None:
        raise ParameterError(
            f"unknown statistic shorthand {text!r}; use retr:<p> or imtr:<p>"
        )
    p = int(m.group(2))
    if m.group(1) == "retr":
        return {p: 0.5 + 0j, -p: 0.5 + 0j}
    return {p: -0.5j, -p: 0.5j}


def _cmd_sun(args) -> int:
    if args.rho1:
        thetas = [-math.pi + 2 * math.pi * j / args.grid for j in range(args.grid)]
        text = f"# N={args.N}\n" + _float_csv(
            "theta,rho1", ((t, rho1_sun(args.N, t)) for t in thetas)
        )
        _emit(text, args.csv)
        return 0
    if args.rho2:
        thetas = [-math.pi + 2 * math.pi * j / args.grid for j in range(args.grid)]
        _emit(correlation_csv(args.N, thetas, thetas), args.csv)
        return 0
    if args.bulk:
        xs = [(j + 1) / (args.grid + 1) for j in range(args.grid)]
        _emit(bulk_residual_csv(args.N, xs, xs), args.csv)
        return 0
    # covariance of two linear eigenphase statistics
    def pick(stat_text, modes_text, label):
        if (stat_text is None) == (modes_text is None):
            raise _UsageError(
                f"--cov needs exactly one of --{label}-stat or --{label}-modes"
            )
        if stat_text is not None:
            return _parse_stat_modes(stat_text)
        return _parse_modes(modes_text)

    f_modes = pick(args.f_stat, args.f_modes, "f")
    g_modes = pick(args.g_stat, args.g_modes, "g")
    value = covariance_linear_stats(args.N, f_modes, g_modes)
    params = {
        "N": args.N,
        "f": args.f_stat or args.f_modes,
        "g": args.g_stat or args.g_modes,
    }
    sys.stdout.write(_document("sun", params, {"covariance": value}))
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    for r in results:
        sys.stdout.write(r.line + "\n")
    passed = sum(r.passed for r in results)
    total_time = sum(r.seconds for r in results)
    sys.stdout.write(
        f"{passed}/{len(results)} checks passed in {total_time:.1f}s "
        f"(suite: {args.suite})\n"
    )
    return 0 if passed == len(results) else 3


# ---------------------------------------------------------------------------
# parser assembly and dispatch
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(
        prog="ftlaguerre",
        description=(
            "Exact moments, cumulants, spectral densities and correlation "
            "functions for fixed-trace Laguerre ensembles, their beta "
            "generalisations, and SU(N), with seeded Monte Carlo."
        ),
    )
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser(
        "moments", help="power moments of the linear statistic T_q"
    )
    m.add_argument("--N", type=int, required=True, help="matrix dimension")
    m.add_argument("--a", required=True, help="Laguerre exponent (rational)")
    m.add_argument("--q", type=int, required=True, help="statistic power")
    m.add_argument("--kmax", type=int, default=1, help="highest moment order")
    m.add_argument(
        "--route",
        choices=("sum", "3f2", "narayana", "recurrence"),
        default="sum",
        help="computation route (the last three give the mean only)",
    )
    m.add_argument("--digits", type=int, default=12)
    m.set_defaults(fn=_cmd_moments)

    c = sub.add_parser("cumulants", help="purity cumulants via the series route")
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--a", required=True)
    c.add_argument("--nmax", type=int, default=3)
    c.add_argument("--ensemble", choices=("lue", "flue"), default="flue")
    c.add_argument("--digits", type=int, default=12)
    c.set_defaults(fn=_cmd_cumulants)

    b = sub.add_parser(
        "beta-moments", help="purity moments for general Dyson index"
    )
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--a", required=True)
    b.add_argument("--tau", default="1", help="half the Dyson index (rational)")
    b.add_argument("--qmax", type=int, default=2)
    b.add_argument("--fixed-trace", action="store_true")
    b.add_argument("--digits", type=int, default=12)
    b.set_defaults(fn=_cmd_beta_moments)

    d = sub.add_parser("density", help="spectral density on a grid")
    d.add_argument("--N", type=int)
    d.add_argument("--a")
    d.add_argument("--ensemble", choices=("lue", "flue", "mp"), default="flue")
    d.add_argument("--alpha", help="shape parameter for the limit law")
    d.add_argument("--grid", type=int, default=64, help="number of intervals")
    d.add_argument("--digits", type=int, default=12)
    d.add_argument(
        "--certify",
        action="store_true",
        help="emit a JSON differential-equation certification report",
    )
    d.add_argument("--csv", help="write the grid CSV to this file")
    d.set_defaults(fn=_cmd_density)

    mc = sub.add_parser("mc", help="seeded Monte Carlo estimation")
    mc.add_argument(
        "--ensemble", choices=("lue", "flue", "beta", "sun"), required=True
    )
    mc.add_argument("--N", type=int, required=True)
    mc.add_argument("--a")
    mc.add_argument("--beta", help="Dyson index (rational, beta ensemble)")
    mc.add_argument("--fixed-trace", action="store_true")
    mc.add_argument("--draws", type=int, required=True)
    mc.add_argument(
        "--seed",
        type=int,
        help=f"RNG seed (default: ${SEED_ENV_VAR}, then 0)",
    )
    mc.add_argument("--jobs", type=int, default=1)
    mc.add_argument("--statistic", help="T<q>, purity, ReTrU<p>, ...")
    mc.add_argument("--hist", type=int, help="histogram bin count for --csv")
    mc.add_argument(
        "--hist-eigenvalues",
        action="store_true",
        help="histogram pooled eigenvalues instead of the statistic",
    )
    mc.add_argument("--csv", help="write draws (or histogram) to this file")
    mc.set_defaults(fn=_cmd_mc)

    s = sub.add_parser("sun", help="circular-ensemble correlation functions")
    s.add_argument("--N", type=int, required=True)
    what = s.add_mutually_exclusive_group(required=True)
    what.add_argument("--rho1", action="store_true", help="one-point density")
    what.add_argument("--rho2", action="store_true", help="two-point grid")
    what.add_argument(
        "--bulk", action="store_true", help="bulk-scaled remainder grid"
    )
    what.add_argument(
        "--cov", action="store_true", help="covariance of two linear statistics"
    )
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--f-stat", help="first statistic, retr:<p> or imtr:<p>")
    s.add_argument("--g-stat", help="second statistic, retr:<p> or imtr:<p>")
    s.add_argument("--f-modes", help='first statistic as JSON {"p": [re, im]}')
    s.add_argument("--g-modes", help='second statistic as JSON {"p": [re, im]}')
    s.add_argument("--csv", help="write grid output to this file")
    s.set_defaults(fn=_cmd_sun)

    v = sub.add_parser("verify", help="run the cross-route verification suite")
    v.add_argument("--suite", choices=("quick", "full"), default="quick")
    v.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except DomainError as exc:  # includes parameter and pole errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3
    except (
        InternalConsistencyError,
        ConventionError,
        ConvergenceError,
        SingularMatrixError,
        TruncationError,
    ) as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
