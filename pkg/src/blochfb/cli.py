"""Command-line front end: closed forms, trajectories, sweeps, CSV output.

Every emitted file starts with comment-prefixed ``# key=value`` header lines
carrying the fully resolved configuration (schema version, rounded delay,
seed, ...), so the header alone suffices to re-run the job.  Angles are
radians unless ``--degrees`` is given.  Exit codes: 0 success, 1 usage
error, 2 numerical-domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from .bloch import BlochVector
from .errors import BlochFBError, OutOfValidityError
from .markov import AtomParams, drift_steady_state, feedback_gains
from .sde import round_tau
from .spectral import (
    SpectralParams,
    analytic_purity,
    delta_theta_variance,
    stability_threshold,
)
from .trajectory import SimConfig, simulate_ensemble, simulate_trajectory

SCHEMA = 1

#: Relative tau-rounding tolerance before the job is refused.
TAU_ROUND_LIMIT = 0.01


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; the contract wants 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p: _Parser):
    p.add_argument("--config", help="flat key=value file; flags override its values")
    p.add_argument("--gamma", type=float, default=1.0, help="decay rate (default 1)")
    p.add_argument("--degrees", action="store_true",
                   help="interpret angle inputs as degrees")
    p.add_argument("--deterministic", action="store_true",
                   help="suppress the timestamp header line")


def build_parser() -> _Parser:
    root = _Parser(prog="blochfb", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", help="driven-atom stationary state")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=0.0, help="driving amplitude")

    p = sub.add_parser("gains", help="feedback design for a target angle")
    _add_common(p)
    p.add_argument("--theta0", type=float, required=True, help="target Bloch angle")

    p = sub.add_parser("trajectory", help="single conditioned trajectory to CSV")
    _add_common(p)
    p.add_argument("--mode", choices=("bloch3d", "theta", "equator"), default="theta")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.0, help="feedback delay")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--initial", default=None,
                   help="starting state as 'x,y,z' (default: ground state)")
    p.add_argument("--thin", type=int, default=1, help="write every Nth step")
    p.add_argument("--out", required=True, help="output CSV path ('-' for stdout)")

    p = sub.add_parser("locus", help="time-averaged state vs target angle")
    _add_common(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--theta0-grid", type=int, default=16,
                   help="number of evenly spaced target angles")
    p.add_argument("--t-sim", type=float, default=1000.0,
                   help="averaging window per point (after burn-in)")
    p.add_argument("--burn-in", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("purity-scan", help="purity vs delay at one target angle")
    _add_common(p)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--tau-grid", required=True,
                   help="comma-separated delays, e.g. 0.02,0.05,0.1")
    p.add_argument("--t-sim", type=float, default=1000.0)
    p.add_argument("--burn-in", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("spectral", help="angle variance quadrature and threshold")
    _add_common(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--n-points", type=int, default=None)

    return root


def _load_config_defaults(parser: _Parser, argv: list[str]) -> list[str]:
    """Apply --config key=value pairs as subcommand defaults; flags still win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    path = argv[i + 1]
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}")
    extra: list[str] = []
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise UsageError(f"config line is not key=value: {ln!r}")
        key, value = ln.split("=", 1)
        key = key.strip().replace("_", "-")
        if key in ("command", "schema", "created") or key.startswith("result-"):
            continue
        extra.extend([f"--{key}", value.strip()])
    # Config-provided values go first so explicit flags override them.
    if argv and not argv[0].startswith("-"):
        return [argv[0]] + extra + argv[1:]
    return extra + argv


def _resolve_tau(tau: float, dt: float) -> tuple[int, float]:
    capacity, tau_r = round_tau(tau, dt)
    if tau > 0.0:
        rel = abs(tau_r - tau) / tau
        if rel > TAU_ROUND_LIMIT:
            raise BlochFBError(
                f"tau = {tau} rounds to {tau_r} ({100 * rel:.1f}% change, "
                f"limit {100 * TAU_ROUND_LIMIT:.0f}%); choose tau a multiple of dt"
            )
        if tau_r != tau:
            print(f"note: tau rounded to {tau_r!r} ({capacity} steps)", file=sys.stderr)
    return capacity, tau_r


def _angle(value: float, degrees: bool) -> float:
    return math.radians(value) if degrees else value


def _header_lines(command: str, params: dict, deterministic: bool) -> list[str]:
    lines = [f"# schema={SCHEMA}", f"# command={command}"]
    for key, value in params.items():
        if isinstance(value, float):
            lines.append(f"# {key}={value:.17g}")
        else:
            lines.append(f"# {key}={value}")
    if not deterministic:
        lines.append(f"# created={time.strftime('%Y-%m-%dT%H:%M:%S')}")
    return lines


def _write_csv(out: str, header: list[str], columns: list[str], rows) -> None:
    text = "\n".join(header) + "\n" + ",".join(columns) + "\n"
    body = "\n".join(",".join(f"{v:.12g}" for v in row) for row in rows)
    text += body + ("\n" if body else "")
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _parse_initial(spec: str | None) -> BlochVector | None:
    if spec is None:
        return None
    parts = spec.split(",")
    if len(parts) != 3:
        raise UsageError(f"--initial needs 'x,y,z', got {spec!r}")
    x, y, z = (float(p) for p in parts)
    return BlochVector(x, y, z)


def _cmd_steady_state(args) -> int:
    v = drift_steady_state(AtomParams(gamma=args.gamma, alpha=args.alpha))
    # + 0.0 normalizes the negative zero at alpha = 0
    print(f"{v.x + 0.0:.10g} {v.y + 0.0:.10g} {v.z + 0.0:.10g}")
    return 0


def _cmd_gains(args) -> int:
    theta0 = _angle(args.theta0, args.degrees)
    g = feedback_gains(theta0, args.gamma)
    suffix = " [unstable-equator]" if g.equatorial else ""
    print(f"lambda={g.lam:.10g} alpha={g.alpha:.10g}{suffix}")
    return 0


def _cmd_trajectory(args) -> int:
    theta0 = _angle(args.theta0, args.degrees)
    _, tau = _resolve_tau(args.tau, args.dt)
    initial = _parse_initial(args.initial)
    if initial is None and args.mode == "equator" and tau == 0.0:
        initial = BlochVector(0.0, 0.0, 0.0)
    kwargs = {} if initial is None else {"initial_state": initial}
    cfg = SimConfig(gamma=args.gamma, theta0=theta0, tau=tau, dt=args.dt,
                    t_end=args.t_end, burn_in=0.0, seed=args.seed,
                    mode=args.mode, **kwargs)
    rec = simulate_trajectory(cfg)
    if args.thin < 1:
        raise UsageError("--thin must be >= 1")
    sl = slice(None, None, args.thin)
    theta = np.unwrap(rec.theta)[sl]
    states = rec.states[sl]
    r = np.sqrt((states**2).sum(axis=1))
    rows = np.column_stack((rec.times[sl], theta, states, r))
    header = _header_lines("trajectory", {
        "mode": cfg.mode, "gamma": cfg.gamma, "theta0": cfg.theta0,
        "tau": cfg.tau, "dt": cfg.dt, "t_end": cfg.t_end, "seed": cfg.seed,
        "initial": f"{cfg.initial_state.x},{cfg.initial_state.y},{cfg.initial_state.z}",
        "thin": args.thin, "result_guard_renorms": rec.guard_renorms,
    }, args.deterministic)
    _write_csv(args.out, header, ["t", "theta", "x", "y", "z", "r"], rows)
    return 0


def _cmd_locus(args) -> int:
    n = args.theta0_grid
    if n < 1:
        raise UsageError("--theta0-grid must be >= 1")
    _, tau = _resolve_tau(args.tau, args.dt)
    grid = [-math.pi + 2.0 * math.pi * (j + 1) / n for j in range(n)]
    n_eff = args.gamma * args.t_sim
    rows = []
    for j, theta0 in enumerate(grid):
        cfg = SimConfig(gamma=args.gamma, theta0=theta0, tau=tau, dt=args.dt,
                        t_end=args.burn_in + args.t_sim, burn_in=args.burn_in,
                        seed=args.seed, mode="theta")
        est = simulate_ensemble(cfg, n_traj=1, stream_offset=j)
        rows.append((theta0, est.mean.x, est.mean.z, est.purity, est.purity_err, n_eff))
    header = _header_lines("locus", {
        "gamma": args.gamma, "tau": tau, "theta0_grid": n, "t_sim": args.t_sim,
        "burn_in": args.burn_in, "dt": args.dt, "seed": args.seed,
    }, args.deterministic)
    _write_csv(args.out, header,
               ["theta0", "x_avg", "z_avg", "purity", "purity_err", "n_eff"], rows)
    return 0


def _cmd_purity_scan(args) -> int:
    theta0 = _angle(args.theta0, args.degrees)
    try:
        taus = [float(t) for t in args.tau_grid.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --tau-grid: {args.tau_grid!r}")
    if not taus:
        raise UsageError("--tau-grid is empty")
    rows = []
    for j, tau_req in enumerate(taus):
        _, tau = _resolve_tau(tau_req, args.dt)
        cfg = SimConfig(gamma=args.gamma, theta0=theta0, tau=tau, dt=args.dt,
                        t_end=args.burn_in + args.t_sim, burn_in=args.burn_in,
                        seed=args.seed, mode="theta")
        est = simulate_ensemble(cfg, n_traj=1, stream_offset=j)
        try:
            p_ana = analytic_purity(args.gamma, tau)
        except OutOfValidityError:
            p_ana = math.nan
        rows.append((tau, est.purity, est.purity_err, p_ana))
    header = _header_lines("purity-scan", {
        "gamma": args.gamma, "theta0": theta0,
        "tau_grid": ",".join(f"{t:g}" for t in taus),
        "t_sim": args.t_sim, "burn_in": args.burn_in, "dt": args.dt,
        "seed": args.seed,
    }, args.deterministic)
    _write_csv(args.out, header,
               ["tau", "purity_sim", "purity_err", "purity_analytic"], rows)
    return 0


def _cmd_spectral(args) -> int:
    p = SpectralParams(gamma=args.gamma, tau=args.tau,
                       omega_max=args.omega_max, n_points=args.n_points)
    var = delta_theta_variance(p)
    asym = 4.0 * args.gamma * args.tau
    ratio = var / asym if asym > 0.0 else math.nan
    print(f"delta_theta_variance={var:.10g}")
    print(f"four_gamma_tau={asym:.10g}")
    print(f"ratio={ratio:.10g}")
    print(f"tau_star={stability_threshold(args.gamma):.10g}")
    return 0


_COMMANDS = {
    "steady-state": _cmd_steady_state,
    "gains": _cmd_gains,
    "trajectory": _cmd_trajectory,
    "locus": _cmd_locus,
    "purity-scan": _cmd_purity_scan,
    "spectral": _cmd_spectral,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _load_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except BlochFBError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
