"""Command-line entry point: ``twomuhs {simulate,verify,lax,sweep}``.

Exit status: 0 success, 1 configuration error, 2 blow-up abort,
3 verification failure.
"""
from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import REQUIRED_IN_FILE, ConfigError, RunConfig
from .dynamics import BlowUpError, StepperConfig, integrate, rhs
from .lax import zero_curvature_residual
from .spectral import write_field_csv
from .verification import PROFILES, run_verification

log = logging.getLogger("twomuhs")

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_VERIFY = 0, 1, 2, 3
MONITORS = ("mu", "H1", "H2", "discrepancy")


def git_blob_hash(data: bytes) -> str:
    """Content hash computed the way git hashes a blob."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _fmt(x: float) -> str:
    return "%.17g" % x


def _write_series(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def inputs_hash(cfg: RunConfig) -> str:
    """Hash of the configuration with the output location removed."""
    inputs = {k: v for k, v in cfg.to_dict().items() if k != "out"}
    return git_blob_hash(json.dumps(inputs, sort_keys=True).encode())


def write_manifest(out: Path, cfg: RunConfig, extra: dict | None = None) -> None:
    files = {}
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            files[path.relative_to(out).as_posix()] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = {
        "artifact_version": __version__,
        "command": cfg.command,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "inputs_hash": inputs_hash(cfg),
        "outputs": files,
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _stepper(cfg: RunConfig, cadence: int) -> StepperConfig:
    return StepperConfig(dt=cfg.dt, t_end=cfg.t_end, formulation=cfg.formulation,
                         variant=cfg.variant, cadence=cadence,
                         monitor_discrepancy=cfg.monitor_discrepancy)


def _trajectory(cfg: RunConfig, cadence: int):
    return integrate(cfg.initial_state(), _stepper(cfg, cadence))


def _blowup(out: Path, cfg: RunConfig, exc: BlowUpError) -> int:
    (out / "blowup.json").write_text(json.dumps(exc.report, indent=2, sort_keys=True) + "\n")
    write_manifest(out, cfg, {"status": "blow-up"})
    print(f"blow-up: {exc}", file=sys.stderr)
    return EXIT_BLOWUP


def run_simulate(cfg: RunConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    # record at the monitor cadence and at every snapshot step
    wanted = set(cfg.snapshot_steps())
    stride = math.gcd(cfg.cadence, *wanted) or cfg.cadence
    try:
        traj = _trajectory(cfg, stride)
    except BlowUpError as exc:
        return _blowup(out, cfg, exc)
    steps = [int(round(t / cfg.dt)) for t in traj.times]
    keep = [i for i, s in enumerate(steps) if s % cfg.cadence == 0 or s == cfg.steps]
    for name in MONITORS:
        series = traj.monitors[name]
        _write_series(out / f"monitor_{name}.csv", "t,value",
                      ((traj.times[i], series[i]) for i in keep))
    snap = out / "snapshots"
    snap.mkdir(exist_ok=True)
    for i, s in enumerate(steps):
        if s in wanted:
            state = traj.states[i]
            write_field_csv(state.f, snap / f"f_step{s:07d}.csv")
            write_field_csv(state.v, snap / f"v_step{s:07d}.csv")
    write_manifest(out, cfg, {"status": "ok"})
    return EXIT_OK


def lax_rows(cfg: RunConfig, traj):
    for t, state in zip(traj.times, traj.states):
        f_t, v_t = rhs(state, "direct")
        for lam in cfg.lambdas:
            Z = zero_curvature_residual(state.f, state.v, f_t, v_t, lam)
            yield t, lam, Z.max_scaled


def run_lax(cfg: RunConfig, out: Path) -> int:
    if any(cfg.gamma):
        log.warning("the Lax pair is derived for gamma = 0; residuals are diagnostic only")
    out.mkdir(parents=True, exist_ok=True)
    try:
        traj = _trajectory(replace(cfg, monitor_discrepancy=False), cfg.cadence)
    except BlowUpError as exc:
        return _blowup(out, cfg, exc)
    _write_series(out / "lax_residual.csv", "t,lambda,residual", lax_rows(cfg, traj))
    write_manifest(out, cfg, {"status": "ok"})
    return EXIT_OK


def sweep_points(cfg: RunConfig) -> list[dict]:
    axes = cfg.sweep or {}
    gammas = [tuple(g) for g in axes.get("gamma", [cfg.gamma])]
    lams = axes.get("lambda", [None])
    ns = axes.get("n", [cfg.n])
    points = []
    for n, gamma, lam in itertools.product(ns, gammas, lams):
        point = {"n": n, "gamma": gamma}
        if lam is not None:
            point["lambdas"] = (lam,)
        points.append(point)
    return points


def run_sweep(cfg: RunConfig, out: Path) -> int:
    points = sweep_points(cfg)
    configs = []  # built first so an invalid point aborts before any output
    for i, point in enumerate(points):
        sub = out / f"point_{i:03d}"
        configs.append(replace(cfg, command="simulate", sweep=None, out=sub.as_posix(), **point))
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    index = []
    for sub_cfg in configs:
        sub = Path(sub_cfg.out)
        code = run_simulate(sub_cfg, sub)
        if code == EXIT_OK and "lambda" in (cfg.sweep or {}):
            code = run_lax(sub_cfg, sub)
        index.append({"dir": sub.name, "n": sub_cfg.n, "gamma": list(sub_cfg.gamma),
                      "lambdas": list(sub_cfg.lambdas), "exit": code})
        status = max(status, code)
    write_manifest(out, cfg, {"points": index})
    return status


def run_verify(cfg: RunConfig, out: Path, profile: str, criteria=None) -> int:
    out.mkdir(parents=True, exist_ok=True)
    report = run_verification(n=cfg.n, seed=cfg.seed, profile=profile, criteria=criteria)
    report.write_json(out / "verify_report.json")
    write_manifest(out, cfg, {"tolerance_profile": profile, "passed": report.passed})
    for c in report.checks:
        print(c.line())
    s = report.to_dict()["summary"]
    print(f"{s['passed']}/{s['total']} checks passed")
    return EXIT_OK if report.passed else EXIT_VERIFY


def run(cfg: RunConfig, profile: str = "default", criteria=None) -> int:
    out = Path(cfg.out)
    if cfg.command == "simulate":
        return run_simulate(cfg, out)
    if cfg.command == "lax":
        return run_lax(cfg, out)
    if cfg.command == "sweep":
        return run_sweep(cfg, out)
    return run_verify(cfg, out, profile, criteria)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twomuhs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="integrate and write monitors")
    verify = sub.add_parser("verify", parents=[common], help="run the certification suite")
    verify.add_argument("--variational", action="store_true",
                        help="only the variational and Legendre checks")
    verify.add_argument("--criteria", type=int, nargs="+", metavar="K",
                        help="subset of criteria 1..10")
    sub.add_parser("lax", parents=[common], help="zero-curvature residuals along a trajectory")
    sub.add_parser("sweep", parents=[common], help="cartesian sweep over gamma, lambda, n")
    return parser


def load_config(args) -> RunConfig:
    if args.config:
        cfg = RunConfig.load(args.config)
        if cfg.command != args.command and "command" in json.loads(Path(args.config).read_text()):
            raise ConfigError(f"config command {cfg.command!r} does not match {args.command!r}")
    elif args.command in ("simulate", "lax", "sweep"):
        raise ConfigError(f"{args.command} requires --config (keys {', '.join(REQUIRED_IN_FILE)})")
    else:
        cfg = RunConfig(command=args.command)
    cfg = replace(cfg, command=args.command)
    try:
        cfg = cfg.with_overrides(out=args.out, seed=args.seed)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if args.command == "sweep" and not cfg.sweep:
        raise ConfigError("sweep requires a 'sweep' object in the config")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    criteria = None
    if args.command == "verify":
        if args.variational:
            criteria = [8, 9]
        elif args.criteria:
            if not all(1 <= k <= 10 for k in args.criteria):
                print("config error: criteria must lie in 1..10", file=sys.stderr)
                return EXIT_CONFIG
            criteria = args.criteria
    try:
        return run(cfg, args.tolerance_profile, criteria)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
