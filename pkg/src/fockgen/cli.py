"""``fockgen`` command line: verification runs, kernel tables, evolution and amplitudes.

Exit codes: 0 success, 1 failed checks, 2 invalid configuration, 3 Fock space
over the capacity budget (``FOCKGEN_BUDGET``).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from .amplitudes import AmplitudeRequest, SectorMismatchWarning, coordinate_product_state, k_particle_amplitude
from .fock import CapacityError, budget_from_env, build_fock, one_particle_state
from .grid import Basis, GridError, GridSpec, lattice_kernel, make_grid, transform_array
from .onebody import energy_kernel, gaussian_packet
from .specfun import UnsupportedBranchError, omega_kernel, power_kernel, time_translation_kernel
from .symmetry import lattice_time_kernel

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3
SCHEMA = 1
DEFAULT_GRID = GridSpec(1, 64, 0.25, 1.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grid: GridSpec = DEFAULT_GRID
    K: int = 2
    suites: list = field(default_factory=lambda: ["all"])
    tolerance_overrides: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    seed: int = 7
    extra: dict = field(default_factory=dict)  # command-specific keys

    def to_dict(self) -> dict:
        return {"grid": self.grid.to_dict(), "K": self.K, "suites": list(self.suites),
                "tolerance_overrides": dict(sorted(self.tolerance_overrides.items())), "seed": self.seed}


def _load_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    raw = dict(raw)
    try:
        grid = GridSpec.from_dict(raw.pop("grid")) if "grid" in raw else DEFAULT_GRID
    except (GridError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad grid: {exc}") from exc
    K = raw.pop("K", 2)
    if not isinstance(K, int) or isinstance(K, bool) or K < 0:
        raise ConfigError(f"K must be a nonnegative integer, got {K!r}")
    suites = raw.pop("suites", ["all"])
    if isinstance(suites, str) or not isinstance(suites, list):
        raise ConfigError("suites must be a list of check or tier names")
    overrides = raw.pop("tolerance_overrides", {})
    if not isinstance(overrides, dict):
        raise ConfigError("tolerance_overrides must map check names to numbers")
    overrides = dict(overrides)
    for item in args.override or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--override expects <check>=<tol>, got {item!r}")
        overrides[name.strip()] = value
    try:
        overrides = {k: float(v) for k, v in overrides.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"tolerance override is not a number: {exc}") from exc
    unknown = sorted(set(overrides) - set(checks.CHECK_NAMES))
    if unknown:
        raise ConfigError(f"unknown check(s) in overrides: {', '.join(unknown)}")
    try:
        checks.select(suites)
    except KeyError as exc:
        raise ConfigError(f"unknown suite or check {exc}") from exc
    seed = args.seed if args.seed is not None else raw.pop("seed", 7)
    raw.pop("seed", None)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    out = Path(args.out) if args.out else Path(raw.pop("output_dir", "."))
    raw.pop("output_dir", None)
    return RunConfig(grid, K, suites, overrides, out, seed, raw)


def _budget() -> int:
    try:
        return budget_from_env()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_json(path: Path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")


def _fmt(x: float) -> str:
    # shortest round-trip repr, locale independent
    return repr(float(x))


# ---- verify ----------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    ctx = checks.Context(cfg.grid, cfg.K, cfg.seed, _budget())
    selected = checks.select(cfg.suites)
    # build the Fock space up front so an oversized request fails fast
    ctx.fock
    reports = checks.run_checks(ctx, selected, cfg.tolerance_overrides)
    report = {"schema": SCHEMA, "config": cfg.to_dict(), "checks": [r.to_dict() for r in reports]}
    _write_json(cfg.output_dir / "report.json", report)
    _write_json(cfg.output_dir / "timings.json", {r.name: round(r.wall_time, 6) for r in reports})
    for r in reports:
        err = "-" if r.error is None else f"{r.error:.3e}"
        tol = "-" if r.tolerance is None else f"{r.tolerance:.3e}"
        extra = f" ({r.reason})" if r.reason else ""
        print(f"{r.status.upper():7s} {r.name:30s} err={err:>10s} tol={tol:>10s}{extra}")
    failed = [r.name for r in reports if r.status == "fail"]
    print(f"{len(reports) - len(failed)}/{len(reports)} ok" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


# ---- kernel ----------------------------------------------------------------

def kernel_table(spec: GridSpec, kind: str, r_min: float, r_max: float, steps: int,
                 y0: float = 0.5, lam: float = -0.5) -> list:
    """Rows ``(r, analytic, lattice, abs_err, rel_err, valid)``.

    Radii are snapped to lattice distances along the first axis.  Rows outside
    the window ``2a <= r <= N a / 4`` (and, for the time kernel, ``r > |y0|``)
    are kept and flagged ``valid = 0``.  The time-kernel columns hold
    imaginary parts, which is where the continuum kernel lives.
    """
    if not (0 < r_min <= r_max and steps >= 1):
        raise ConfigError("need 0 < r_min <= r_max and steps >= 1")
    grid = make_grid(spec)
    if kind == "omega":
        values = energy_kernel(grid) / grid.a**grid.n
        analytic = lambda r: omega_kernel(grid.m, grid.n, r)
        part = np.real
    elif kind == "power":
        values = lattice_kernel(grid, grid.omega ** (2 * lam)).real * (2 * np.pi / grid.a) ** grid.n
        analytic = lambda r: power_kernel(lam, grid.m, grid.n, r)
        part = np.real
    elif kind == "time":
        if grid.n != 3:
            raise ConfigError("the time-translation kernel is tabulated for n = 3")
        values = lattice_time_kernel(grid, y0) / grid.a**3
        analytic = lambda r: time_translation_kernel(grid.m, y0, r)
        part = np.imag
    else:
        raise ConfigError(f"unknown kernel kind {kind!r}")
    radii = sorted({int(round(r / grid.a)) for r in np.linspace(r_min, r_max, steps)})
    rows = []
    for k in radii:
        r = k * grid.a
        j = np.zeros(grid.n, dtype=int)
        j[0] = k
        lat = float(part(values[grid.site_index(grid.wrap_site(j))]))
        valid = 2 * grid.a <= r <= grid.N * grid.a / 4 and k > 0
        try:
            ana = float(part(analytic(r))) if k > 0 else math.nan
        except UnsupportedBranchError:
            ana, valid = math.nan, False
        if kind == "time" and r <= abs(y0):
            valid = False
        abs_err = abs(lat - ana)
        rel_err = abs_err / abs(ana) if ana not in (0.0,) and not math.isnan(ana) else math.nan
        rows.append((r, ana, lat, abs_err, rel_err, int(valid)))
    return rows


def cmd_kernel(cfg: RunConfig, kind: str, r_min: float, r_max: float, steps: int, y0: float, lam: float) -> int:
    rows = kernel_table(cfg.grid, kind, r_min, r_max, steps, y0, lam)
    path = cfg.output_dir / f"kernel_{kind}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "analytic", "lattice", "abs_err", "rel_err", "valid"])
        for r, ana, lat, ae, re, ok in rows:
            w.writerow([_fmt(r), _fmt(ana), _fmt(lat), _fmt(ae), _fmt(re), ok])
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


# ---- evolve ----------------------------------------------------------------

def evolve_table(spec: GridSpec, initial: dict, times) -> list:
    """Rows ``(t, j_1..j_n, re, im, modulus2)`` of one-particle position amplitudes."""
    grid = make_grid(spec)
    kind = initial.get("type", "delta")
    if kind == "delta":
        site = grid.site_index(np.asarray(initial.get("site", [0] * grid.n)))
        psi = transform_array(np.eye(grid.mode_count)[site].astype(complex), grid, Basis.COORDINATE, Basis.MOMENTUM)
    elif kind == "gaussian":
        sigma = float(initial.get("sigma", np.pi / (8 * grid.a)))
        psi = gaussian_packet(grid, sigma, initial.get("p0"), initial.get("x0"))
    else:
        raise ConfigError(f"unknown initial state type {kind!r}")
    rows = []
    for t in times:
        amp = transform_array(np.exp(-1j * grid.omega * t) * psi, grid, Basis.MOMENTUM, Basis.COORDINATE)
        for idx in range(grid.mode_count):
            a = amp[idx]
            rows.append((float(t), *map(int, grid.site_ints[idx]), a.real, a.imag, abs(a) ** 2))
    return rows


def cmd_evolve(cfg: RunConfig, initial: dict, times) -> int:
    rows = evolve_table(cfg.grid, initial, times)
    path = cfg.output_dir / "evolve.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    n = cfg.grid.n
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *[f"j{k}" for k in range(1, n + 1)], "re", "im", "modulus2"])
        for row in rows:
            t, sites, re, im, p = row[0], row[1:1 + n], row[-3], row[-2], row[-1]
            w.writerow([_fmt(t), *sites, _fmt(re), _fmt(im), _fmt(p)])
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


# ---- amplitude -------------------------------------------------------------

def _sites(grid, points) -> list:
    out = []
    for pt in points:
        pt = np.atleast_1d(np.asarray(pt, dtype=int))
        if pt.shape != (grid.n,):
            raise ConfigError(f"site {pt.tolist()} must have {grid.n} integer components")
        out.append(grid.site_index(pt))
    return out


def amplitude_result(cfg: RunConfig, state: dict, positions, t: float) -> dict:
    grid = make_grid(cfg.grid)
    fock = build_fock(grid, cfg.K, _budget())
    kind = state.get("type", "vacuum")
    if kind == "vacuum":
        vec = fock.vacuum()
    elif kind == "product":
        sites = _sites(grid, state.get("sites", []))
        if len(sites) > cfg.K:
            raise ConfigError(f"{len(sites)} particles exceed the cutoff K = {cfg.K}")
        vec = coordinate_product_state(fock, sites) if sites else fock.vacuum()
    elif kind == "gaussian":
        sigma = float(state.get("sigma", np.pi / (8 * grid.a)))
        vec = one_particle_state(fock, gaussian_packet(grid, sigma, state.get("p0"), state.get("x0")))
    else:
        raise ConfigError(f"unknown state type {kind!r}")
    pos = _sites(grid, positions)
    if len(pos) > cfg.K:
        raise ConfigError(f"{len(pos)} positions exceed the cutoff K = {cfg.K}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SectorMismatchWarning)
        amp = k_particle_amplitude(fock, AmplitudeRequest(vec, tuple(pos), t))
    return {"positions": [np.atleast_1d(p).astype(int).tolist() for p in positions], "t": t,
            "re": amp.value.real, "im": amp.value.imag, "modulus2": amp.modulus2,
            "sector_mismatch": amp.sector_mismatch}


def cmd_amplitude(cfg: RunConfig, state: dict, positions, t: float) -> int:
    result = amplitude_result(cfg, state, positions, t)
    _write_json(cfg.output_dir / "amplitude.json", result)
    # the same result as one CSV row: x<i>_j<k> is component k of the i-th site
    n = cfg.grid.n
    names = [f"x{i}_j{k}" for i in range(1, len(result["positions"]) + 1) for k in range(1, n + 1)]
    with (cfg.output_dir / "amplitude.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *names, "re", "im", "modulus2", "sector_mismatch"])
        w.writerow([_fmt(t), *[j for p in result["positions"] for j in p], _fmt(result["re"]), _fmt(result["im"]),
                    _fmt(result["modulus2"]), int(result["sector_mismatch"])])
    print(json.dumps(result))
    return EXIT_OK


# ---- argument handling -----------------------------------------------------

def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} is not valid JSON: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (overrides output_dir)")
    common.add_argument("--seed", type=int, help="seed for random test states")
    common.add_argument("--override", action="append", metavar="CHECK=TOL",
                        help="replace the tolerance of one check (repeatable)")
    ap = argparse.ArgumentParser(prog="fockgen", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the identity checks and write report.json")
    k = sub.add_parser("kernel", parents=[common], help="tabulate analytic against lattice kernels")
    k.add_argument("--kind", choices=["omega", "time", "power"], default="omega",
                   help="energy kernel, time-translation kernel (n = 3) or power kernel")
    k.add_argument("--r-min", type=float, default=0.25, help="smallest radius")
    k.add_argument("--r-max", type=float, default=4.0, help="largest radius")
    k.add_argument("--steps", type=int, default=16, help="number of radii, snapped to lattice distances")
    k.add_argument("--y0", type=float, default=0.5, help="time shift for --kind time")
    k.add_argument("--lam", type=float, default=-0.5, help="power of (p^2 + m^2) for --kind power")
    e = sub.add_parser("evolve", parents=[common], help="one-particle position amplitudes over time")
    e.add_argument("--initial", default='{"type": "delta"}',
                   help='JSON: {"type": "delta", "site": [j..]} or {"type": "gaussian", "sigma": s}')
    e.add_argument("--times", default="0,0.5,1", help="comma separated times")
    a = sub.add_parser("amplitude", parents=[common], help="k-particle position amplitude of a state")
    a.add_argument("--state", default='{"type": "vacuum"}',
                   help='JSON: {"type": "vacuum"}, {"type": "product", "sites": [[j..], ..]} or gaussian')
    a.add_argument("--positions", default="[]", help="JSON list of integer site vectors")
    a.add_argument("--t", type=float, default=0.0, help="field time")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.kind, args.r_min, args.r_max, args.steps, args.y0, args.lam)
        if args.command == "evolve":
            try:
                times = [float(x) for x in args.times.split(",") if x.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad --times: {exc}") from exc
            return cmd_evolve(cfg, _json_arg(args.initial, "--initial"), times)
        positions = _json_arg(args.positions, "--positions")
        if not isinstance(positions, list):
            raise ConfigError("--positions must be a JSON list")
        return cmd_amplitude(cfg, _json_arg(args.state, "--state"), positions, args.t)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (GridError, IndexError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
