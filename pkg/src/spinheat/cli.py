"""Command-line front end: sweeps, figure-data presets, SI reports, dynamics traces.

Everything is emitted as CSV (default) or JSON with self-describing column
names; output for a fixed invocation is deterministic. Exit codes: 0 on
success, 2 for usage/specification errors, 3 for numeric failures.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from . import __version__
from .dynamics import (
    PopulationState,
    RatePair,
    aligned_state,
    collective_generator,
    evolve,
    gibbs_state,
    relaxation_time,
    stationary_state,
    uniform_state,
)
from .sectors import BlockWeights, SpinEnsemble, symmetric_weights, thermal_product_weights
from .thermo import (
    collective_heat_capacity,
    critical_temperature_approx,
    critical_temperature_numeric,
    independent_heat_capacity,
)
from .otto import OttoParams, cycle_exact
from . import oracle

K_B = 1.380649e-23  # J/K
HBAR = 1.054571817e-34  # J*s

_QUANTITIES = (
    "heat-capacity",
    "hc-ratio",
    "precision",
    "precision-ratio",
    "work",
    "power",
    "power-ratio",
)

# figure presets: quantity, (n, two_s) curves, default grid (lo, hi, points, kind)
_FIG_SPINS_N2 = ((2, 1), (2, 3), (2, 9))
_FIG_SIZES = ((2, 1), (5, 1), (10, 1), (100, 1), (100, 3))
FIGURES: dict[str, tuple[str, tuple[tuple[int, int], ...], tuple[float, float, int, str]]] = {
    "1a": ("heat-capacity", _FIG_SPINS_N2, (0.01, 100.0, 241, "log")),
    "1b": ("hc-ratio", _FIG_SPINS_N2, (0.025, 1000.0, 241, "log")),
    "2a": ("heat-capacity", _FIG_SIZES, (0.01, 100.0, 241, "log")),
    "2b": ("hc-ratio", _FIG_SIZES, (0.025, 1000.0, 241, "log")),
    "3a": ("precision", _FIG_SIZES, (0.01, 100.0, 241, "log")),
    "3b": ("precision-ratio", _FIG_SIZES, (0.01, 100.0, 241, "log")),
    "4": ("work", _FIG_SIZES, (0.01, 100.0, 241, "log")),
    "5a": ("power", _FIG_SIZES, (0.01, 100.0, 241, "log")),
    "5b": ("power-ratio", _FIG_SIZES, (1.0 / 30.0, 15000.0, 241, "log")),
}


class CliError(Exception):
    """Usage or specification error (exit code 2)."""


def parse_spin(text: str) -> int:
    """Spin magnitude as a doubled integer: accepts '1/2', '3/2', '1', '2.5'."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            if int(den) != 2:
                raise ValueError
            two_s = int(num)
        else:
            val = 2.0 * float(text)
            two_s = int(round(val))
            if abs(val - two_s) > 1e-9:
                raise ValueError
    except ValueError:
        raise CliError(f"cannot parse spin {text!r}; use forms like 1/2, 3/2, 1, 2.5") from None
    if two_s < 1:
        raise CliError(f"spin must be >= 1/2, got {text!r}")
    return two_s


def parse_grid(text: str, positive: bool = True) -> np.ndarray:
    """Grid spec lo:hi:points:log|lin -> array of grid values."""
    parts = text.split(":")
    if len(parts) != 4:
        raise CliError(f"grid must look like lo:hi:points:log|lin, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError:
        raise CliError(f"bad grid numbers in {text!r}") from None
    kind = parts[3]
    if kind not in ("log", "lin"):
        raise CliError(f"grid kind must be log or lin, got {kind!r}")
    if points < 0:
        raise CliError("grid point count must be >= 0")
    if hi < lo:
        raise CliError(f"grid bounds must be ordered, got {lo} > {hi}")
    if kind == "log" and lo <= 0.0:
        raise CliError("log grid needs lo > 0")
    if positive and lo <= 0.0:
        raise CliError("grid values must be positive here")
    if points == 0:
        return np.empty(0)
    if points == 1:
        return np.array([lo])
    if kind == "log":
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def load_weights_file(path: str, ensemble: SpinEnsemble) -> BlockWeights:
    """Weights file: whitespace-separated 'two_J p_J' lines, '#' comments."""
    raw: dict[int, float] = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise CliError(f"{path}:{lineno}: expected 'two_J p_J', got {line!r}")
                try:
                    tj, p = int(parts[0]), float(parts[1])
                except ValueError:
                    raise CliError(f"{path}:{lineno}: cannot parse {line!r}") from None
                raw[tj] = raw.get(tj, 0.0) + p
    except OSError as exc:
        raise CliError(f"cannot read weights file {path}: {exc}") from None
    if not raw:
        raise CliError(f"weights file {path} has no entries")
    total = sum(raw.values())
    if abs(total - 1.0) > 1e-6:
        raise CliError(f"weights in {path} sum to {total!r}, expected 1")
    try:
        return BlockWeights(ensemble, {tj: p / total for tj, p in raw.items()})
    except ValueError as exc:
        raise CliError(str(exc)) from None


def resolve_weights(spec: str, ensemble: SpinEnsemble) -> tuple[BlockWeights, str]:
    """--weights value -> (weights, provenance tag)."""
    if spec == "symmetric":
        return symmetric_weights(ensemble), "symmetric"
    if spec.startswith("thermal="):
        try:
            b0 = float(spec.split("=", 1)[1])
        except ValueError:
            raise CliError(f"bad thermal weights spec {spec!r}") from None
        return thermal_product_weights(ensemble, b0), spec
    if spec.startswith("file="):
        path = spec.split("=", 1)[1]
        return load_weights_file(path, ensemble), spec
    raise CliError(f"--weights must be symmetric, thermal=<b0> or file=<path>, got {spec!r}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def emit_table(columns, rows, meta, args, trailing: dict[str, float] | None = None) -> None:
    """Write the table as CSV or JSON to --out (or stdout)."""
    if args.format == "json":
        payload = {"metadata": meta, "columns": list(columns), "rows": [list(r) for r in rows]}
        if trailing:
            payload["metadata"].update(trailing)
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        if trailing:
            lines.extend(f"# {k} = {_fmt(v)}" for k, v in trailing.items())
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spin_label(two_s: int) -> str:
    return f"{0.5 * two_s:g}"


def _ratio(num: float, den: float, limit: float) -> float:
    return limit if den == 0.0 else num / den


def _sweep_values(quantity, ensemble, weights, x, nu) -> list[float]:
    """Column values for one grid point; x is kT/hw or kT_h/(hw*lambda_h)."""
    n = ensemble.n
    if quantity in ("heat-capacity", "hc-ratio", "precision", "precision-ratio"):
        b = 1.0 / x
        c_col = collective_heat_capacity(weights, b).c_over_kb
        c_ind = independent_heat_capacity(ensemble, b).c_over_kb
        if quantity == "heat-capacity":
            return [c_col, c_ind]
        if quantity == "hc-ratio":
            return [_ratio(c_col, c_ind, 1.0 / n)]
        if c_col <= 0.0 or c_ind <= 0.0:
            raise ArithmeticError(f"heat capacity vanished at kT/hw = {x}; precision bound diverges")
        if quantity == "precision":
            return [1.0 / math.sqrt(nu * c_col), 1.0 / math.sqrt(nu * c_ind)]
        return [math.sqrt(c_ind / c_col)]
    theta = 1.0 / x
    c_col = collective_heat_capacity(weights, theta).c_over_kb
    c_ind = independent_heat_capacity(ensemble, theta).c_over_kb
    if quantity == "work":
        return [c_col / theta**2, c_ind / theta**2]
    if quantity == "power":
        return [n * c_col / theta**2, c_ind / theta**2]
    return [_ratio(n * c_col, c_ind, 1.0)]  # power-ratio


def _column_names(quantity, suffix="") -> list[str]:
    base = {
        "heat-capacity": ["C_col_over_kB", "C_ind_over_kB"],
        "hc-ratio": ["hc_ratio"],
        "precision": ["D_col", "D_ind"],
        "precision-ratio": ["precision_ratio"],
        "work": ["w_col", "w_ind"],
        "power": ["p_col", "p_ind"],
        "power-ratio": ["power_ratio"],
    }[quantity]
    return [name + suffix for name in base]


def _x_name(quantity) -> str:
    if quantity in ("work", "power", "power-ratio"):
        return "kTh_over_hw_lambda_h"
    return "kT_over_hw"


def _exact_cycle_columns(args, quantity) -> bool:
    if quantity not in ("work", "power"):
        return False
    if args.lambda_h is None or args.bc is None:
        return False
    return args.lambda_c is not None or args.delta_eta is not None


def _exact_cycle_values(args, ensemble, weights, x, quantity) -> list[float]:
    b_h = 1.0 / (x * args.lambda_h)
    if args.lambda_c is not None:
        lambda_c = args.lambda_c
    else:
        lambda_c = args.lambda_h * (b_h / args.bc + args.delta_eta)
    params = OttoParams(lambda_c=lambda_c, lambda_h=args.lambda_h, b_c=args.bc, b_h=b_h)
    w_col = cycle_exact(weights, params, "collective").work_extracted
    w_ind = cycle_exact(weights, params, "independent").work_extracted
    if quantity == "power":
        return [ensemble.n * w_col / args.tau_ind, w_ind / args.tau_ind]
    return [w_col, w_ind]


def cmd_sweep(args) -> None:
    ensemble = SpinEnsemble(args.n, parse_spin(args.spin))
    weights, provenance = resolve_weights(args.weights, ensemble)
    grid = parse_grid(args.grid)
    columns = [_x_name(args.quantity)] + _column_names(args.quantity)
    exact = _exact_cycle_columns(args, args.quantity)
    if exact:
        columns += (
            ["W_col_exact", "W_ind_exact"]
            if args.quantity == "work"
            else ["P_col_exact", "P_ind_exact"]
        )
    rows = []
    for x in grid:
        row = [float(x)] + _sweep_values(args.quantity, ensemble, weights, float(x), args.nu)
        if exact:
            row += _exact_cycle_values(args, ensemble, weights, float(x), args.quantity)
        rows.append(row)
    meta = {
        "version": __version__,
        "command": "sweep",
        "quantity": args.quantity,
        "n": ensemble.n,
        "two_s": ensemble.two_s,
        "weights": provenance,
        "grid": args.grid,
    }
    emit_table(columns, rows, meta, args)


def cmd_figure(args) -> None:
    quantity, curves, default_grid = FIGURES[args.which]
    if args.grid is not None:
        grid = parse_grid(args.grid)
        grid_label = args.grid
    else:
        lo, hi, points, kind = default_grid
        grid = np.geomspace(lo, hi, points) if kind == "log" else np.linspace(lo, hi, points)
        grid_label = f"{lo}:{hi}:{points}:{kind}"
    columns = [_x_name(quantity)]
    per_curve = []
    for n, two_s in curves:
        ens = SpinEnsemble(n, two_s)
        per_curve.append((ens, symmetric_weights(ens)))
        columns += _column_names(quantity, f"_n{n}_s{_spin_label(two_s)}")
    rows = []
    for x in grid:
        row = [float(x)]
        for ens, w in per_curve:
            row += _sweep_values(quantity, ens, w, float(x), 1)
        rows.append(row)
    meta = {
        "version": __version__,
        "command": f"figure {args.which}",
        "quantity": quantity,
        "curves": [{"n": n, "two_s": ts} for n, ts in curves],
        "weights": "symmetric",
        "grid": grid_label,
    }
    emit_table(columns, rows, meta, args)


def cmd_tcr(args) -> None:
    two_s = parse_spin(args.spin)
    grid = parse_grid(args.grid)
    ns = sorted({int(round(x)) for x in grid})
    if any(n < 2 for n in ns):
        raise CliError("tcr needs n >= 2 (no crossover for a single spin)")
    rows = []
    for n in ns:
        ens = SpinEnsemble(n, two_s)
        approx = critical_temperature_approx(ens)
        numeric = critical_temperature_numeric(ens)
        rows.append([n, approx, numeric, float(abs(numeric - approx) / numeric)])
    meta = {
        "version": __version__,
        "command": "tcr",
        "two_s": two_s,
        "grid": args.grid,
    }
    emit_table(["n", "tcr_approx", "tcr_numeric", "rel_gap"], rows, meta, args)


_CESIUM_NOTE = (
    "closed form is a high-temperature expansion of the capacity crossover; "
    "nanokelvin-scale estimates sometimes quoted for cesium quasispin ensembles "
    "do not follow from it (it lands in the microkelvin range at this splitting)"
)


def cmd_si_report(args) -> None:
    if args.hbar_omega <= 0.0:
        raise CliError("--hbar-omega must be a positive energy in joules")
    ensemble = SpinEnsemble(args.n, parse_spin(args.spin))
    t_unit = args.hbar_omega / K_B
    fields: dict[str, object] = {
        "n": ensemble.n,
        "spin": _spin_label(ensemble.two_s),
        "hbar_omega_J": args.hbar_omega,
        "omega_rad_per_s": args.hbar_omega / HBAR,
        "temperature_unit_K": t_unit,
    }
    enhancement = (ensemble.two_j_max + 2.0) / (ensemble.two_s + 2.0)
    if ensemble.n >= 2:
        fields["tcr_closed_form_K"] = critical_temperature_approx(ensemble) * t_unit
        fields["tcr_numeric_K"] = critical_temperature_numeric(ensemble) * t_unit
    else:
        fields["tcr_closed_form_K"] = None  # single spin: collective = independent
    fields["qfi_enhancement_high_T"] = enhancement
    fields["precision_ratio_high_T"] = 1.0 / math.sqrt(enhancement)
    if args.hbar_omega < 1e-27:
        fields["note"] = _CESIUM_NOTE
    if args.format == "json":
        payload = {"metadata": {"version": __version__, "command": "si-report"}}
        payload.update(fields)
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = "".join(f"{k} = {v}\n" for k, v in fields.items())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _initial_state(args, weights, provenance) -> PopulationState:
    init = args.init
    if init == "auto":
        init = f"gibbs:{provenance.split('=', 1)[1]}" if provenance.startswith("thermal=") else "top"
    if init == "top":
        return aligned_state(weights, excited=True)
    if init == "bottom":
        return aligned_state(weights)
    if init == "uniform":
        return uniform_state(weights)
    if init.startswith("gibbs:"):
        try:
            b0 = float(init.split(":", 1)[1])
        except ValueError:
            raise CliError(f"bad --init value {init!r}") from None
        return gibbs_state(weights, b0)
    raise CliError(f"--init must be auto, top, bottom, uniform or gibbs:<b0>, got {init!r}")


def cmd_dynamics(args) -> None:
    ensemble = SpinEnsemble(args.n, parse_spin(args.spin))
    weights, provenance = resolve_weights(args.weights, ensemble)
    if args.bh is None:
        raise CliError("dynamics needs --bh, the bath inverse temperature hbar*omega*beta")
    rates = RatePair.thermal(args.bh)
    times = parse_grid(args.grid, positive=False) if args.grid else np.empty(0)
    if times.size and times[0] < 0.0:
        raise CliError("dynamics times must be >= 0")
    state0 = _initial_state(args, weights, provenance)
    target = stationary_state(state0, rates)

    pop_keys = []
    if args.populations:
        for tj, p in sorted(state0.blocks.items()):
            pop_keys += [(tj, -tj + 2 * i) for i in range(len(p))]
    columns = ["t_in_inv_G", "energy_over_hw", "tv_to_steady"]
    columns += [f"pop_2J{tj}_2m{tm}" for tj, tm in pop_keys]

    if args.oracle:
        if ensemble.dim > oracle.DIM_CAP:
            raise CliError(
                f"oracle mode: Hilbert dimension {ensemble.dim} exceeds cap {oracle.DIM_CAP}"
            )
        rho0 = oracle.state_from_populations(state0, ensemble)
        rows = []
        for t, rho in zip(times, oracle.trajectory(rho0, rates, times)):
            pops = oracle.sector_populations(rho)
            row = [float(t), rho.energy(), pops.tv_distance(target)]
            row += [float(pops.blocks[tj][(tm + tj) // 2]) for tj, tm in pop_keys]
            rows.append(row)
    else:
        gen = collective_generator(ensemble, rates)
        rows = []
        for t in times:
            st = evolve(state0, gen, float(t))
            row = [float(t), st.energy(), st.tv_distance(target)]
            row += [float(st.blocks[tj][(tm + tj) // 2]) for tj, tm in pop_keys]
            rows.append(row)

    trailing = None
    if times.size:
        gen = collective_generator(ensemble, rates)
        relax = relaxation_time(state0, gen, args.epsilon)
        trailing = {
            "relaxation_time_inv_G": relax.time,
            "spectral_gap_G": relax.spectral_gap,
        }
    meta = {
        "version": __version__,
        "command": "dynamics",
        "n": ensemble.n,
        "two_s": ensemble.two_s,
        "weights": provenance,
        "bath_b": args.bh,
        "epsilon": args.epsilon,
        "oracle": bool(args.oracle),
    }
    emit_table(columns, rows, meta, args, trailing)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="number of spins")
    p.add_argument("--spin", required=True, help='spin magnitude, e.g. "1/2", "3/2", "1"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinheat",
        description="Collective vs independent spin-ensemble thermodynamics: "
        "heat capacities, thermometry bounds, Otto engine output, dynamics.",
        epilog="`--config FILE` (anywhere on the line) loads flag defaults from an "
        "INI file with one section per subcommand; explicit flags take precedence.",
    )
    parser.add_argument("--version", action="version", version=f"spinheat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep one quantity over a temperature grid")
    _add_ensemble(p)
    p.add_argument("--quantity", choices=_QUANTITIES, required=True)
    p.add_argument("--weights", default="symmetric", help="symmetric | thermal=<b0> | file=<path>")
    p.add_argument("--grid", required=True, help="lo:hi:points:log|lin over kT/hw (or kT_h/(hw*lambda_h))")
    p.add_argument("--nu", type=int, default=1, help="measurement count for precision bounds")
    p.add_argument("--lambda-h", type=float, default=None, help="hot compression factor (exact cycle columns)")
    p.add_argument("--lambda-c", type=float, default=None, help="cold compression factor (exact cycle columns)")
    p.add_argument("--bc", type=float, default=None, help="cold bath hbar*omega*beta_c (exact cycle columns)")
    p.add_argument("--delta-eta", type=float, default=None, help="fixed Carnot gap (exact cycle columns)")
    p.add_argument("--tau-ind", type=float, default=1.0, help="independent-coupling cycle time")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="emit the data behind one of the reference figures")
    p.add_argument("which", choices=sorted(FIGURES))
    p.add_argument("--grid", default=None, help="override the preset grid")
    _add_common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("tcr", help="crossover temperature: closed form vs numeric root")
    p.add_argument("--spin", required=True)
    p.add_argument("--grid", required=True, help="lo:hi:points:log|lin over n (rounded to integers)")
    _add_common(p)
    p.set_defaults(func=cmd_tcr)

    p = sub.add_parser("si-report", help="SI-unit crossover and enhancement report")
    _add_ensemble(p)
    p.add_argument("--hbar-omega", type=float, required=True, help="level splitting in joules")
    _add_common(p)
    p.set_defaults(func=cmd_si_report)

    p = sub.add_parser("dynamics", help="sector-population relaxation trace")
    _add_ensemble(p)
    p.add_argument("--weights", default="symmetric", help="symmetric | thermal=<b0> | file=<path>")
    p.add_argument("--bh", type=float, default=None, help="bath inverse temperature hbar*omega*beta")
    p.add_argument("--grid", default=None, help="time grid lo:hi:points:log|lin, units 1/G")
    p.add_argument("--epsilon", type=float, default=1e-3, help="TV threshold for the relaxation time")
    p.add_argument("--init", default="auto", help="auto | top | bottom | uniform | gibbs:<b0>")
    p.add_argument("--populations", action="store_true", help="include per-(J,m) population columns")
    p.add_argument("--oracle", action="store_true", help="integrate the dense master equation instead")
    _add_common(p)
    p.set_defaults(func=cmd_dynamics)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Fold `--config FILE` defaults into argv; explicit flags still win.

    The file is INI-style with one section per subcommand, keys named after
    the long flags (`grid = 0.1:10:50:log`). Injected tokens go right after
    the subcommand, so anything typed on the command line overrides them.
    """
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise CliError("--config needs a file path")
    path = argv[at + 1]
    argv = argv[:at] + argv[at + 2 :]
    if not argv:
        raise CliError("--config given but no subcommand")
    cfg = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cfg.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    command = argv[0]
    injected: list[str] = []
    if cfg.has_section(command):
        for key, value in cfg.items(command):
            flag = "--" + key.replace("_", "-")
            if value.strip().lower() in ("true", "false"):
                if value.strip().lower() == "true":
                    injected.append(flag)
            else:
                injected += [flag, value.strip()]
    return [command] + injected + argv[1:]


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _apply_config(list(argv))
    except CliError as exc:
        print(f"spinheat: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (CliError, ValueError) as exc:
        print(f"spinheat: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"spinheat: numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
