"""
Command-line configuration, dispatch and output files.

Settings come from the repository config.json, optionally overridden by a
user JSON config (--config), then by KICKED_TOP_OUTPUT_DIR for the output
directory, then by command-line flags.
"""

import argparse
import csv
import dataclasses
import json
import math
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from srcs import __version__
from srcs.chaos_metrics import (
    linearity_diagnostic,
    rate_estimate,
    rate_lower_bound_report,
    series_from_distributions,
)
from srcs.experiments import ExperimentRunner
from srcs.measurement_record import MAX_DEPTH, write_distribution_csv
from srcs.spin_algebra import validate_j
from srcs.utils import apply_overrides, flatten_config, format_number, parse_history

COMMANDS = ("fig1", "fig2", "entropy", "probe", "kick-sweep", "ablation")
OUTPUT_DIR_ENV = "KICKED_TOP_OUTPUT_DIR"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.json"

# flag name -> dotted config path
FLAG_PATHS = {
    "j": "top_settings.j",
    "kick_strength": "top_settings.kick_strength",
    "rotation_angle": "top_settings.rotation_angle",
    "N": "record_settings.n_measurements",
    "prune_eps": "record_settings.prune_eps",
    "n_points": "sweep_settings.n_points",
    "seed": "sweep_settings.seed",
    "workers": "sweep_settings.workers",
    "output_dir": "output_settings.output_dir",
}


class ConfigError(ValueError):
    """Invalid configuration value or unknown key."""

    exit_status = 2


class ConfigFileError(ConfigError):
    """Configuration file missing, unreadable or not valid JSON."""

    exit_status = 3


class OutputError(Exception):
    """Failure writing an output file."""

    exit_status = 4


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs; defaults reproduce the published settings."""

    command: str
    j: float = 18.0
    kick_strength: float = 3.0
    rotation_angle: float = math.pi / 2
    N: int = 15
    theta: float | None = None
    phi: float | None = None
    n_points: int = 500
    seed: int = 0
    prune_eps: float = 0.0
    output_dir: Path = Path("results")
    workers: int = 1
    history: str | None = None
    dump_depth: int | None = None
    verbose: bool = False
    settings: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.settings:
            object.__setattr__(self, "settings", load_config(DEFAULT_CONFIG_PATH))

    def to_settings(self):
        """Nested config dict with the flat fields written back in."""
        overrides = {path: getattr(self, name) for name, path in FLAG_PATHS.items()}
        overrides["output_settings.output_dir"] = str(self.output_dir)
        overrides["debug.verbose"] = self.verbose
        return apply_overrides(self.settings, overrides)

    def echo(self):
        """JSON-friendly echo of the configuration for the manifest."""
        flat = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "settings"}
        flat["output_dir"] = str(self.output_dir)
        return {"run": flat, "settings": self.to_settings()}


@dataclass
class RunManifest:
    """Provenance written next to every output."""

    config: dict
    version: str
    rng_algorithm: str
    duration_seconds: float
    pruned_mass: dict
    outputs: list

    def to_dict(self):
        return dataclasses.asdict(self)


def load_config(config_path):
    """
    Load configuration from JSON file.

    Raises:
        ConfigFileError: file missing, unreadable or invalid JSON
    """
    try:
        with open(config_path) as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigFileError(f"Configuration file '{config_path}' not found") from e
    except OSError as e:
        raise ConfigFileError(f"Cannot read configuration file '{config_path}': {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigFileError(f"Invalid JSON in configuration file '{config_path}': {e}") from e


def merge_user_config(base, user, source="config file"):
    """Overlays a user config onto the defaults; every user key must already exist."""
    if not isinstance(user, dict):
        raise ConfigError(f"Top level of {source} must be a JSON object")
    known = flatten_config(base)
    user_flat = flatten_config(user)
    for path in user_flat:
        if path not in known:
            raise ConfigError(f"Unknown configuration key '{path}' in {source}")
    return apply_overrides(base, user_flat)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kicked-top",
        description="Shannon-entropy growth of the kicked-top measurement record",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="JSON file overriding config.json")
    parser.add_argument("--j", type=float, help="angular-momentum quantum number (half-integer)")
    parser.add_argument("--kick-strength", type=float, dest="kick_strength")
    parser.add_argument("--rotation-angle", type=float, dest="rotation_angle", help="radians")
    parser.add_argument("-N", "--N", type=int, dest="N", help="number of measurements")
    parser.add_argument("--theta", type=float)
    parser.add_argument("--phi", type=float)
    parser.add_argument("--n-points", type=int, dest="n_points")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--prune-eps", type=float, dest="prune_eps")
    parser.add_argument("--output-dir", type=Path, dest="output_dir")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--history", help="probe: history as a +/- string, e.g. +-+")
    parser.add_argument("--dump-depth", type=int, dest="dump_depth", help="entropy: also write the depth-n history distribution")
    parser.add_argument("--verbose", action="store_true")
    return parser


def _validate(run):
    try:
        validate_j(run.j)
    except ValueError as e:
        raise ConfigError(f"Invalid j: {e}") from e
    if not 1 <= run.N <= MAX_DEPTH:
        raise ConfigError(f"Invalid N: number of measurements must be in [1, {MAX_DEPTH}], got {run.N}")
    if run.n_points < 1:
        raise ConfigError(f"Invalid n_points: must be >= 1, got {run.n_points}")
    if not run.prune_eps >= 0.0:
        raise ConfigError(f"Invalid prune_eps: must be >= 0, got {run.prune_eps}")
    if run.workers < 1:
        raise ConfigError(f"Invalid workers: must be >= 1, got {run.workers}")
    for name in ("kick_strength", "rotation_angle"):
        if not math.isfinite(getattr(run, name)):
            raise ConfigError(f"Invalid {name}: must be finite")
    if (run.theta is None) != (run.phi is None):
        raise ConfigError("Give both --theta and --phi or neither")
    if run.command == "probe":
        if run.history is None:
            raise ConfigError("probe needs --history, e.g. --history +-+")
        try:
            parse_history(run.history)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    if run.dump_depth is not None and not 1 <= run.dump_depth <= run.N:
        raise ConfigError(f"Invalid dump depth {run.dump_depth}: must be in [1, N={run.N}]")


def parse_config(argv, config_path=None, environ=None):
    """
    Builds a RunConfig from flags, an optional config file and the defaults.

    Precedence: flags > KICKED_TOP_OUTPUT_DIR (output dir only) > --config
    file (or config_path) > repository config.json.

    Raises:
        ConfigError: invalid value or unknown key
        ConfigFileError: config file missing or unreadable
    """
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)

    settings = load_config(DEFAULT_CONFIG_PATH)
    user_path = args.config if args.config is not None else config_path
    if user_path is not None:
        settings = merge_user_config(settings, load_config(user_path), source=f"'{user_path}'")

    if environ.get(OUTPUT_DIR_ENV):
        settings = apply_overrides(settings, {"output_settings.output_dir": environ[OUTPUT_DIR_ENV]})

    flag_overrides = {path: getattr(args, name) for name, path in FLAG_PATHS.items() if getattr(args, name) is not None}
    if flag_overrides.get("output_settings.output_dir") is not None:
        flag_overrides["output_settings.output_dir"] = str(flag_overrides["output_settings.output_dir"])
    settings = apply_overrides(settings, flag_overrides)
    flat = flatten_config(settings)

    try:
        run = RunConfig(
            command=args.command,
            j=float(flat["top_settings.j"]),
            kick_strength=float(flat["top_settings.kick_strength"]),
            rotation_angle=float(flat["top_settings.rotation_angle"]),
            N=int(flat["record_settings.n_measurements"]),
            theta=args.theta,
            phi=args.phi,
            n_points=int(flat["sweep_settings.n_points"]),
            seed=int(flat["sweep_settings.seed"]),
            prune_eps=float(flat["record_settings.prune_eps"]),
            output_dir=Path(flat["output_settings.output_dir"]),
            workers=int(flat["sweep_settings.workers"]),
            history=args.history,
            dump_depth=args.dump_depth,
            verbose=bool(args.verbose or flat.get("debug.verbose", False)),
            settings=settings,
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid configuration value: {e}") from e

    _validate(run)
    return run


@contextmanager
def _open_output(path):
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            yield f
    except OSError as e:
        raise OutputError(f"Cannot write '{path}': {e.strerror or e}") from e


def write_fig1_csv(result, path, digits=17):
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["n", "H_n_R", "H_n_C"])
        for n, h_r, h_c in zip(result.series_R.depths, result.series_R.values, result.series_C.values, strict=True):
            writer.writerow([int(n), format_number(h_r, digits), format_number(h_c, digits)])


def write_fig2_csv(sweep, path, digits=17):
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["index", "x", "y", "z", "theta", "phi", "angle", "r_tilde"])
        for r in sorted(sweep.records, key=lambda rec: rec.index):
            writer.writerow([r.index] + [
                format_number(v, digits)
                for v in (r.point.x, r.point.y, r.point.z, r.theta, r.phi, r.angle_from_fixed_point, r.r_tilde)
            ])


def write_series_csv(series, path, digits=17):
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["n", "H_n_bits", "pruned_mass"])
        for n, h, mass in zip(series.depths, series.values, series.pruned_mass, strict=True):
            writer.writerow([int(n), format_number(h, digits), format_number(mass, digits)])


def write_kick_sweep_csv(result, path, digits=17):
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["kick_strength", "r_tilde", "H_N_bits"])
        for k, r, h in zip(result.kick_strengths, result.r_tildes, result.final_entropies, strict=True):
            writer.writerow([format_number(k, digits), format_number(r, digits), format_number(h, digits)])


def write_ablation_csv(rows, path, digits=17):
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["prune_eps", "H_N_bits", "abs_error_bits", "pruned_mass", "branches", "seconds"])
        for row in rows:
            writer.writerow([
                format_number(row.prune_eps, digits),
                format_number(row.final_entropy, digits),
                format_number(row.entropy_error, digits),
                format_number(row.pruned_mass, digits),
                row.branch_count,
                f"{row.seconds:.6f}",
            ])


def write_summary(sweep, reports, path):
    """Quartile means, rank correlation, linearity and the per-state lower bounds."""
    closest = sweep.closest_to_fixed_point()
    median_rate = sorted(r.r_tilde for r in sweep.records)[len(sweep.records) // 2]
    lines = [
        f"points: {sweep.n_points}",
        f"seed: {sweep.seed} ({sweep.rng_algorithm})",
        f"j: {sweep.params.j:g}, kick_strength: {sweep.params.kick_strength:g}, "
        f"rotation_angle: {sweep.params.rotation_angle:.17g}, N: {sweep.N}",
        "quartile mean r_tilde by angle (nearest to farthest): "
        + ", ".join(f"{q:.17g}" for q in sweep.quartile_means),
        f"rank correlation (angle, r_tilde): {sweep.rank_correlation:.17g}",
        f"linearity R^2 min/median: {sweep.linearity_min:.6f} / {sweep.linearity_median:.6f}",
        f"closest point to fixed point: index {closest.index}, angle {closest.angle_from_fixed_point:.6f}, "
        f"r_tilde {closest.r_tilde:.6f} (median {median_rate:.6f})",
        f"smallest lower bound: {min(reports, key=lambda b: b.r_tilde).text}",
        "",
        "lower bounds per point:",
    ]
    lines.extend(f"{record.index}: {report.text}" for record, report in zip(sweep.records, reports, strict=True))
    with _open_output(path) as f:
        f.write("\n".join(lines) + "\n")


def write_settings(config, path):
    """Writes the resolved nested settings in the layout `--config` accepts."""
    with _open_output(path) as f:
        json.dump(config.to_settings(), f, indent=2)
        f.write("\n")


def write_manifest(manifest, path):
    with _open_output(path) as f:
        json.dump(manifest.to_dict(), f, indent=2, default=str)
        f.write("\n")


def _banner(title):
    print(f"\n{'=' * 70}")
    print(title)
    print(f"{'=' * 70}")


def run(config):
    """
    Dispatches one command, writes its CSVs and manifest.json.

    Returns:
        int: exit status (0 on success)

    Raises:
        OutputError: an output file or directory could not be written
    """
    settings = config.to_settings()
    digits = settings["output_settings"].get("significant_digits", 17)
    runner = ExperimentRunner(settings)
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory '{out}': {e.strerror or e}") from e

    theta_phi = (config.theta, config.phi) if config.theta is not None else runner.chaotic_state
    outputs = []
    pruned = {}
    start = time.perf_counter()

    if config.command == "fig1":
        _banner(f"ENTROPY GROWTH (j={config.j:g}, N={config.N})")
        result = runner.run_fig1()
        write_fig1_csv(result, out / "fig1.csv", digits)
        outputs.append("fig1.csv")
        for label, series in (("R", result.series_R), ("C", result.series_C)):
            rate = rate_estimate(series)
            linearity = linearity_diagnostic(series) if len(series) >= 6 else float("nan")
            print(f"|{label}>: H_N = {series.values[-1]:.6f} bits, R~ = {rate.r_tilde:.6f}, linearity R^2 = {linearity:.4f}")
            print(f"   {rate_lower_bound_report(rate).text}")
            pruned[label] = series.pruned_mass[-1]

    elif config.command == "fig2":
        _banner(f"OCTANT SWEEP ({config.n_points} points, seed {config.seed}, {config.workers} worker(s))")
        sweep = runner.run_fig2()
        reports = runner.bound_reports(sweep)
        write_fig2_csv(sweep, out / "fig2.csv", digits)
        write_summary(sweep, reports, out / "summary.txt")
        outputs.extend(["fig2.csv", "summary.txt"])
        print("Quartile means (near -> far): " + ", ".join(f"{q:.4f}" for q in sweep.quartile_means))
        print(f"Rank correlation: {sweep.rank_correlation:.4f}")
        pruned["sweep_total"] = sweep.pruned_mass_total

    elif config.command == "entropy":
        theta, phi = theta_phi
        _banner(f"ENTROPY SERIES (theta={theta:g}, phi={phi:g})")
        distributions = runner.distributions_for_angles(theta, phi)
        series = series_from_distributions(distributions)
        write_series_csv(series, out / "entropy.csv", digits)
        outputs.append("entropy.csv")
        if config.dump_depth is not None:
            name = f"histories_n{config.dump_depth}.csv"
            try:
                write_distribution_csv(distributions[config.dump_depth - 1], out / name, digits)
            except OSError as e:
                raise OutputError(f"Cannot write '{out / name}': {e.strerror or e}") from e
            outputs.append(name)
        rate = rate_estimate(series)
        print(f"H_N = {series.values[-1]:.6f} bits, {rate_lower_bound_report(rate).text}")
        pruned["series"] = series.pruned_mass[-1]

    elif config.command == "probe":
        theta, phi = theta_phi
        probability = runner.probe(theta, phi, config.history)
        print(f"P({config.history}) = {format_number(probability, digits)}")

    elif config.command == "kick-sweep":
        theta, phi = theta_phi
        _banner(f"KICK-STRENGTH SWEEP (theta={theta:g}, phi={phi:g})")
        result = runner.run_kick_sweep(theta, phi)
        write_kick_sweep_csv(result, out / "kick_sweep.csv", digits)
        outputs.append("kick_sweep.csv")
        for k, r in zip(result.kick_strengths, result.r_tildes, strict=True):
            print(f"  k={k:<6g} R~={r:.6f}")

    elif config.command == "ablation":
        theta, phi = theta_phi
        _banner(f"PRUNING ABLATION (theta={theta:g}, phi={phi:g})")
        rows = runner.run_pruning_ablation(theta, phi)
        write_ablation_csv(rows, out / "ablation.csv", digits)
        outputs.append("ablation.csv")
        for row in rows:
            print(f"  eps={row.prune_eps:<8g} |dH|={row.entropy_error:.3e} branches={row.branch_count:<6d} {row.seconds:.3f}s")
        pruned.update({f"{row.prune_eps:g}": row.pruned_mass for row in rows})

    write_settings(config, out / "settings.json")
    outputs.append("settings.json")

    duration = time.perf_counter() - start
    manifest = RunManifest(
        config=config.echo(),
        version=__version__,
        rng_algorithm=runner.rng_algorithm,
        duration_seconds=duration,
        pruned_mass=pruned,
        outputs=outputs,
    )
    write_manifest(manifest, out / "manifest.json")
    print(f"✓ {config.command} finished in {duration:.2f}s; outputs in {out}")
    return 0
