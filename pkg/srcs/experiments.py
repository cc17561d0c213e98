"""
Experiment drivers: entropy growth for the regular and chaotic coherent
states, the random octant sweep of the rate against distance from the
elliptic fixed point, and the kick-strength and pruning studies.
"""

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from srcs.chaos_metrics import (
    ENDPOINT,
    EntropySeries,
    RateEstimate,
    entropy_series,
    linearity_diagnostic,
    rate_estimate,
    rate_lower_bound_report,
    series_from_distributions,
)
from srcs.kicked_top import TopParameters, build_floquet
from srcs.measurement_record import BranchingRecord, build_scheme, single_history_probability
from srcs.spin_algebra import (
    BlochPoint,
    angular_distance,
    build_spin_system,
    coherent_mean,
    coherent_state,
    point_to_angles,
)
from srcs.utils import apply_overrides

DEFAULT_RNG_ALGORITHM = "PCG64"
PROGRESS_EVERY = 50


@dataclass(frozen=True)
class Fig1Result:
    """Entropy growth for the regular (R) and chaotic (C) initial states."""

    series_R: EntropySeries
    series_C: EntropySeries
    params: TopParameters
    N: int


@dataclass(frozen=True)
class SweepRecord:
    """One sampled initial state of the octant sweep."""

    index: int
    point: BlochPoint
    theta: float
    phi: float
    angle_from_fixed_point: float
    r_tilde: float
    linearity: float
    pruned_mass: float = 0.0


@dataclass(frozen=True)
class SweepResult:
    """Octant sweep records (sorted by sample index) and their summary statistics."""

    records: list
    seed: int
    n_points: int
    quartile_means: tuple
    rank_correlation: float
    linearity_min: float
    linearity_median: float
    rng_algorithm: str
    params: TopParameters
    N: int
    fixed_point: BlochPoint

    @property
    def pruned_mass_total(self):
        return math.fsum(r.pruned_mass for r in self.records)

    def closest_to_fixed_point(self):
        return min(self.records, key=lambda r: r.angle_from_fixed_point)


@dataclass(frozen=True)
class KickSweepResult:
    """Rate of information production as a function of kick strength."""

    theta: float
    phi: float
    kick_strengths: tuple
    r_tildes: tuple
    final_entropies: tuple
    N: int


@dataclass(frozen=True)
class AblationRow:
    """Effect of one pruning threshold on H_N, cost and dropped mass."""

    prune_eps: float
    final_entropy: float
    entropy_error: float
    pruned_mass: float
    branch_count: int
    seconds: float


def make_rng(seed, rng_algorithm=DEFAULT_RNG_ALGORITHM):
    """numpy Generator over a named bit generator (PCG64, Philox, SFC64, MT19937, ...)."""
    bit_generator = getattr(np.random, rng_algorithm, None)
    if not (isinstance(bit_generator, type) and issubclass(bit_generator, np.random.BitGenerator)):
        raise ValueError(f"Unknown bit generator {rng_algorithm!r}")
    return np.random.Generator(bit_generator(seed))


def sample_octant(n_points, seed, rng_algorithm=DEFAULT_RNG_ALGORITHM):
    """
    Points uniform in area on the open octant x > 0, y > 0, z < 0.

    z is uniform on (-1, 0) and the azimuth uniform on (0, pi/2); by
    Archimedes' theorem this is uniform in area. Draws are consumed in point
    order, so a smaller n_points gives a prefix of a larger one.
    """
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")

    rng = make_rng(seed, rng_algorithm)
    points = []
    while len(points) < n_points:
        u, v = rng.random(2)
        z = u - 1.0
        azimuth = v * (np.pi / 2)
        r = math.sqrt(1.0 - z * z)
        x, y = r * math.cos(azimuth), r * math.sin(azimuth)
        # boundary draws (u = 0 or v = 0) are rejected
        if x > 0.0 and y > 0.0 and z < 0.0:
            points.append(BlochPoint.from_vector((x, y, z)))
    return points


def quartile_means(angles, r_tildes):
    """Mean rate within each quarter of the records ranked by angle (nearest first)."""
    angles = np.asarray(angles, dtype=float)
    r_tildes = np.asarray(r_tildes, dtype=float)
    order = np.argsort(angles, kind="stable")
    return tuple(float(np.mean(r_tildes[chunk])) if len(chunk) else float("nan") for chunk in np.array_split(order, 4))


def rank_correlation(angles, r_tildes):
    """Spearman rank correlation between angle and rate."""
    if len(angles) < 2:
        return float("nan")
    rho, _ = spearmanr(angles, r_tildes)
    return float(rho)


def _evaluate_point(task):
    """Rate, linearity and pruned mass for one coherent state; top-level so worker processes can pickle it."""
    sys, U, scheme, theta, phi, N, prune_eps = task
    psi0 = coherent_state(sys, theta, phi)
    series = entropy_series(psi0, U, scheme, N, prune_eps)
    linearity = linearity_diagnostic(series) if len(series) >= 6 else float("nan")
    return rate_estimate(series).r_tilde, linearity, series.pruned_mass[-1]


class ExperimentRunner:
    """
    Runs the kicked-top experiments from a config dict.
    """

    def __init__(self, config):
        # Store configuration
        self.config = config

        record_cfg = config["record_settings"]
        states_cfg = config["initial_states"]
        sweep_cfg = config["sweep_settings"]
        debug_cfg = config.get("debug", {})

        self.params = TopParameters.from_config(config)
        self.n_measurements = record_cfg["n_measurements"]
        self.prune_eps = record_cfg.get("prune_eps", 0.0)

        self.regular_state = (states_cfg["regular"]["theta"], states_cfg["regular"]["phi"])
        self.chaotic_state = (states_cfg["chaotic"]["theta"], states_cfg["chaotic"]["phi"])
        self.fixed_point = (states_cfg["fixed_point"]["theta"], states_cfg["fixed_point"]["phi"])

        self.n_points = sweep_cfg["n_points"]
        self.seed = sweep_cfg["seed"]
        self.workers = sweep_cfg.get("workers", 1)
        self.rng_algorithm = sweep_cfg.get("rng_algorithm", DEFAULT_RNG_ALGORITHM)
        self.kick_strengths = tuple(sweep_cfg.get("kick_strengths", ()))
        self.prune_eps_values = tuple(sweep_cfg.get("prune_eps_values", ()))

        self.debug_verbose = debug_cfg.get("verbose", False)

        self.last_run_time = 0.0

    def _params_for(self, j=None, **changes):
        if j is not None:
            changes["j"] = j
        return dataclasses.replace(self.params, **changes) if changes else self.params

    def _dynamics(self, params):
        sys = build_spin_system(params.j)
        return sys, build_floquet(params, sys), build_scheme(sys)

    def _record(self, N, prune_eps=None):
        overrides = {"record_settings.n_measurements": N}
        if prune_eps is not None:
            overrides["record_settings.prune_eps"] = prune_eps
        return BranchingRecord(apply_overrides(self.config, overrides))

    def entropy_for_angles(self, theta, phi, j=None, N=None):
        """EntropySeries of the coherent state |j,theta,phi> under the configured dynamics."""
        N = self.n_measurements if N is None else N
        sys, U, scheme = self._dynamics(self._params_for(j))
        record = self._record(N)
        return series_from_distributions(record.run(coherent_state(sys, theta, phi), U, scheme))

    def distributions_for_angles(self, theta, phi, j=None, N=None):
        """Per-depth HistoryDistributions of |j,theta,phi>."""
        N = self.n_measurements if N is None else N
        sys, U, scheme = self._dynamics(self._params_for(j))
        return self._record(N).run(coherent_state(sys, theta, phi), U, scheme)

    def probe(self, theta, phi, history, j=None):
        """Probability of one +/- history for |j,theta,phi>."""
        sys, U, scheme = self._dynamics(self._params_for(j))
        return single_history_probability(coherent_state(sys, theta, phi), U, scheme, history)

    def run_fig1(self, j=None, N=None):
        """Entropy series for the regular and chaotic initial states."""
        N = self.n_measurements if N is None else N
        params = self._params_for(j)
        start = time.perf_counter()

        series_R = self.entropy_for_angles(*self.regular_state, j=params.j, N=N)
        series_C = self.entropy_for_angles(*self.chaotic_state, j=params.j, N=N)

        self.last_run_time = time.perf_counter() - start
        if self.debug_verbose:
            print(f"Entropy growth done in {self.last_run_time:.2f}s: "
                  f"H_N(R)={series_R.values[-1]:.6f}, H_N(C)={series_C.values[-1]:.6f}")

        return Fig1Result(series_R=series_R, series_C=series_C, params=params, N=N)

    def run_fig2(self, n_points=None, j=None, N=None, seed=None, workers=None):
        """
        Rate of information production for random coherent states in the octant.

        Sampling is done up front in serial; the per-point evaluations may run
        in worker processes, and records come back in sample order.
        """
        n_points = self.n_points if n_points is None else n_points
        N = self.n_measurements if N is None else N
        seed = self.seed if seed is None else seed
        workers = self.workers if workers is None else workers

        params = self._params_for(j)
        sys, U, scheme = self._dynamics(params)
        fixed_direction = coherent_mean(sys, coherent_state(sys, *self.fixed_point))

        start = time.perf_counter()
        points = sample_octant(n_points, seed, self.rng_algorithm)
        angles = [point_to_angles(p) for p in points]
        tasks = [(sys, U, scheme, theta, phi, N, self.prune_eps) for theta, phi in angles]

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_evaluate_point, tasks, chunksize=max(1, n_points // (4 * workers))))
        else:
            outcomes = []
            for i, task in enumerate(tasks, 1):
                outcomes.append(_evaluate_point(task))
                if self.debug_verbose and i % PROGRESS_EVERY == 0:
                    print(f"  {i}/{n_points} points evaluated ({time.perf_counter() - start:.1f}s)")

        records = []
        for index, (point, (theta, phi), (r_tilde, linearity, pruned)) in enumerate(zip(points, angles, outcomes, strict=True)):
            records.append(SweepRecord(
                index=index,
                point=point,
                theta=theta,
                phi=phi,
                angle_from_fixed_point=angular_distance(point, fixed_direction),
                r_tilde=r_tilde,
                linearity=linearity,
                pruned_mass=pruned,
            ))

        angle_values = [r.angle_from_fixed_point for r in records]
        rates = [r.r_tilde for r in records]
        linearities = np.array([r.linearity for r in records])

        self.last_run_time = time.perf_counter() - start
        if self.debug_verbose:
            print(f"Octant sweep of {n_points} points done in {self.last_run_time:.1f}s")

        return SweepResult(
            records=records,
            seed=seed,
            n_points=n_points,
            quartile_means=quartile_means(angle_values, rates),
            rank_correlation=rank_correlation(angle_values, rates),
            linearity_min=float(np.nanmin(linearities)) if np.any(np.isfinite(linearities)) else float("nan"),
            linearity_median=float(np.nanmedian(linearities)) if np.any(np.isfinite(linearities)) else float("nan"),
            rng_algorithm=self.rng_algorithm,
            params=params,
            N=N,
            fixed_point=fixed_direction,
        )

    def run_kick_sweep(self, theta, phi, kick_strengths=None, j=None, N=None):
        """Endpoint rate for one initial state across kick strengths."""
        kick_strengths = self.kick_strengths if kick_strengths is None else tuple(kick_strengths)
        if not kick_strengths:
            raise ValueError("Kick-strength sweep needs at least one kick strength")
        N = self.n_measurements if N is None else N

        base = self._params_for(j)
        sys = build_spin_system(base.j)
        scheme = build_scheme(sys)
        psi0 = coherent_state(sys, theta, phi)

        r_tildes, finals = [], []
        for k in kick_strengths:
            U = build_floquet(dataclasses.replace(base, kick_strength=k), sys)
            series = entropy_series(psi0, U, scheme, N, self.prune_eps)
            r_tildes.append(rate_estimate(series).r_tilde)
            finals.append(float(series.values[-1]))
            if self.debug_verbose:
                print(f"  k={k:g}: R~={r_tildes[-1]:.6f}")

        return KickSweepResult(
            theta=theta,
            phi=phi,
            kick_strengths=tuple(float(k) for k in kick_strengths),
            r_tildes=tuple(r_tildes),
            final_entropies=tuple(finals),
            N=N,
        )

    def run_pruning_ablation(self, theta, phi, eps_values=None, j=None, N=None):
        """
        H_N, error against the exact tree, dropped mass, final branch count and
        time for each pruning threshold.
        """
        eps_values = self.prune_eps_values if eps_values is None else tuple(eps_values)
        N = self.n_measurements if N is None else N
        sys, U, scheme = self._dynamics(self._params_for(j))
        psi0 = coherent_state(sys, theta, phi)

        exact = series_from_distributions(self._record(N, 0.0).run(psi0, U, scheme))
        exact_final = float(exact.values[-1])

        rows = []
        for eps in eps_values:
            record = self._record(N, eps)
            start = time.perf_counter()
            series = series_from_distributions(record.run(psi0, U, scheme))
            seconds = time.perf_counter() - start
            rows.append(AblationRow(
                prune_eps=float(eps),
                final_entropy=float(series.values[-1]),
                entropy_error=abs(float(series.values[-1]) - exact_final),
                pruned_mass=float(series.pruned_mass[-1]),
                branch_count=record.stats["branch_counts"][-1],
                seconds=seconds,
            ))
        return rows

    def bound_reports(self, sweep):
        """Lower-bound statements for every sweep record."""
        return [rate_lower_bound_report(rate_from_value(r.r_tilde, sweep.N)) for r in sweep.records]


def rate_from_value(r_tilde, N):
    """Wraps a stored endpoint rate back into a RateEstimate."""
    return RateEstimate(r_tilde=r_tilde, n_used=N, method=ENDPOINT)
