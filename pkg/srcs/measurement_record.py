"""
Exact measurement-record probabilities for the kicked top.

Each period applies the Floquet operator and then the binary projective
measurement {P+, P-} of the sign of J_z. The full tree of histories is grown
layer by layer; the squared norm of each unnormalized branch vector is the
probability of its history.

History encoding: '+' -> 1, '-' -> 0, most-significant bit = first measurement.
"""

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from srcs.utils import format_number, history_key, history_to_string, parse_history

MAX_DEPTH = 63

_BITS = np.array([0, 1], dtype=np.uint64)


@dataclass(frozen=True, eq=False)
class MeasurementScheme:
    """Diagonal projectors onto m >= 0 (P+) and m < 0 (P-)."""

    p_plus: np.ndarray
    p_minus: np.ndarray

    @property
    def plus_mask(self):
        return np.diag(self.p_plus)

    @property
    def minus_mask(self):
        return np.diag(self.p_minus)


@dataclass(frozen=True, eq=False)
class BranchLayer:
    """
    All surviving branches at record depth n.

    keys are sorted ascending; vectors[i] is the unnormalized state for
    history keys[i]; probabilities[i] = |vectors[i]|^2. pruned_mass is the
    total probability dropped up to and including this depth.
    """

    depth: int
    keys: np.ndarray
    vectors: np.ndarray
    probabilities: np.ndarray
    pruned_mass: float = 0.0

    @classmethod
    def initial(cls, psi0):
        vector = np.asarray(psi0.amplitudes, dtype=complex)[None, :]
        return cls(
            depth=0,
            keys=np.zeros(1, dtype=np.uint64),
            vectors=vector,
            probabilities=np.array([np.vdot(vector[0], vector[0]).real]),
        )

    def __len__(self):
        return self.keys.shape[0]

    def histories(self):
        return [history_to_string(k, self.depth) for k in self.keys]

    def distribution(self):
        return HistoryDistribution(
            depth=self.depth,
            keys=self.keys,
            probabilities=self.probabilities,
            pruned_mass=self.pruned_mass,
        )


@dataclass(frozen=True, eq=False)
class HistoryDistribution:
    """Probabilities of length-n histories, keyed by packed history integers (ascending)."""

    depth: int
    keys: np.ndarray
    probabilities: np.ndarray
    pruned_mass: float = 0.0

    def __len__(self):
        return self.keys.shape[0]

    def total(self):
        return math.fsum(self.probabilities)

    def probability(self, history):
        """Probability of one history; histories that were pruned or have zero weight give 0."""
        bits = parse_history(history)
        if len(bits) != self.depth:
            raise ValueError(f"History of length {len(bits)} queried on a depth-{self.depth} distribution")
        key = np.uint64(history_key(bits))
        index = np.searchsorted(self.keys, key)
        if index < len(self.keys) and self.keys[index] == key:
            return float(self.probabilities[index])
        return 0.0

    def as_dict(self):
        """{'+-+': p, ...} in key order."""
        return {history_to_string(k, self.depth): float(p) for k, p in zip(self.keys, self.probabilities, strict=True)}

    def marginal(self):
        """Sums out the last measurement, giving the depth n-1 distribution."""
        if self.depth < 1:
            raise ValueError("Cannot marginalize a depth-0 distribution")
        parents = self.keys >> np.uint64(1)
        parent_keys, inverse = np.unique(parents, return_inverse=True)
        sums = np.zeros(parent_keys.shape[0])
        np.add.at(sums, inverse, self.probabilities)
        return HistoryDistribution(self.depth - 1, parent_keys, sums, self.pruned_mass)


def build_scheme(sys):
    """P+ projects onto m >= 0 (m = 0 included for integer j), P- onto m < 0."""
    plus = (sys.m >= 0).astype(float)
    p_plus = np.diag(plus)
    p_minus = np.diag(1.0 - plus)
    p_plus.flags.writeable = False
    p_minus.flags.writeable = False
    return MeasurementScheme(p_plus=p_plus, p_minus=p_minus)


def _branch(vectors, matrix, minus_mask, plus_mask):
    """Children of a block of parents, interleaved (-, +) per parent."""
    evolved = vectors @ matrix.T
    children = np.empty((evolved.shape[0], 2, evolved.shape[1]), dtype=complex)
    children[:, 0, :] = evolved * minus_mask
    children[:, 1, :] = evolved * plus_mask
    return children.reshape(-1, evolved.shape[1])


def step(layer, U, scheme, prune_eps=0.0, workers=1):
    """
    Advances every branch by one kick and one measurement.

    Each parent v yields P-.U.v and P+.U.v. Children with zero norm are
    dropped; with prune_eps > 0, children with |v|^2 < prune_eps are dropped
    too and their mass is added to pruned_mass.

    Args:
        layer: BranchLayer at depth n
        U: FloquetOperator
        scheme: MeasurementScheme
        prune_eps: Pruning threshold on squared norm (0 keeps everything)
        workers: Threads used for the matrix products

    Returns:
        BranchLayer at depth n + 1
    """
    if prune_eps < 0:
        raise ValueError(f"prune_eps must be >= 0, got {prune_eps}")
    if layer.depth >= MAX_DEPTH:
        raise ValueError(f"History keys support at most {MAX_DEPTH} measurements")

    minus_mask, plus_mask = scheme.minus_mask, scheme.plus_mask

    if workers > 1 and len(layer) >= 2 * workers:
        blocks = np.array_split(layer.vectors, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda block: _branch(block, U.matrix, minus_mask, plus_mask), blocks))
        children = np.concatenate(parts)
    else:
        children = _branch(layer.vectors, U.matrix, minus_mask, plus_mask)

    # parents ascending => (2h, 2h+1) interleaving keeps children ascending
    keys = ((layer.keys[:, None] << np.uint64(1)) | _BITS).ravel()
    norms2 = np.einsum("ij,ij->i", children.real, children.real) + np.einsum("ij,ij->i", children.imag, children.imag)

    keep = norms2 >= prune_eps if prune_eps > 0 else norms2 > 0.0
    dropped = math.fsum(norms2[~keep]) if not keep.all() else 0.0

    return BranchLayer(
        depth=layer.depth + 1,
        keys=keys[keep],
        vectors=children[keep],
        probabilities=norms2[keep],
        pruned_mass=layer.pruned_mass + dropped,
    )


def _check_inputs(psi0, U, N):
    if N < 1 or N > MAX_DEPTH:
        raise ValueError(f"Number of measurements must be in [1, {MAX_DEPTH}], got {N}")
    if psi0.dim != U.dim:
        raise ValueError(f"Initial state has dimension {psi0.dim} but U has dimension {U.dim}")


def history_distribution(psi0, U, scheme, N, prune_eps=0.0, workers=1):
    """
    Distributions of measurement histories for depths 1..N.

    The depth-n distribution is the marginal of the depth-N one over the
    first n outcomes.

    Returns:
        list: HistoryDistribution per depth, index 0 = depth 1
    """
    _check_inputs(psi0, U, N)

    layer = BranchLayer.initial(psi0)
    distributions = []
    for _ in range(N):
        layer = step(layer, U, scheme, prune_eps, workers)
        distributions.append(layer.distribution())
    return distributions


def single_history_probability(psi0, U, scheme, history):
    """
    |P_{Z_N} U ... P_{Z_1} U psi0|^2 for one history.

    Args:
        history: '+'/'-' string or sequence of bits (1 = '+')
    """
    bits = parse_history(history)
    v = np.asarray(psi0.amplitudes, dtype=complex)
    if v.shape[0] != U.dim:
        raise ValueError(f"Initial state has dimension {v.shape[0]} but U has dimension {U.dim}")
    masks = (scheme.minus_mask, scheme.plus_mask)
    for b in bits:
        v = (U.matrix @ v) * masks[b]
    return float(np.vdot(v, v).real)


def write_distribution_csv(dist, path, digits=17):
    """Writes history (as +/- string), probability rows in key order."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["history", "probability"])
        for k, p in zip(dist.keys, dist.probabilities, strict=True):
            writer.writerow([history_to_string(k, dist.depth), format_number(p, digits)])


class BranchingRecord:
    """
    Configured driver for the history tree.

    Reads prune_eps from record_settings and the worker count from
    sweep_settings, and keeps per-depth statistics of the last run.
    """

    def __init__(self, config):
        record_cfg = config["record_settings"]
        sweep_cfg = config.get("sweep_settings", {})
        debug_cfg = config.get("debug", {})

        self.n_measurements = record_cfg["n_measurements"]
        self.prune_eps = record_cfg.get("prune_eps", 0.0)
        self.workers = sweep_cfg.get("workers", 1)
        self.debug_verbose = debug_cfg.get("verbose", False)

        self.stats = {}
        self.reset_stats()

    def reset_stats(self):
        """Clears the statistics of the previous run."""
        self.stats = {"branch_counts": [], "step_times": [], "pruned_mass": []}

    def run(self, psi0, U, scheme, N=None):
        """
        Grows the tree to depth N (default: configured n_measurements).

        Returns:
            list: HistoryDistribution per depth 1..N
        """
        N = self.n_measurements if N is None else N
        _check_inputs(psi0, U, N)
        self.reset_stats()

        layer = BranchLayer.initial(psi0)
        distributions = []
        for depth in range(1, N + 1):
            start = time.perf_counter()
            layer = step(layer, U, scheme, self.prune_eps, self.workers)
            elapsed = time.perf_counter() - start

            self.stats["branch_counts"].append(len(layer))
            self.stats["step_times"].append(elapsed)
            self.stats["pruned_mass"].append(layer.pruned_mass)
            distributions.append(layer.distribution())

            if self.debug_verbose:
                print(f"Completed depth {depth}: {len(layer)} branches, "
                      f"pruned mass {layer.pruned_mass:.3e}, {elapsed * 1000:.1f} ms")

        return distributions
