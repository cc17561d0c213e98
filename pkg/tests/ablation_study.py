"""
Ablation Study: cost and accuracy of branch pruning and threaded steps.

For each setting we measure:
- H_N and its error against the exact tree
- Probability mass dropped
- Number of surviving branches
- Wall time
"""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from srcs.experiments import ExperimentRunner


def load_config():
    with open(Path(__file__).parent.parent / "config.json") as f:
        return json.load(f)


def ablate_pruning(config, label, theta, phi):
    """Sweeps the configured pruning thresholds for one initial state."""
    print(f"\n{'='*60}")
    print(f"PRUNING ABLATION: {label} state (theta={theta}, phi={phi})")
    print(f"{'='*60}")

    rows = ExperimentRunner(config).run_pruning_ablation(theta, phi)

    print(f"{'eps':<10} {'H_N':<12} {'|dH|':<12} {'Pruned':<12} {'Branches':<10} {'Time':<8}")
    print(f"{'-'*60}")
    for row in rows:
        print(f"{row.prune_eps:<10g} {row.final_entropy:<12.6f} {row.entropy_error:<12.3e} "
              f"{row.pruned_mass:<12.3e} {row.branch_count:<10} {row.seconds:.2f}s")

    exact = rows[0]
    print(f"\n{'='*60}")
    for row in rows[1:]:
        speedup = exact.seconds / row.seconds if row.seconds > 0 else float("inf")
        if row.entropy_error < 1e-6 and speedup > 1.5:
            print(f"✅ eps={row.prune_eps:g}: {speedup:.1f}x faster, error {row.entropy_error:.1e} bits")
        elif row.entropy_error >= 1e-3:
            print(f"⚠️  eps={row.prune_eps:g}: error {row.entropy_error:.1e} bits is visible in the figures")
        else:
            print(f"⚖️  eps={row.prune_eps:g}: {speedup:.1f}x, error {row.entropy_error:.1e} bits")

    return rows


def ablate_workers(config, theta, phi, worker_counts=(1, 2, 4)):
    """Times the threaded tree step against the serial one."""
    print(f"\n{'='*60}")
    print("THREADED STEP ABLATION")
    print(f"{'='*60}")

    timings = {}
    for workers in worker_counts:
        config["sweep_settings"]["workers"] = workers
        runner = ExperimentRunner(config)
        start = time.perf_counter()
        series = runner.entropy_for_angles(theta, phi)
        timings[workers] = time.perf_counter() - start
        print(f"  workers={workers}: {timings[workers]:.2f}s (H_N={series.values[-1]:.6f})")

    return timings


def run_all_ablation_tests():
    """Run all ablation studies and print a summary."""
    print("\n" + "="*60)
    print("ABLATION STUDY: PRUNING AND THREADING")
    print("="*60)

    all_start = time.time()
    config = load_config()

    for label in ("regular", "chaotic"):
        state = config["initial_states"][label]
        ablate_pruning(config, label, state["theta"], state["phi"])

    chaotic = config["initial_states"]["chaotic"]
    ablate_workers(config, chaotic["theta"], chaotic["phi"])

    total_time = time.time() - all_start
    print(f"\nTotal study time: {total_time:.1f}s")
    print("="*60)


if __name__ == "__main__":
    run_all_ablation_tests()
