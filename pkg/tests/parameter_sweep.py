"""
Parameter sweep utility for the kicked top.

Sweeps one config parameter (dotted path) and reports the rate of information
production of the regular and chaotic states at each value.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from srcs.chaos_metrics import rate_estimate
from srcs.experiments import ExperimentRunner
from srcs.utils import apply_overrides

SWEEPS = {
    "kick": ("top_settings.kick_strength", [0.5, 1.0, 2.0, 3.0, 4.0, 6.0]),
    "spin": ("top_settings.j", [6, 9, 12, 15, 18]),
    "depth": ("record_settings.n_measurements", [8, 10, 12, 14, 15]),
}


class ParameterSweep:
    """
    Sweeps single parameters of the base configuration.
    """

    def __init__(self, base_config_path=None):
        path = base_config_path or Path(__file__).parent.parent / "config.json"
        with open(path) as f:
            self.base_config = json.load(f)

    def sweep_single_parameter(self, param_path, values):
        """
        Sweep a single parameter through different values.

        Args:
            param_path: Path to parameter (e.g., "top_settings.kick_strength")
            values: List of values to test

        Returns:
            list: (value, R~ regular, R~ chaotic) per value
        """
        print(f"\n{'='*70}")
        print(f"PARAMETER SWEEP: {param_path}")
        print(f"{'='*70}")
        print(f"{'Value':<12} {'R~ regular':<14} {'R~ chaotic':<14} {'Gap':<10}")
        print(f"{'-'*70}")

        results = []
        for value in values:
            runner = ExperimentRunner(apply_overrides(self.base_config, {param_path: value}))
            fig1 = runner.run_fig1()
            r_reg = rate_estimate(fig1.series_R).r_tilde
            r_cha = rate_estimate(fig1.series_C).r_tilde
            results.append((value, r_reg, r_cha))
            print(f"{value!s:<12} {r_reg:<14.6f} {r_cha:<14.6f} {r_cha - r_reg:+.6f}")

        print(f"{'='*70}\n")
        return results


def main():
    name = sys.argv[1] if len(sys.argv) > 1 else "kick"
    if name not in SWEEPS:
        print(f"ERROR: unknown sweep '{name}' (choose from {', '.join(SWEEPS)})", file=sys.stderr)
        sys.exit(2)
    param_path, values = SWEEPS[name]
    ParameterSweep().sweep_single_parameter(param_path, values)


if __name__ == "__main__":
    main()
