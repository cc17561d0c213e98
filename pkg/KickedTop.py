"""
Kicked Top - Entry Point

Shannon-entropy growth of the record produced by repeatedly measuring the
sign of J_z on a quantum kicked top, and the lower bound it gives on the
average algorithmic information rate.

Commands:
- fig1: H_n for the regular and chaotic coherent states
- fig2: rate against distance from the elliptic fixed point (octant sweep)
- entropy: H_n for one state (--theta/--phi), optional history dump
- probe: probability of one history (--history=+-+)
- kick-sweep: rate against kick strength
- ablation: effect of the pruning threshold

Histories starting with '-' must be passed as --history=-+-.
"""

import sys

from srcs.cli_io import ConfigError, OutputError, parse_config, run


def main(argv=None):
    """Entry point; returns the process exit status."""
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        print(f"✓ Configuration loaded ({config.command}, j={config.j:g}, N={config.N})")
        return run(config)
    except (ConfigError, OutputError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return e.exit_status


if __name__ == "__main__":
    sys.exit(main())
