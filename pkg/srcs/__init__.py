"""
Kicked-top measurement record modules.

- spin_algebra: spin-j operators, coherent states, Bloch-sphere geometry
- kicked_top: Floquet operator of the kicked top
- measurement_record: branching tree of J_z sign measurements
- chaos_metrics: Shannon entropy of records and the information rate
- experiments: entropy growth, octant sweep, kick and pruning studies
- cli_io: command line, configuration layering and output files
- utils: shared helpers
"""

__version__ = "0.1.0"

__all__ = ['spin_algebra', 'kicked_top', 'measurement_record', 'chaos_metrics', 'experiments', 'cli_io', 'utils']
