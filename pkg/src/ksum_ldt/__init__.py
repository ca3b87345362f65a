"""k-SUM and k-LDT through a sign-of-linear-form oracle.

The solvers never see the input values: every access is a linear query
recorded in a transcript.  Modes: point location with verify-and-retry
pruning (:func:`solve`), its two-phase variant with query-free kernel
pruning, and a blocking driver that caps the number of terms per query.
"""

from .blocking import BlockPartition, build_partition, enumerate_hit_cells, solve_blocked
from .geometry import Hyperplane, Simplex
from .instance import KSumInstance, instance_from_values
from .kernels import (brute_force_decide, double_ksum_enumerate, meet_in_middle_decide,
                      multiple_ksum_decide, multiple_ksum_enumerate)
from .oracle import LinearQuery, QueryOracle, QueryTranscript
from .sampling import build_table, draw_net, net_size
from .simplex_builder import build_simplex
from .solver import RetryLimitExceeded, SolveConfig, SolverError, SolverReport, solve, solve_two_phase

__all__ = [
    "BlockPartition", "Hyperplane", "KSumInstance", "LinearQuery", "QueryOracle", "QueryTranscript",
    "RetryLimitExceeded", "Simplex", "SolveConfig", "SolverError", "SolverReport",
    "brute_force_decide", "build_partition", "build_simplex", "build_table", "double_ksum_enumerate",
    "draw_net", "enumerate_hit_cells", "instance_from_values", "meet_in_middle_decide",
    "multiple_ksum_decide", "multiple_ksum_enumerate", "net_size", "solve", "solve_blocked",
    "solve_two_phase",
]
