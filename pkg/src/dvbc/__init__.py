"""Distance-vector betweenness centrality: protocol, simulator and oracles."""

from .graph import Graph, GraphError, GraphMetrics, compute_metrics, generate, load_edge_list, read_edge_list
from .metrics import ConvergenceRecord, UndefinedMetricError, convergence_histogram, global_error
from .oracle import ExactCentrality, brandes, brute_force, check_identities, optimal_frequency
from .protocol import CountOverflowError, Message, NodeState, init, receive_fast, receive_reference
from .simulator import NonConvergenceError, Schedule, SimulationRun, record_local_convergence, run

__all__ = [
    "ConvergenceRecord", "CountOverflowError", "ExactCentrality", "Graph", "GraphError", "GraphMetrics",
    "Message", "NodeState", "NonConvergenceError", "Schedule", "SimulationRun", "UndefinedMetricError",
    "brandes", "brute_force", "check_identities", "compute_metrics", "convergence_histogram",
    "generate", "global_error", "init", "load_edge_list", "optimal_frequency", "read_edge_list",
    "receive_fast", "receive_reference", "record_local_convergence", "run",
]

__version__ = "0.1.0"
