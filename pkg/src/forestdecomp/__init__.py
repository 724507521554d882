"""forestdecomp: partition sparse multigraphs into k+1 forests, one of
which has every connected component bounded by d_prime edges."""

from .arboricity import (DensityWitness, brute_force_gamma, exceeds_density,
                         fractional_arboricity)
from .core import (Decomposition, InfeasibleDensity, InternalCheckError,
                   MultiGraph, Params, ParseError, RED, ResidueVector,
                   compute_params, decomposition_violations, red_components,
                   residue)
from .explore import build_exploration, build_legal_order, choose_root
from .instances import (GenSpec, filter_feasible, generate, parse_edge_list,
                        write_edge_list)
from .packing import (ForestPacking, PartitionCertificate, normalize,
                      pack_k_forests, spanning_trees_plus_forest,
                      tnw_violating_partition)
from .paths import apply_special_path, edge_exchange, \
    find_minimal_special_path, split_root_child
from .solver import DecomposeOutcome, SolveResult, run_decompose, solve_core
from .states import drive_and_finish, init_valid_state, main_augment, \
    make_drive_context
from .verify import (DensityCertificate, Report, check_valid_state,
                     density_diagnostics, verify_certificate, verify_partition)

__version__ = "0.1.0"

__all__ = [
    "Decomposition", "DecomposeOutcome", "DensityCertificate",
    "DensityWitness", "ForestPacking", "GenSpec", "InfeasibleDensity",
    "InternalCheckError", "MultiGraph", "Params", "ParseError",
    "PartitionCertificate", "RED", "Report", "ResidueVector", "SolveResult",
    "apply_special_path", "brute_force_gamma", "build_exploration",
    "build_legal_order", "check_valid_state", "choose_root", "compute_params",
    "decomposition_violations", "density_diagnostics", "drive_and_finish",
    "edge_exchange", "exceeds_density", "filter_feasible",
    "find_minimal_special_path", "fractional_arboricity", "generate",
    "init_valid_state", "main_augment", "make_drive_context", "normalize",
    "pack_k_forests", "parse_edge_list", "red_components", "residue",
    "run_decompose", "solve_core", "spanning_trees_plus_forest",
    "split_root_child", "tnw_violating_partition", "verify_certificate",
    "verify_partition", "write_edge_list",
]
