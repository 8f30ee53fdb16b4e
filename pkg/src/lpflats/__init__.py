"""Robust recovery of multiple linear subspaces by lp energy minimization.

The library models data as a mixture of near-subspace components plus
outliers, minimizes the sum of p-th powers of point-to-nearest-subspace
distances, and ships the theoretical constants (recoverability thresholds,
noise bounds) needed to predict when the global minimizer equals the
planted arrangement.
"""

from lpflats._kernels import BACKEND
from lpflats.energy import (
    EnergyValues,
    d_matrix,
    d_matrix_batch,
    dataset_energy,
    directional_derivative,
    distances_to_tuple,
    first_order_residual,
    point_energy,
    region_perturbation_hypotheses,
    voronoi_labels,
    voronoi_symmetric_difference,
)
from lpflats.experiments import (
    SweepConfig,
    SweepResult,
    TrialResult,
    phase_transition_sweep,
    run_recovery_trial,
)
from lpflats.grassmann import (
    CapabilityError,
    Subspace,
    dist_grassmann,
    dist_tuple,
    geodesic,
    line2d,
    line2d_angle,
    orthogonal_subtraction,
    principal_angles,
    random_subspace,
    recovery_distance,
)
from lpflats.hlm import (
    Dataset,
    HLMModel,
    InlierSpec,
    NoiseSpec,
    OutlierSpec,
    exact_recovery_condition,
    noise_recovery_bounds,
    psi,
    psi_inverse,
    sample,
    scenario,
    tau0,
    tau0_lower_bound_uniform,
    tau0_value,
)
from lpflats.optimize import (
    GridSpec,
    OptResult,
    fit_subspace_lp,
    grid_search_global,
    local_min_certificate,
    lp_kflats,
    multi_restart,
    restricted_best_fit_check,
)
from lpflats.properties import PROPERTY_CHECKS, PropertyResult, run_property_suite
from lpflats.seeding import derive_seed
from lpflats.serialize import (
    load_dataset,
    model_from_config,
    model_to_config,
    save_dataset_binary,
    save_dataset_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapabilityError",
    "Dataset",
    "EnergyValues",
    "GridSpec",
    "HLMModel",
    "InlierSpec",
    "NoiseSpec",
    "OptResult",
    "OutlierSpec",
    "PROPERTY_CHECKS",
    "PropertyResult",
    "Subspace",
    "SweepConfig",
    "SweepResult",
    "TrialResult",
    "__version__",
    "d_matrix",
    "d_matrix_batch",
    "dataset_energy",
    "derive_seed",
    "directional_derivative",
    "dist_grassmann",
    "dist_tuple",
    "distances_to_tuple",
    "exact_recovery_condition",
    "first_order_residual",
    "fit_subspace_lp",
    "geodesic",
    "grid_search_global",
    "line2d",
    "line2d_angle",
    "load_dataset",
    "local_min_certificate",
    "lp_kflats",
    "model_from_config",
    "model_to_config",
    "multi_restart",
    "noise_recovery_bounds",
    "orthogonal_subtraction",
    "phase_transition_sweep",
    "point_energy",
    "principal_angles",
    "psi",
    "psi_inverse",
    "random_subspace",
    "recovery_distance",
    "region_perturbation_hypotheses",
    "restricted_best_fit_check",
    "run_property_suite",
    "run_recovery_trial",
    "sample",
    "save_dataset_binary",
    "save_dataset_csv",
    "scenario",
    "tau0",
    "tau0_lower_bound_uniform",
    "tau0_value",
    "voronoi_labels",
    "voronoi_symmetric_difference",
]
