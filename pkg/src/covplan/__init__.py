"""Communication- and energy-aware multi-UAV coverage path planning."""

__version__ = "0.1.0"

from .connectivity import radius_at, radius_max_lipschitz, radius_profile_grid
from .energy import PowerModel, mission_energy
from .formation import FormationSpec, formation_paths, formation_radius
from .geometry import Grid, GridSpec, Roi, SensorFootprint, discretize, optimize_alignment
from .objective import ObjectiveConfig, evaluate_candidate
from .optimizer import PruneLedger, TpeState, inner_optimize, outer_optimize, tpe_suggest
from .partition import NonTerminating, darp_partition, sample_seed_vector
from .stc import CoveragePath, rotate_start, stc_loop
from .trajectory import MultiTrajectory, SpeedProfile, sample_trajectory, state_durations
