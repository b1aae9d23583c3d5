"""Kinetic (monotone-cone) formulation of scalar conservation laws in one space dimension."""
from .cone import (FlatBlockPartition, flat_blocks, interaction_column, interaction_field,
                   moreau_split, project_monotone, project_tangent)
from .flux import FluxModel, make_flux, max_speed, shock_speed
from .grid import Grid
from .kernels import BACKEND
from .kinetic import (DefectMeasure, KineticField, defect_measure, extract_level, lift_function,
                      lift_measure, mollify_x)
from .reference import (ScalarProfile, composite_exact_scl1, exact_riemann_convex, godunov_step)
from .solver import (Diagnostics, Trajectory, contraction_gap, evolve, minimal_selection_gap, step,
                     variational_residual)
from .transport import TransportOperator, advect, cfl_dt

__version__ = "0.1.0"
