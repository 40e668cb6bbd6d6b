"""Parallel-toppling Abelian sandpiles on d-dimensional hypercubes,
computed on the sorted fundamental domain of the hyperoctahedral group."""

from .lattice import (
    DISSIPATED,
    SELF,
    CubeSpec,
    SimplexIndexer,
    fold,
    indexer_for,
    neighbor_runs,
    simplex_size,
    sym_neighbors,
)
from .engine_sym import (
    SimplexField,
    SymEngine,
    Trajectory,
    stabilize_sym,
    step_sym,
    sandpile_from_odometer,
    stopping_time,
)
from .engine_ref import stabilize_full, step_full
from .render import PALETTE, SliceImage, orbit_sizes, slice_image, unfold, write_raster
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .report import CheckReport

__version__ = "0.1.0"

__all__ = [
    "CubeSpec",
    "SimplexIndexer",
    "SimplexField",
    "SymEngine",
    "Trajectory",
    "Checkpoint",
    "CheckReport",
    "SliceImage",
    "PALETTE",
    "SELF",
    "DISSIPATED",
    "fold",
    "indexer_for",
    "neighbor_runs",
    "sym_neighbors",
    "simplex_size",
    "stabilize_sym",
    "stabilize_full",
    "step_sym",
    "step_full",
    "sandpile_from_odometer",
    "stopping_time",
    "orbit_sizes",
    "slice_image",
    "unfold",
    "write_raster",
    "load_checkpoint",
    "save_checkpoint",
]
