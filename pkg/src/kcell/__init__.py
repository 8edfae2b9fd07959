"""K-cells of stationary Poisson hyperplane processes.

Simulation of the cell cut out around a convex body K by the hyperplanes
that miss it, together with the mean width, hitting functional and facet
number of that cell and the limit constants they approach.
"""

from .asymptotics import LimitTargets, c_d, F_functional, G_functional, theorem_targets
from .cell import Cell, build_cell, cell_from_halfspaces, cell_support, dual_hull_reconstruct, facet_count
from .directional import Atomic, Cosine2, Isotropic, parse_distribution, phi, sample_direction
from .functionals import FunctionalSample, evaluate, hitting_diff, mean_width, volume
from .geometry import Ball, Cube, Ellipsoid, Hyperplane, Polytope, Simplex, parse_body
from .harness import ExperimentConfig, ExperimentResult, rate_fit, run_experiment
from .process import ProcessConfig, rng_stream, sample_annulus, sample_window

__version__ = "0.1.0"
