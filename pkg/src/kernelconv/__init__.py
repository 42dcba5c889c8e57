"""Carathéodory kernels of sequences of pointed planar domains, on a grid.

The package rasterizes domain sequences described by shapes and expressions,
computes kernels, pre-kernels and lower limits, diagnoses convergence of
periodic sequences to their kernel, and builds kernels of sublevel-set
sequences from a regularized limit function.
"""

__version__ = "0.1.0"

from .errors import (ClassError, ConsistencyError, EvalError, FieldError, GridError,
                     KernelConvError, MetricError, MonotoneError, ParseError, SpecError,
                     TamenessError, ValidationError)
from .grid import (GridMask, GridSpec, PointedMask, connected_component, count_components,
                   dilate, interior, intersect, masks_equal_within_band, mismatch_band)
from .shapes import (Disc, HalfspaceGraph, Rect, ShapeUnion, SlitDisc, Sublevel, bind,
                     rasterize_shape, shape_from_dict, shape_to_dict)
from .sequences import (ConstantTail, DomainSequenceSpec, FunctionalTail, PeriodicTail,
                        StabilizationReport, TamenessReport, constant_sequence, domain_at,
                        periodic_sequence, tail_intersection, tameness_check)
from .kernel import (ConvergenceVerdict, KernelResult, NormalLimitReport, convergence_check,
                     kernel, kernel_monotone, kernel_of_residue_subset, liminf_set,
                     normal_limit_verify, pre_kernel, residue_subsequence, select_subsequence)
from .sublevel import (FieldGrid, ScalarFieldSeq, boundary_condition_diagnostic, capital_psi,
                       cross_check_sublevel, kernel_from_psi, sample_field, tail_sup,
                       usc_regularize)
from .metrics import closure, directed_hausdorff, distance_field, hausdorff_distance
from .expr import evaluate, free_vars, parse, to_text
from .pgm import read_pgm, write_pgm
from .config import RunConfig, load_config, parse_config
