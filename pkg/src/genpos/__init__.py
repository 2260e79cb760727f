"""Hilbert functions and minimal generators of ideals of points in
products of projective spaces, with exact arithmetic."""
from .exactla import Echelon, Fp, Matrix, kernel_basis, rank, rref, span_dim
from .genanalysis import (
    BruteForceResult, DegenerateInputError, GeneralDegreeBound, GeneratorReport,
    NotGenericError, ScanRow, ThreePointReport, brute_force_nu, family_cells,
    general_generator_degrees, growth_law, k2_cells, nu, predicted_w_dim, scan,
    upper_bound, v_bound, verify_thm55,
)
from .multidegree import (
    DegreeSetReport, DimensionMismatch, compute_degree_sets, graded_dim, leq,
    minimal_elements, monomials_of_degree,
)
from .points import (
    GenericityCertificate, IdealSlice, PointSet, SamplingError, evaluation_matrix,
    hilbert, ideal_slice, is_generic_position, load_points, multiply_slice,
    projection_sizes, random_generic_point_set, random_point_set, save_points, w_dim,
)

__version__ = "0.1.0"
