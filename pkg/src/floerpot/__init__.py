"""Disk potentials, Novikov-field critical points and Floer torsion for toric-type fibers."""

from .errors import (BasepointExcluded, BasepointOnFacet, DegenerateJacobian, FloerPotError,
                     InhomogeneousValuations, MissingCertificate, NonTerminating, NoSolution,
                     NoSolutionFound, NotAUnit, ParseError, PrecisionExhausted, PrecisionTooLow,
                     Unbounded, WeightTooSmall)
from .floer import (DisplacementBound, NovikovMatrix, TorsionDecomposition, displacement_bounds,
                    flag_example_report, limit_lambda_bound, torsion_decomposition,
                    wedge_differential)
from .laurent import LaurentPoly, gradient, jacobian
from .novikov import INF, NovikovScalar, T
from .polytope import (Facet, LinearHamiltonian, PiMultiple, Polytope, facet_distances,
                       hofer_norm, monotone_fiber_locus, vertices)
from .potential import (BulkWeight, OutsideTerm, PotentialFunction, PotentialSpec, apply_bulk,
                        build_potential, compactify)
from .solver import (CriticalPoint, CriticalProblem, classify_point, leading_system, newton_lift,
                     solve_leading)

__version__ = "0.1.0"
