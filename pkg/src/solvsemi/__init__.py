"""Separation and density computations in the solvable groups R^(m-1) x G_n.

The package decides whether finite subsets are separated (contained in a
maximal subsemigroup), constructs product limits, certifies multiplicative
density through integer-orbit independence data, reproduces the stock
example semigroups, and emits minimal generating sets.
"""

__version__ = "0.1.0"

from .scalars import (LeavesSpanError, Scalar, SymbolTable, TableMismatchError,
                      fresh_symbols, parse_scalar, format_scalar, rational,
                      z_linearly_independent)
from .groups import (AlgebraElement, GroupElement, GroupShape, distance,
                     element, exp_map, g1, identity, inverse, log_map, power,
                     product, structure_isomorphism)
from .automorphisms import (Composite, NormalizationError, TypeA, TypeB, TypeC,
                            apply, inverse_automorphism, normalize_structure,
                            normalizing_type_c)
from .separation import (SeparationVerdict, TypeIFunctional, TypeIIFunctional,
                         boundary_slope, classify_hyperplane_subalgebras,
                         decide_separation, euclidean_interior,
                         g1_separation_oracle, quadrant_of)
from .limits import (ConvergenceTrace, LimitRequest, ProjectionSeparatedError,
                     limit_element, realize_limit, trace_to_csv)
from .density import (DensityCertificate, GeneratorSpec, KroneckerCertificate,
                      PipelineError, SeparatedInputError,
                      construct_minimal_generators, densify_euclidean,
                      densify_hmn, kronecker_dense, minimal_count, symmetrize,
                      torus_orbit_covers_grid, verify_certificate)
from .explorer import (BuiltinExample, SemigroupPredicate, WordOrbit,
                       builtin_example, check_predicate, enumerate_words,
                       export_boundary_curves_csv, export_orbit_csv,
                       quadrant_witnesses)
from .documents import (DocumentError, InputDocument, element_ref,
                        load_document, parse_document, serialize_document)
