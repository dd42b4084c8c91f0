"""Rational models of blow-ups: CDGAs, dgmodules, cohomology rings, Massey products."""
from .errors import (CdgaError, HypothesisError, InputError, InternalError, PreconditionError,
                     PresentationError, ValidationError)
from .linalg import Matrix, Q, Subspace, kernel_basis, quotient_basis, solve
from .algebra import (DegreewiseAlgebra, Element, Presentation, ValidationReport, cdga_from_presentation,
                      free_extension, graded_algebra, rational_point, truncated_polynomial, validate)
from .modules import (DgModule, HomComplex, HomotopyWitness, Morphism, algebra_map, hom_complex,
                      homotopy_between, mapping_cone, semi_trivial_cone_cdga, suspension)
from .cohomology import (Cohomology, CohomologyRing, MasseyReport, PoincareResult, cohomology,
                         cup_structure, induced_map, is_quasi_iso, massey_triple, poincare_check)
from .blowup import (BlowupModel, ChernData, EmbeddingModel, SymplecticEmbeddingData, blowup_model,
                     chern_normal, complement_model, omega_complement, projectivization_model,
                     shriek_cpn, shriek_solve)
from .presentation import (BlowupPresentation, RingFingerprint, blowup_presentation, compare_with_direct,
                           cp5_blowup_presentation, cp5_relations, cp5_second_model,
                           cp5_separating_invariant, fingerprint, presentation_from_model, quotient_ring)

__version__ = "0.1.0"
