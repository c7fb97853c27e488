"""Finite-dimensional 4-algebras (commutative, (a^2)^2 = 0) over Q and F_p:
crossed products, their cohomology, Galois groups and small classifications."""

from .algebra import (
    Algebra,
    abelian,
    derived_algebra,
    dim2_A1,
    dim2_A2,
    example33,
    find_isomorphism,
    heisenberg,
    is_algebra_morphism,
    is_commutative,
    is_four_algebra,
    is_metabelian,
    is_module,
    linearized_identities,
    linearized_identities_batch,
    linearized_identities_by_callback,
    met,
)
from .classify import ClassificationReport, classify, classify_brute, classify_via_twisted
from .cohomology import (
    CFPair,
    CohomologyClassSet,
    CTTriple,
    are_cohomologous,
    build_A_lambda_f,
    cf_pairs,
    ct_triples,
    gh2,
    gh2_A_k,
    gh2_k_V,
    h2_action,
    h2_lambda,
    h2_nab,
    metabelian_h2,
    metabelian_product,
    transform_by_r,
)
from .crossed import (
    CrossedSystem,
    ExtensionData,
    OneDimExtPair,
    crossed_product,
    decompose,
    derived_quotient_extension,
    extension_from_projection,
    one_dim_extension,
    semidirect_product,
    split_sections,
    twisted_product,
    validate_crossed_system,
    verify_reconstruction,
)
from .errors import FourAlgError, SizeGuard
from .exactfield import Field, Matrix, Subspace, kernel_basis, rank, rref, solve_affine
from .morphgal import MorphismPair, galois_group, psi_of_pair, stabilizing_morphisms, verify_galois_isomorphism

__all__ = [name for name in dir() if not name.startswith("_")]
