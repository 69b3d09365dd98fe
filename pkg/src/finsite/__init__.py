"""Computations with finite sites.

Finite categories with Grothendieck topologies, presheaves and sheaves,
sheafification by the double plus-construction, free sheaf extensions, and
verification that every sheaf's extended-inner-automorphism group matches
the centre of the underlying site.
"""

from .errors import (
    CategoryInvalidError,
    CodomainMismatchError,
    FinsiteError,
    HypothesisViolationError,
    InvalidSieveError,
    NoAmalgamationError,
    NotACongruenceError,
    NotAModelError,
    NotASheafError,
    NotMatchingError,
    ParseError,
    PresheafInvalidError,
    SizeLimitError,
    SortMismatchError,
    UnknownObjectError,
)
from .fincat import (
    CentreElement,
    FinCategory,
    centre,
    full_subcategory,
    hom_set,
    initial_objects,
    validate_category,
)
from .freeext import (
    FreeExtension,
    NormalForm,
    as_generator,
    decide_equal,
    denote,
    free_extension,
    normal_form,
    parse_term,
    reamalgamate,
    subst_map,
)
from .groups import FiniteGroup, finite_group, group_law_violations
from .io import load_presheaf, load_site, presheaf_to_dict, site_to_dict
from .isotropy import (
    IsotropyContext,
    IsotropyElement,
    auto_catalogue,
    centre_embedding,
    check_membership,
    dense_extension,
    extended_action,
    is_inner,
    isotropy_group,
    verify_main_theorem,
)
from .phl import (
    PartialStructure,
    Sequent,
    Signature,
    interpret_term,
    model_to_sheaf,
    quotient_structure,
    satisfies,
    sheaf_signature,
    sheaf_theory,
    sheaf_to_model,
)
from .presheaf import (
    MatchingFamily,
    Presheaf,
    PresheafMap,
    SheafStatus,
    amalgamations,
    ayc_category,
    coproduct,
    is_subcanonical,
    nat_transformations,
    plus_construction,
    quotient_presheaf,
    representable,
    sheaf_status,
    sheafify,
    validate_presheaf,
)
from .site import (
    Sieve,
    Site,
    Topology,
    empty_cover_objects,
    generated_sieve,
    induced_topology,
    pullback_sieve,
    saturate_topology,
    validate_topology,
)

__all__ = [name for name in dir() if not name.startswith("_")]
