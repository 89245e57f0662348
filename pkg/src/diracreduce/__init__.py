"""Exact-arithmetic computations with linear Dirac structures,
generalized complex structures and their pointwise reduction."""

__version__ = "0.1.0"

from .exactlin import QQi, Subspace  # noqa: F401
from .dirac import DiracStructure, backward, forward, from_bivector, from_form  # noqa: F401
from .gcs import GCStructure, b_transform, eigenbundles, from_eigenpair  # noqa: F401
from .reduction import (  # noqa: F401
    ReductionDatum,
    check_conditions,
    check_gs,
    check_mw,
    check_riemannian,
    classify,
    reduce,
    reduced_eigenspaces,
)
from .kahler import (  # noqa: F401
    GKPair,
    GualtieriQuadruple,
    check_final_theorem,
    from_quadruple,
    gk_check,
    gk_reduce,
    is_generalized_kahler,
)
from .poly import Poly  # noqa: F401
from .chart import (  # noqa: F401
    JField,
    KForm,
    PolyMap,
    PolySection,
    courant_bracket,
    exterior_d,
    involutivity_sample_check,
    lie_derivative,
    nijenhuis_defect,
    phi_related,
)
from .scenario import Scenario, pointwise_datum, sweep  # noqa: F401
