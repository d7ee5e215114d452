"""Exact intersection theory on iterated blowups and the non-vanishing
conditions A/B/NA/NB(r, q) that constrain dynamical degrees of automorphisms."""

__version__ = "0.1.0"

from .algebra import (
    BaseModel,
    CenterModel,
    CohClass,
    Tower,
    blow_up,
    canonical_class,
    center_in_fiber,
    chern_normal_ci,
    complete_intersection_center,
    curve_center,
    first_chern_restricted,
    integrate,
    make_base,
    point_center,
    pushforward_exc_power,
    segre_from_chern,
    slice_center,
)
from .conditions import (
    ConditionCertificate,
    ConditionId,
    ProbeSystem,
    base_condition_axioms,
    build_probe_system,
    check_inheritance,
    lemma_p4_verdict,
    multiproj_nef_power,
    probe_verdict,
    propagate_conditions,
)
from .dynamics import (
    DegreeProfile,
    DerivationTrace,
    check_log_concavity,
    derive_rigidity,
    duality_flip,
    entropy_and_hyperbolicity,
    hyperkahler_profile,
)
from .errors import ConfigError, MathError, UnsupportedProduct
from .exact import RootReport, UniPoly, binomial, classify_real_roots, resultant, symmetric_function

__all__ = [name for name in dir() if not name.startswith("_")]
