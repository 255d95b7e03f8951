"""Exact Dempster-Shafer evidence toolkit with frequency-based interpretations."""

from .combination import (
    CombinationResult,
    condition,
    cylinder,
    dempster_combine,
    mass_from_belief,
    simple_support,
    vacuous_extension,
)
from .errors import *  # noqa: F401,F403
from .frame import (
    GENERALIZED,
    STRICT,
    Frame,
    MassFunction,
    Subset,
    belief,
    commonality,
    make_mass,
    plausibility,
    product_frame,
)
from .gamma import (
    DatasetTable,
    GammaEstimator,
    GammaMapping,
    audit_honesty,
    bpa_from_gamma,
    build_gamma,
    condition_gamma,
    independence_report,
)
from .population import (
    Labeling,
    LabelingProcessSpec,
    PopObject,
    PopulationSpec,
    apply_general_process,
    apply_simple_process,
    measure,
    modified_measure,
    pop_belief,
    pop_mass,
    pop_plausibility,
    process_mass,
    verify_theorem8,
)

__version__ = "0.1.0"
