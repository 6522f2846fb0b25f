"""Difference-set calculus on finite semigroups.

Derivatives of sets, degrees of recurrence along filter oracles, derivation
trees, Delta-Ramsey witness extraction, Delta-measure checks and a
finite-dimensional van der Corput harness.
"""

from .calculus import derivative, finite_products, fp_search, iterated_derivative
from .errors import (
    DeltaRamseyError,
    ExtractionStuck,
    HypothesisViolated,
    InvalidBranch,
    InvalidInput,
    InvalidSemigroup,
    MalformedTable,
    NoWitnessFound,
    OutOfWindow,
    PreconditionViolated,
    SearchBudgetExceeded,
    TheoremViolation,
    Unsupported,
)
from .filters import (
    FilterOracle,
    Verdict,
    density_oracle,
    frechet_oracle,
    greedy_ip_extract,
    ip_star_oracle,
    stab_set,
    uniform_oracle,
)
from .measure import (
    MeasureOracle,
    counting_measure,
    delta_measure_audit,
    fp_shift_corollary_check,
    quantitative_recurrence,
    union_bound_check,
    upper_density,
)
from .ramsey import (
    Relation,
    brute_force_clique,
    delta_ramsey_witness,
    hypothesis_check,
    verify_transcript,
)
from .recurrence import (
    branch_fp,
    delta_set,
    derivation_tree,
    fp_shift_witness,
    is_n_recurrent,
    is_n_thick_in_delta,
    is_recurrently_n_thick,
    recurrence_profile,
    respects_recurrence_check,
)
from .semigroup import Semigroup, TruncatedNat, catalog, cyclic, validate
from .sets import ElementSet
from .vdc import (
    FiniteAction,
    VectorFamily,
    bessel_error_chain,
    mixing_defect,
    triple_identity_check,
    vdc_conclusion,
    vdc_hypothesis,
)

__version__ = "0.1.0"
