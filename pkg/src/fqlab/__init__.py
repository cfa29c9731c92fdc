"""fqlab: exact set algebra over GF(p^m) and an empirical lab for
shifted-product growth.

The library is organized in five layers:

- ``finite_field``: field construction, element arithmetic, subfields, cosets
- ``set_algebra``: canonical subsets, sumset/product algebra, energies,
  the structural coset-intersection profile
- ``decompositions``: popularity pigeonholing, dyadic energy slices,
  popular-point extraction, covering by translates, the growth proof trace
- ``lemma_oracles``: executable verdicts for the supporting lemmas
- ``survey``: seeded samplers, growth records, exhaustive desk-scale minima,
  CSV/JSON reporting

See the demos/ directory for narrative walkthroughs of each capability.
"""

from .errors import FqLabError
from .finite_field import (
    FieldSpec,
    SubfieldHandle,
    arith,
    build_field,
    coset_representatives,
    enumerate_subfields,
    parse_descriptor,
)
from .set_algebra import (
    FqSet,
    RepSpectrum,
    additive_energy,
    coset_profile,
    dilate,
    multiplicative_energy,
    quotient_set,
    representation_spectrum,
    set_op,
    shifted_product,
    translate,
)
from .decompositions import (
    DyadicSlice,
    PopularPoints,
    ProofTrace,
    TraceParams,
    covering_number,
    dyadic_energy_slice,
    popular_points,
    popularity_subset,
    run_proof_trace,
)
from .lemma_oracles import LEMMA_IDS, LemmaReport, batch_verify
from .survey import (
    CorollaryRecord,
    SurveyConfig,
    SurveyRecord,
    corollary_record,
    exhaustive_min_expander,
    expander_record,
    run_survey,
    sample_set,
)

__version__ = "0.1.0"

__all__ = [
    "FqLabError",
    "FieldSpec",
    "SubfieldHandle",
    "arith",
    "build_field",
    "coset_representatives",
    "enumerate_subfields",
    "parse_descriptor",
    "FqSet",
    "RepSpectrum",
    "additive_energy",
    "coset_profile",
    "dilate",
    "multiplicative_energy",
    "quotient_set",
    "representation_spectrum",
    "set_op",
    "shifted_product",
    "translate",
    "DyadicSlice",
    "PopularPoints",
    "ProofTrace",
    "TraceParams",
    "covering_number",
    "dyadic_energy_slice",
    "popular_points",
    "popularity_subset",
    "run_proof_trace",
    "LEMMA_IDS",
    "LemmaReport",
    "batch_verify",
    "CorollaryRecord",
    "SurveyConfig",
    "SurveyRecord",
    "corollary_record",
    "exhaustive_min_expander",
    "expander_record",
    "run_survey",
    "sample_set",
]
