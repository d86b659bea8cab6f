"""Expected spectral moments of Bernoulli-erased unit-norm frames, the
MANOVA limit law, and Welch-type lower-bound verification.

Modules: frames (constructions, Gram, coherence, tightness predicates),
erasure_moments (exact polynomial, exhaustive oracle, Monte Carlo), manova
(density, atom, moments, CDF, finite-size correction), bounds (erasure
Welch bound and equality classification), spectral (subset spectra and KS
comparison), cli (the ewb command).
"""

__version__ = "0.1.0"

from .bounds import (
    ETF_EQUALITY,
    STRICT,
    UTF_EQUALITY,
    VIOLATION,
    BoundParams,
    BoundReport,
    check_theorem,
    erasure_welch_bound,
    lemma1_check,
    subset_rms_bound,
)
from .erasure_moments import (
    BRUTEFORCE_MAX_N,
    BruteforceTable,
    ErasureModel,
    MomentEstimate,
    MomentPolynomial,
    bruteforce_moment,
    bruteforce_table,
    expected_moment,
    moment_polynomial,
    montecarlo_moment,
    subset_rms,
    trace_moment,
)
from .frames import (
    CoherenceReport,
    Frame,
    GramMatrix,
    NearestUtfResult,
    coherence,
    gram,
    harmonic_etf,
    is_etf,
    is_utf,
    load_frame,
    nearest_utf,
    random_frame,
    repeated_onb,
    save_frame,
    simplex_etf,
    welch_floor,
)
from .manova import (
    AtomicOnlyError,
    ManovaParams,
    ManovaSupport,
    QuadratureError,
    bulk_mass,
    cdf,
    cdf_many,
    delta_correction,
    density,
    moment_closed,
    moment_numeric,
    quantile_many,
    support,
)
from .rng import GENERATOR_NAME, keep_masks, make_rng
from .spectral import (
    Spectrum,
    hermitian_eigenvalues,
    ks_distance,
    pool_eigenvalues,
    subset_spectrum_samples,
)

__all__ = [
    "__version__",
    "GENERATOR_NAME",
    "BRUTEFORCE_MAX_N",
    "ETF_EQUALITY",
    "UTF_EQUALITY",
    "STRICT",
    "VIOLATION",
    "AtomicOnlyError",
    "QuadratureError",
    "Frame",
    "GramMatrix",
    "CoherenceReport",
    "NearestUtfResult",
    "ErasureModel",
    "MomentPolynomial",
    "MomentEstimate",
    "BruteforceTable",
    "ManovaParams",
    "ManovaSupport",
    "BoundParams",
    "BoundReport",
    "Spectrum",
    "gram",
    "coherence",
    "welch_floor",
    "is_utf",
    "is_etf",
    "random_frame",
    "simplex_etf",
    "harmonic_etf",
    "repeated_onb",
    "nearest_utf",
    "save_frame",
    "load_frame",
    "trace_moment",
    "moment_polynomial",
    "expected_moment",
    "bruteforce_table",
    "bruteforce_moment",
    "montecarlo_moment",
    "subset_rms",
    "support",
    "density",
    "moment_closed",
    "moment_numeric",
    "bulk_mass",
    "delta_correction",
    "cdf",
    "cdf_many",
    "quantile_many",
    "erasure_welch_bound",
    "check_theorem",
    "lemma1_check",
    "subset_rms_bound",
    "hermitian_eigenvalues",
    "subset_spectrum_samples",
    "pool_eigenvalues",
    "ks_distance",
    "make_rng",
    "keep_masks",
]
