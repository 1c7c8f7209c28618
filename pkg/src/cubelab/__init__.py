"""Samplers on the sign hypercube and the machinery to verify them exactly.

The package pairs five discrete samplers (damped single-flip resampling,
independent-flip and two-stage proximal kernels, each with a Metropolis
adjustment) and three score families with dense small-dimension analysis:
stationary laws, spectra, exact Hamming-Wasserstein transport, contraction
certificates, and evaluators for every closed-form rate and error bound.
"""

from .analysis import (
    BoundReport,
    CertResult,
    ContractionCertificate,
    SpectralSummary,
    bounds_report,
    contraction_certificate,
    detailed_balance_residual,
    dmaps_empirical_delta,
    naive_mh_oracle,
    run_certificates,
    spectral_summary,
    stationary,
    stationary_direct,
    tv_distance,
    wasserstein_hamming,
    wasserstein_hamming_lp,
)
from .ctmc import (
    Trajectory,
    ctmc_simulate,
    discretization_residual,
    glauber_rates,
    kernel_deviation,
    occupation_measure,
)
from .errors import CapabilityError, NumericalError, ParameterError
from .kernels import (
    GeneratorMatrix,
    KernelMatrix,
    StepOutcome,
    dmala_matrix,
    dmala_step,
    dmaps_matrix,
    dmaps_step,
    dula_generator,
    dula_matrix,
    dula_step,
    dups_generator,
    dups_matrix,
    dups_step,
    gibbs_matrix,
    gibbs_step,
    glauber_generator,
    prox_exact_matrix,
)
from .models import (
    BitsMixture,
    CurieWeiss,
    IndependentBits,
    IsingGrid,
    TargetModel,
    exact_target,
)
from .scores import (
    BetaConstants,
    ScoreField,
    beta_constants,
    gibbs_score,
    glauber_score,
    stein_score,
    tabulate_scores,
)
from .simulate import ChainConfig, SimResult, run_chain, sample_transitions
from .statespace import BitState, all_signs, hamming, index_of, state_of

__version__ = "0.1.0"
