"""Spectral calculus for bounded non-vanishing discrete-time signals.

Signals act on trigonometric polynomials through the pairing
``<X, f> = sum_k x(k) f_k``; transfer functions act on signals through l1
kernels.  On top of that the package provides causal one-step predictors
and recovery of missing samples from spectral gaps.
"""

from .degeneracy import DegeneracyReport, DegeneracyWeight, degeneracy_norm
from .errors import (AmbiguityBoundError, CausalityError, ConfigError, GuardError, LinfSpecError,
                     MaskError, NonFiniteError, NumericalError, QuadratureError, SaturationError,
                     SingularityError, WindowError)
from .gaps import GapCertificate, SpectralGap, arc, gap_certificate, gap_residual, make_gap
from .predictor import (PredictionRun, PredictorConfig, hgamma_kernel, hgamma_series_kernel,
                        hgamma_value, predict_one_step, sinusoid_error_oracle)
from .recovery import (Masked, RecoveryProblem, RecoveryResult, ambiguity_bound,
                       assemble_constraints, recover_missing, recover_variants)
from .signals import ExpSum, QuadDensity, Samples, SignalSource, modulate
from .transfer import (FilteredSamples, Kernel, TransferResult, apply_transfer, filter_samples,
                       is_causal, kernel_from_spectrum, make_kernel, trapezoid_kernel)
from .wiener import (PairingValue, WienerFunction, basis, embedding_bound, evaluate, make_wiener,
                     pairing, partial_spectrum, product, sobolev_constant, sobolev_norm)

__all__ = [
    "AmbiguityBoundError",
    "CausalityError",
    "ConfigError",
    "DegeneracyReport",
    "DegeneracyWeight",
    "ExpSum",
    "FilteredSamples",
    "GapCertificate",
    "GuardError",
    "Kernel",
    "LinfSpecError",
    "MaskError",
    "Masked",
    "NonFiniteError",
    "NumericalError",
    "PairingValue",
    "PredictionRun",
    "PredictorConfig",
    "QuadDensity",
    "QuadratureError",
    "RecoveryProblem",
    "RecoveryResult",
    "Samples",
    "SaturationError",
    "SignalSource",
    "SingularityError",
    "SpectralGap",
    "TransferResult",
    "WienerFunction",
    "WindowError",
    "ambiguity_bound",
    "apply_transfer",
    "arc",
    "assemble_constraints",
    "basis",
    "degeneracy_norm",
    "embedding_bound",
    "evaluate",
    "filter_samples",
    "gap_certificate",
    "gap_residual",
    "hgamma_kernel",
    "hgamma_series_kernel",
    "hgamma_value",
    "is_causal",
    "kernel_from_spectrum",
    "make_gap",
    "make_kernel",
    "make_wiener",
    "modulate",
    "pairing",
    "partial_spectrum",
    "predict_one_step",
    "product",
    "recover_missing",
    "recover_variants",
    "sinusoid_error_oracle",
    "sobolev_constant",
    "sobolev_norm",
    "trapezoid_kernel",
]

__version__ = "0.1.0"
