"""HEOM propagation of driven open systems with audited heat currents."""

from .bath import (
    BathSpec,
    NoiseDecomposition,
    QuadratureError,
    DecompositionError,
    correlation_quadrature_oracle,
    drude_spectral_density,
    pade_decompose,
    delta_weight,
    auto_pade_terms,
)

__version__ = "0.1.0"

__all__ = [
    "BathSpec",
    "NoiseDecomposition",
    "QuadratureError",
    "DecompositionError",
    "correlation_quadrature_oracle",
    "drude_spectral_density",
    "pade_decompose",
    "delta_weight",
    "auto_pade_terms",
    "__version__",
]
