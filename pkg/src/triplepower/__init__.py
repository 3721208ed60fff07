"""Classification of triple-power nonlinearities and shooting for radial ground states."""

from .powerfun import (
    DomainError,
    TrichotomyCase,
    TriplePower,
    classify,
    derivative,
    evaluate,
    primitive,
    threshold,
    tilde,
    turning_point,
)
from .thresholds import (
    DoublePower,
    antiderivative,
    as_triple,
    eta_threshold,
    existence_predicted,
    omega_threshold,
    uniqueness_predicted,
)

__version__ = "0.1.0"
