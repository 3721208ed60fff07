"""Double-power nonlinearities ``f(u) = -omega u + u^p - u^q`` and their thresholds.

A ground state exists exactly when ``omega < omega_threshold(p, q)``; the
sufficient uniqueness condition ``f~ < 0`` holds exactly when
``omega < eta_threshold(p, q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .powerfun import DomainError, TrichotomyCase, TriplePower, classify, primitive

__all__ = [
    "DoublePower",
    "as_triple",
    "antiderivative",
    "omega_threshold",
    "eta_threshold",
    "existence_predicted",
    "uniqueness_predicted",
    "existence_case",
    "uniqueness_case",
]


def _check_exponents(p: float, q: float) -> None:
    if not p > 1:
        raise DomainError("requires p > 1")
    if not q > p:
        raise DomainError("requires q > p")


@dataclass(frozen=True)
class DoublePower:
    omega: float
    p: float
    q: float

    def __post_init__(self) -> None:
        for name in ("omega", "p", "q"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not self.omega > 0:
            raise DomainError("requires omega > 0")
        _check_exponents(self.p, self.q)


def as_triple(g: DoublePower) -> TriplePower:
    """``g`` written as ``-a u^1 + b u^p - c u^q`` with ``a = omega``, ``b = c = 1``."""
    return TriplePower(g.omega, 1.0, 1.0, 1.0, g.p, g.q)


def antiderivative(g: DoublePower) -> TriplePower:
    """``F(u) = -omega u^2 / 2 + u^(p+1) / (p+1) - u^(q+1) / (q+1)``."""
    return primitive(as_triple(g))


def omega_threshold(p: float, q: float) -> float:
    """Existence threshold ``omega_{p,q}``.

    ``2 (q-p) / ((p+1)(q-1)) * [(p-1)(q+1) / ((p+1)(q-1))]^((p-1)/(q-p))``

    >>> omega_threshold(3, 5)
    0.1875
    """
    _check_exponents(p, q)
    base = (p - 1) * (q + 1) / ((p + 1) * (q - 1))
    return 2 * (q - p) / ((p + 1) * (q - 1)) * base ** ((p - 1) / (q - p))


def eta_threshold(p: float, q: float) -> float:
    """Uniqueness threshold ``eta_{p,q} = (q-p)/(q-1) * [(p-1)/(q-1)]^((p-1)/(q-p))``."""
    _check_exponents(p, q)
    return (q - p) / (q - 1) * ((p - 1) / (q - 1)) ** ((p - 1) / (q - p))


def existence_predicted(g: DoublePower) -> bool:
    """True iff ``F > 0`` somewhere, i.e. ``omega < omega_{p,q}`` (strict)."""
    return g.omega < omega_threshold(g.p, g.q)


def uniqueness_predicted(g: DoublePower) -> bool:
    """True iff ``f > 0`` somewhere, equivalently ``f~ < 0`` on ``u > 0``."""
    return g.omega < eta_threshold(g.p, g.q)


def existence_case(g: DoublePower, rel_tol: float = 1e-12) -> TrichotomyCase:
    return classify(antiderivative(g), rel_tol)


def uniqueness_case(g: DoublePower, rel_tol: float = 1e-12) -> TrichotomyCase:
    return classify(as_triple(g), rel_tol)
