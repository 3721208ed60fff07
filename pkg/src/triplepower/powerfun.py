"""Triple-power nonlinearities ``f(u) = -a u^p + b u^q - c u^r``.

Evaluation, exact derivatives, the sign threshold on ``a``, the three-way
classification and the closed-form tilde transform
``(u f'(u))' f(u) - u f'(u)^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "DomainError",
    "TriplePower",
    "TrichotomyCase",
    "evaluate",
    "derivative",
    "primitive",
    "log_threshold",
    "threshold",
    "turning_point",
    "classify",
    "tilde",
    "term_magnitude",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


@dataclass(frozen=True)
class TriplePower:
    """``f(u) = -a u^p + b u^q - c u^r`` with ``a, b, c > 0`` and ``0 < p < q < r``."""

    a: float
    b: float
    c: float
    p: float
    q: float
    r: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "p", "q", "r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise DomainError("requires a > 0, b > 0, c > 0")
        if not self.p > 0:
            raise DomainError("requires p > 0")
        if not (self.p < self.q < self.r):
            raise DomainError("requires p < q < r")

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    @property
    def exponents(self) -> tuple[float, float, float]:
        return (self.p, self.q, self.r)

    def with_a(self, a: float) -> TriplePower:
        return TriplePower(a, self.b, self.c, self.p, self.q, self.r)

    def __call__(self, u):
        return evaluate(self, u)


class TrichotomyCase(Enum):
    """Sign pattern of a triple-power function on ``u > 0``."""

    POSITIVE_PART = "PositivePart"
    ONE_ZERO = "OneZero"
    NEGATIVE = "Negative"

    @property
    def label(self) -> str:
        """Letter of the case: (a) positive parts, (b) one zero, (c) negative."""
        return {"PositivePart": "a", "OneZero": "b", "Negative": "c"}[self.value]

    @property
    def dual(self) -> TrichotomyCase:
        """Case taken by the tilde transform when ``f`` is in this case."""
        if self is TrichotomyCase.POSITIVE_PART:
            return TrichotomyCase.NEGATIVE
        if self is TrichotomyCase.NEGATIVE:
            return TrichotomyCase.POSITIVE_PART
        return self


def evaluate(f: TriplePower, u):
    """Value of ``f`` at ``u >= 0`` (scalar or array).

    ``f(0) = 0`` by continuity since ``p > 0``. For ``u > 1`` the factored form
    ``u^p (-a + b u^(q-p) - c u^(r-p))`` is used, which keeps the sign of the
    bracket meaningful when individual terms overflow.
    """
    x = np.asarray(u, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("requires u >= 0")
    with np.errstate(over="ignore", invalid="ignore"):
        direct = -f.a * x**f.p + f.b * x**f.q - f.c * x**f.r
        big = x > 1
        if np.any(big):
            xb = np.where(big, x, 1.0)
            bracket = -f.a + f.b * xb ** (f.q - f.p) - f.c * xb ** (f.r - f.p)
            direct = np.where(big, xb**f.p * bracket, direct)
    return float(direct) if direct.ndim == 0 else direct


def derivative(f: TriplePower, u, order: int = 1):
    """Exact first or second derivative of ``f`` at ``u > 0``."""
    x = np.asarray(u, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("derivative requires u > 0")
    a, b, c, p, q, r = f.a, f.b, f.c, f.p, f.q, f.r
    if order == 1:
        val = -a * p * x ** (p - 1) + b * q * x ** (q - 1) - c * r * x ** (r - 1)
    elif order == 2:
        val = (
            -a * p * (p - 1) * x ** (p - 2)
            + b * q * (q - 1) * x ** (q - 2)
            - c * r * (r - 1) * x ** (r - 2)
        )
    else:
        raise DomainError(f"order must be 1 or 2, got {order!r}")
    return float(val) if val.ndim == 0 else val


def term_magnitude(f: TriplePower, u):
    """``a u^p + b u^q + c u^r``: the scale against which ``f(u)`` is small."""
    x = np.asarray(u, dtype=float)
    val = f.a * x**f.p + f.b * x**f.q + f.c * x**f.r
    return float(val) if val.ndim == 0 else val


def primitive(f: TriplePower) -> TriplePower:
    """Antiderivative ``F(u) = int_0^u f`` as another triple-power function."""
    return TriplePower(
        f.a / (f.p + 1), f.b / (f.q + 1), f.c / (f.r + 1), f.p + 1, f.q + 1, f.r + 1
    )


def log_threshold(f: TriplePower) -> float:
    """Natural log of :func:`threshold`; finite even when the threshold overflows."""
    a, b, c, p, q, r = f.a, f.b, f.c, f.p, f.q, f.r
    log_ratio = math.log(b) + math.log(q - p) - math.log(c) - math.log(r - p)
    return math.log(b) + math.log((r - q) / (r - p)) + (q - p) / (r - q) * log_ratio


def threshold(f: TriplePower) -> float:
    """Supremum of the values of ``a`` for which ``f`` is positive somewhere.

    Equal to ``max_{u>0} (b u^(q-p) - c u^(r-p))``, i.e.
    ``b (r-q)/(r-p) [b (q-p) / (c (r-p))]^((q-p)/(r-q))``.
    Returns ``inf`` if the value does not fit in a double.

    Examples
    --------
    >>> threshold(TriplePower(1.0, 1.0, 1.0, 1.0, 2.0, 3.0))
    0.25
    """
    lt = log_threshold(f)
    return math.exp(lt) if lt < 709.0 else math.inf


def turning_point(f: TriplePower) -> float:
    """Maximiser ``u* = [b (q-p) / (c (r-p))]^(1/(r-q))`` of ``b u^(q-p) - c u^(r-p)``."""
    log_ratio = math.log(f.b) + math.log(f.q - f.p) - math.log(f.c) - math.log(f.r - f.p)
    return math.exp(log_ratio / (f.r - f.q))


def classify(f: TriplePower, rel_tol: float = 1e-12) -> TrichotomyCase:
    """Decide whether ``f`` has positive parts, a single (double) zero, or stays negative.

    ``a`` is compared with ``T = threshold(f)``; the function counts as having
    one zero when ``|a - T| <= rel_tol * max(a, T)``.
    """
    if not (0 < rel_tol <= 1e-6):
        raise DomainError("rel_tol must lie in (0, 1e-6]")
    gap = math.log(f.a) - log_threshold(f)
    # 1 - min(a,T)/max(a,T) without forming T
    if -math.expm1(-abs(gap)) <= rel_tol:
        return TrichotomyCase.ONE_ZERO
    return TrichotomyCase.POSITIVE_PART if gap < 0 else TrichotomyCase.NEGATIVE


def tilde(f: TriplePower) -> TriplePower:
    """Closed form of ``(u f')' f - u f'^2`` for a triple-power ``f``.

    The result is again triple-power::

        -ab(q-p)^2 u^(p+q-1) + ca(r-p)^2 u^(p+r-1) - bc(r-q)^2 u^(q+r-1)

    Requires ``p + q > 1`` so the smallest output exponent stays positive.
    """
    a, b, c, p, q, r = f.a, f.b, f.c, f.p, f.q, f.r
    if not p + q > 1:
        raise DomainError("tilde requires p + q > 1")
    return TriplePower(
        a * b * (q - p) ** 2,
        c * a * (r - p) ** 2,
        b * c * (r - q) ** 2,
        p + q - 1,
        p + r - 1,
        q + r - 1,
    )
