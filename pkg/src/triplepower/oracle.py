"""Independent numeric checks for the closed forms in :mod:`triplepower.powerfun`.

Nothing here uses ``threshold``, ``classify``, ``tilde`` or ``derivative``:
signs come from grid maximisation of the bracket
``-a + b u^(q-p) - c u^(r-p)``, roots from bisection on that bracket, and the
tilde transform from finite differences of ``evaluate``. The turning point is
used only to decide where to put the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .powerfun import DomainError, TrichotomyCase, TriplePower, evaluate, turning_point

__all__ = [
    "ScanConfig",
    "RootSet",
    "BracketMax",
    "bracket_max",
    "scan_classify",
    "find_roots",
    "tilde_fd",
]

# Zoom levels applied after the coarse grid in scan_classify.
_REFINE_LEVELS = 4
_ROOT_RTOL = 1e-12


@dataclass(frozen=True)
class ScanConfig:
    """Log-grid of ``points`` nodes on ``[u*/span, u* span]``; ``zero_band`` is relative to ``a``."""

    points: int = 20001
    span: float = 100.0
    zero_band: float = 1e-9

    def __post_init__(self) -> None:
        if self.points < 1000:
            raise DomainError("ScanConfig requires points >= 1000")
        if not self.span >= 10:
            raise DomainError("ScanConfig requires span >= 10")
        if not (0 < self.zero_band <= 1e-6):
            raise DomainError("ScanConfig requires zero_band in (0, 1e-6]")


@dataclass(frozen=True)
class RootSet:
    """Zeros of ``f`` on ``u > 0`` in ascending order, each tagged simple or double."""

    roots: tuple[float, ...] = ()
    multiplicity: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.roots)


@dataclass(frozen=True)
class BracketMax:
    """Grid maximum of ``b u^(q-p) - c u^(r-p)``.

    ``log_value`` is the log of the maximum (the maximum is always positive),
    ``argmax`` the grid node where it was attained.
    """

    log_value: float
    argmax: float


def _log_terms(f: TriplePower, log_u):
    """Logs of the three bracket terms ``a``, ``b u^(q-p)``, ``c u^(r-p)``."""
    la = math.log(f.a)
    lb = math.log(f.b) + (f.q - f.p) * log_u
    lc = math.log(f.c) + (f.r - f.p) * log_u
    return la, lb, lc


def _bracket_sign(f: TriplePower, log_u: float) -> float:
    """Sign-faithful value of the bracket, scaled by its largest term."""
    la, lb, lc = _log_terms(f, log_u)
    m = max(la, lb, lc)
    return -math.exp(la - m) + math.exp(lb - m) - math.exp(lc - m)


def bracket_max(f: TriplePower, points: int = 20001, span: float = 100.0,
                refine: int = 0) -> BracketMax:
    """Maximise ``b u^(q-p) - c u^(r-p)`` over a log grid around ``turning_point(f)``.

    With ``refine > 0`` the grid is rebuilt on the two cells adjacent to the
    current maximiser that many times. Work is done relative to the grid
    centre so huge or tiny ``u`` do not overflow.
    """
    log_center = math.log(turning_point(f))
    log_k = math.log(f.b) + (f.q - f.p) * log_center
    kappa = math.exp(math.log(f.c) - math.log(f.b) + (f.r - f.q) * log_center)
    lo, hi = -math.log(span), math.log(span)
    best_t = best_v = None
    for _ in range(refine + 1):
        t = np.linspace(lo, hi, points)
        v = np.exp((f.q - f.p) * t) - kappa * np.exp((f.r - f.p) * t)
        i = int(np.argmax(v))
        best_t, best_v = float(t[i]), float(v[i])
        step = (hi - lo) / (points - 1)
        lo, hi = best_t - step, best_t + step
    return BracketMax(log_value=log_k + math.log(best_v), argmax=math.exp(log_center + best_t))


def scan_classify(f: TriplePower, cfg: ScanConfig | None = None) -> TrichotomyCase:
    """Classify ``f`` by the sign of the grid maximum of its bracket.

    Examples
    --------
    >>> scan_classify(TriplePower(0.125, 1, 1, 1, 2, 3)).value
    'PositivePart'
    """
    cfg = cfg or ScanConfig()
    peak = bracket_max(f, cfg.points, cfg.span, refine=_REFINE_LEVELS)
    # max over u of (-a + bracket), relative to a
    excess = math.expm1(peak.log_value - math.log(f.a))
    if excess > cfg.zero_band:
        return TrichotomyCase.POSITIVE_PART
    if excess < -cfg.zero_band:
        return TrichotomyCase.NEGATIVE
    return TrichotomyCase.ONE_ZERO


def _bisect_log(f: TriplePower, t_neg: float, t_pos: float) -> float:
    """Bisect in ``log u`` between a negative and a positive bracket value."""
    while abs(t_pos - t_neg) > _ROOT_RTOL:
        mid = 0.5 * (t_neg + t_pos)
        if _bracket_sign(f, mid) > 0:
            t_pos = mid
        else:
            t_neg = mid
    return math.exp(0.5 * (t_neg + t_pos))


def find_roots(f: TriplePower, cfg: ScanConfig | None = None) -> RootSet:
    """Zeros of ``f`` on ``u > 0``.

    Two simple roots straddling the bracket maximiser when ``f`` has positive
    parts, the maximiser itself as a double root in the boundary case, and
    none otherwise. The bracket is unimodal in ``log u``, so each side holds
    at most one sign change; the search interval is widened tenfold up to
    three times if needed.
    """
    cfg = cfg or ScanConfig()
    case = scan_classify(f, cfg)
    if case is TrichotomyCase.NEGATIVE:
        return RootSet()
    peak = bracket_max(f, cfg.points, cfg.span, refine=_REFINE_LEVELS)
    if case is TrichotomyCase.ONE_ZERO:
        return RootSet((peak.argmax,), ("double",))
    t_peak = math.log(peak.argmax)
    roots = []
    for direction in (-1.0, 1.0):
        width = math.log(cfg.span)
        for _ in range(4):
            t_end = t_peak + direction * width
            if _bracket_sign(f, t_end) < 0:
                break
            width += math.log(10.0)
        else:
            raise ArithmeticError(f"no sign change found for {f!r}")
        roots.append(_bisect_log(f, t_end, t_peak))
    return RootSet(tuple(roots), ("simple", "simple"))


def tilde_fd(f: TriplePower, u: float, h_scale: float = 1e-3) -> float:
    """``(u f')' f - u f'^2`` at ``u > 0`` from values of ``f`` alone.

    Uses five-point central differences with step ``h = h_scale * u`` for both
    ``f'`` and ``f''`` and expands ``(u f')' = f' + u f''``.
    """
    if not u > 0:
        raise DomainError("tilde_fd requires u > 0")
    if not 0 < h_scale < 0.5:
        raise DomainError("h_scale must lie in (0, 0.5)")
    h = h_scale * u
    fp2, fp1, f0, fm1, fm2 = (evaluate(f, u + k * h) for k in (2, 1, 0, -1, -2))
    d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
    d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h)
    return (d1 + u * d2) * f0 - u * d1 * d1
