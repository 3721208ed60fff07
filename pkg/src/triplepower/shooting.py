"""Shooting for positive radial solutions of ``u'' + (n-1)/r u' + f(u) = 0``.

A trajectory starts at ``u(0) = alpha``, ``u'(0) = 0`` and is stepped with
classical RK4 at a fixed step. Each run ends in one of four ways: the
solution crosses zero, turns back up while still positive (rebound), decays
to the origin of the phase plane, or reaches ``r_max`` undecided. Ground
states sit at the boundary between rebounding and crossing initial heights
and are located by bisection on ``alpha``.

The energy ``E = u'^2/2 + F(u)`` is nonincreasing for ``n >= 2`` and constant
for ``n = 1``; it is what makes the ``alpha`` bracket ``(z_F, z_2)`` safe.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from . import oracle
from .powerfun import DomainError, TrichotomyCase, TriplePower, classify, evaluate, primitive
from .thresholds import DoublePower, as_triple, eta_threshold, omega_threshold

__all__ = [
    "IntegrationError",
    "Outcome",
    "ShootingConfig",
    "Trajectory",
    "GroundState",
    "NotFound",
    "UniquenessWitness",
    "SweepRow",
    "integrate",
    "energy",
    "alpha_bracket",
    "alpha_grid",
    "find_ground_state",
    "uniqueness_scan",
    "sweep_omega",
]

# Relative offsets of the alpha grid ends from z_F (below) and z_2 (below).
_LOW_OFFSET = 1e-3
_TOP_OFFSET = 1e-6
_MAX_REFINE = 80
_SWEEP_BAND = 0.02


class IntegrationError(RuntimeError):
    """The integrator produced a non-finite state."""

    def __init__(self, message: str, last_r: float):
        super().__init__(message)
        self.last_r = last_r


class Outcome(Enum):
    CROSSING = "Crossing"
    REBOUND = "Rebound"
    DECAY = "Decay"
    UNDETERMINED = "Undetermined"


_CODES = {0: Outcome.CROSSING, 1: Outcome.REBOUND, 2: Outcome.DECAY, 3: Outcome.UNDETERMINED}
_FAILED = -1


@njit(cache=True, nogil=True)
def _nonlinearity(u, a, b, c, p, q, r):
    # odd extension below zero; only reached inside the step that crosses
    if u > 0.0:
        return -a * u**p + b * u**q - c * u**r
    if u < 0.0:
        w = -u
        return a * w**p - b * w**q + c * w**r
    return 0.0


@njit(cache=True, nogil=True)
def _shoot(n, a, b, c, p, q, r, alpha, h, r_max, decay_u, decay_v, record, out):
    """Integrate one trajectory; returns (code, samples_written, r, u, v)."""
    f0 = _nonlinearity(alpha, a, b, c, p, q, r)
    df0 = -a * p * alpha ** (p - 1.0) + b * q * alpha ** (q - 1.0) - c * r * alpha ** (r - 1.0)
    c2 = -f0 / (2.0 * n)
    c4 = df0 * f0 / (8.0 * n * (n + 2.0))
    u = alpha + c2 * h * h + c4 * h**4
    v = 2.0 * c2 * h + 4.0 * c4 * h**3
    rr = h
    k = 1
    if record:
        out[0, 0] = 0.0
        out[0, 1] = alpha
        out[0, 2] = 0.0
        out[1, 0] = rr
        out[1, 1] = u
        out[1, 2] = v
    n_steps = int(math.ceil(r_max / h - 1e-9))
    nm1 = n - 1.0
    while True:
        if not (math.isfinite(u) and math.isfinite(v)):
            return _FAILED, k + 1, rr, u, v
        if u <= 0.0:
            return 0, k + 1, rr, u, v
        if v >= 0.0 and u < alpha and k > 1:
            return 1, k + 1, rr, u, v
        if abs(u) < decay_u and abs(v) < decay_v:
            return 2, k + 1, rr, u, v
        if k >= n_steps:
            return 3, k + 1, rr, u, v
        # classical RK4 on (u, v), v' = -(n-1)/r v - f(u)
        k1u = v
        k1v = -nm1 / rr * v - _nonlinearity(u, a, b, c, p, q, r)
        rh = rr + 0.5 * h
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2u = v2
        k2v = -nm1 / rh * v2 - _nonlinearity(u2, a, b, c, p, q, r)
        u3 = u + 0.5 * h * k2u
        v3 = v + 0.5 * h * k2v
        k3u = v3
        k3v = -nm1 / rh * v3 - _nonlinearity(u3, a, b, c, p, q, r)
        r4 = rr + h
        u4 = u + h * k3u
        v4 = v + h * k3v
        k4u = v4
        k4v = -nm1 / r4 * v4 - _nonlinearity(u4, a, b, c, p, q, r)
        u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        k += 1
        rr = k * h
        if record:
            out[k, 0] = rr
            out[k, 1] = u
            out[k, 2] = v


@dataclass(frozen=True)
class ShootingConfig:
    """One radial problem: dimension ``n``, nonlinearity ``f`` and integrator settings.

    ``r_max`` defaults to ``200 / sqrt(a)``, ``a`` being the linear decay
    coefficient of ``f`` (``omega`` for a double power).
    """

    n: int
    f: TriplePower
    r_max: float | None = None
    step: float = 1e-3
    decay_tol: float = 1e-6
    alpha_tol: float = 1e-9

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("requires n >= 1 (integer)")
        object.__setattr__(self, "n", int(self.n))
        if self.r_max is None:
            object.__setattr__(self, "r_max", 200.0 / math.sqrt(self.f.a))
        if not self.r_max > 0:
            raise DomainError("requires r_max > 0")
        if not self.step > 0:
            raise DomainError("requires step > 0")
        if not (0 < self.decay_tol < 1e-2 and 0 < self.alpha_tol < 1e-2):
            raise DomainError("requires decay_tol and alpha_tol in (0, 1e-2)")

    @classmethod
    def for_double_power(cls, g: DoublePower, n: int, **kwargs) -> ShootingConfig:
        return cls(n=n, f=as_triple(g), **kwargs)

    @property
    def primitive(self) -> TriplePower:
        return primitive(self.f)

    @property
    def decay_rate(self) -> float:
        return math.sqrt(self.f.a)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution ``(r, u, u_r)`` with its terminal outcome."""

    r: np.ndarray
    u: np.ndarray
    u_r: np.ndarray
    outcome: Outcome
    alpha: float

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.r, self.u, self.u_r])

    def energy(self, cfg: ShootingConfig) -> np.ndarray:
        F = cfg.primitive
        return 0.5 * self.u_r**2 + evaluate(F, np.abs(self.u))


@dataclass(frozen=True)
class GroundState:
    alpha_star: float
    trajectory: Trajectory
    energy_residual: float
    bracket: tuple[float, float]

    found = True


@dataclass(frozen=True)
class NotFound:
    reason: str

    found = False


@dataclass(frozen=True)
class UniquenessWitness:
    transitions: int
    vacuous: bool
    alphas: tuple[float, ...] = ()
    outcomes: tuple[Outcome, ...] = ()


@dataclass(frozen=True)
class SweepRow:
    omega: float
    omega_threshold: float
    eta_threshold: float
    predicted: bool
    found: bool
    alpha_star: float | None = None
    error: str | None = None

    @property
    def agrees(self) -> bool:
        return self.error is None and self.predicted == self.found


def _run(cfg: ShootingConfig, alpha: float, record: bool):
    if not alpha > 0:
        raise DomainError("requires alpha > 0")
    f = cfg.f
    if record:
        rows = int(math.ceil(cfg.r_max / cfg.step - 1e-9)) + 2
        out = np.empty((rows, 3))
    else:
        out = np.empty((1, 3))
    code, count, r, u, v = _shoot(
        float(cfg.n), f.a, f.b, f.c, f.p, f.q, f.r, float(alpha), float(cfg.step),
        float(cfg.r_max), cfg.decay_tol, cfg.decay_tol * cfg.decay_rate, record, out,
    )
    if code == _FAILED:
        last = r - cfg.step
        raise IntegrationError(
            f"non-finite state at alpha={alpha!r}; last finite r={last!r}", last
        )
    return _CODES[code], out[:count] if record else None


def integrate(cfg: ShootingConfig, alpha: float) -> Trajectory:
    """Integrate from ``u(0) = alpha``, ``u'(0) = 0`` until an outcome is reached.

    The first step uses the regular series ``u = alpha + c2 r^2 + c4 r^4`` with
    ``c2 = -f(alpha)/(2n)`` and ``c4 = f'(alpha) f(alpha) / (8 n (n+2))``,
    which sidesteps the ``(n-1)/r`` singularity. Checks run after every step
    in the order crossing, rebound, decay, horizon.
    """
    outcome, samples = _run(cfg, alpha, record=True)
    return Trajectory(samples[:, 0].copy(), samples[:, 1].copy(), samples[:, 2].copy(),
                      outcome, float(alpha))


def _outcome(cfg: ShootingConfig, alpha: float) -> Outcome:
    return _run(cfg, alpha, record=False)[0]


def energy(cfg: ShootingConfig, state: tuple[float, float]) -> float:
    """``E = u_r^2 / 2 + F(u)``."""
    u, u_r = state
    if u < 0:
        raise DomainError("energy requires u >= 0")
    return 0.5 * u_r * u_r + evaluate(cfg.primitive, u)


def alpha_bracket(cfg: ShootingConfig) -> tuple[float, float] | None:
    """``(z_F, z_2)``: first positive zero of ``F`` and largest zero of ``f``.

    ``None`` when ``F`` never becomes positive, in which case no positive
    solution exists.
    """
    F = cfg.primitive
    if classify(F) is not TrichotomyCase.POSITIVE_PART:
        return None
    z_F = oracle.find_roots(F).roots[0]
    z_2 = oracle.find_roots(cfg.f).roots[-1]
    return z_F, z_2


def alpha_grid(z_F: float, z_2: float, size: int) -> np.ndarray:
    """Ascending initial heights from just below ``z_F`` to just below ``z_2``.

    Distances to ``z_2`` are log-spaced so the grid crowds towards ``z_2``,
    where ground states of near-threshold problems live. The lowest node sits
    slightly under ``z_F``: for ``n = 1`` every height above ``z_F`` crosses,
    so the rebound side of the transition is only seen below it.
    """
    if size <= 0:
        return np.empty(0)
    low = z_F * (1.0 - _LOW_OFFSET)
    if size == 1:
        return np.array([low])
    top_gap = _TOP_OFFSET * z_2
    gaps = np.geomspace(z_2 - low, top_gap, size)
    return z_2 - gaps


def _outcomes(cfg: ShootingConfig, alphas: Iterable[float], workers: int) -> list[Outcome]:
    alphas = list(alphas)
    if workers <= 1 or len(alphas) < 2:
        return [_outcome(cfg, a) for a in alphas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: _outcome(cfg, a), alphas))


def find_ground_state(cfg: ShootingConfig, grid_size: int = 24,
                      workers: int = 1) -> GroundState | NotFound:
    """Locate a positive decaying solution by bisection on the initial height.

    Scans :func:`alpha_grid`, takes the first rebound/crossing pair, bisects
    it down to ``alpha_tol`` and then keeps halving until the midpoint
    trajectory itself passes the decay test.
    """
    bracket = alpha_bracket(cfg)
    if bracket is None:
        return NotFound("F ≤ 0 on u > 0")
    alphas = alpha_grid(*bracket, grid_size)
    outcomes = _outcomes(cfg, alphas, workers)
    for a, o in zip(alphas, outcomes):
        if o is Outcome.DECAY:
            return _ground_state(cfg, float(a), (float(a), float(a)))
    if Outcome.CROSSING not in outcomes:
        return NotFound("no crossing trajectory on the alpha grid")
    for i in range(len(alphas) - 1):
        if outcomes[i] is Outcome.REBOUND and outcomes[i + 1] is Outcome.CROSSING:
            lo, hi = float(alphas[i]), float(alphas[i + 1])
            break
    else:
        return NotFound("no rebound/crossing transition on the alpha grid")

    def bisect(lo, hi, stop):
        while not stop(lo, hi):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                return lo, hi, None
            o = _outcome(cfg, mid)
            if o is Outcome.DECAY:
                return lo, hi, mid
            if o is Outcome.REBOUND:
                lo = mid
            elif o is Outcome.CROSSING:
                hi = mid
            else:
                raise IntegrationError(
                    f"trajectory undetermined at alpha={mid!r} within r_max={cfg.r_max!r}",
                    cfg.r_max,
                )
        return lo, hi, None

    lo, hi, hit = bisect(lo, hi, lambda lo, hi: hi - lo <= cfg.alpha_tol)
    if hit is None:
        budget = iter(range(_MAX_REFINE))
        lo, hi, hit = bisect(lo, hi, lambda lo, hi: next(budget, None) is None)
    if hit is None:
        return NotFound(f"alpha bracket [{lo!r}, {hi!r}] collapsed without a decaying trajectory")
    return _ground_state(cfg, hit, (lo, hi))


def _ground_state(cfg: ShootingConfig, alpha: float, bracket: tuple[float, float]) -> GroundState:
    traj = integrate(cfg, alpha)
    residual = float(traj.energy(cfg)[-1])
    return GroundState(alpha_star=alpha, trajectory=traj, energy_residual=residual,
                       bracket=bracket)


def uniqueness_scan(cfg: ShootingConfig, grid_size: int = 200,
                    workers: int = 1) -> UniquenessWitness:
    """Count rebound/crossing switches along :func:`alpha_grid`.

    A single switch is the numerical trace of a unique ground state; decaying
    or undetermined runs are skipped when counting.
    """
    bracket = alpha_bracket(cfg)
    if bracket is None or grid_size <= 0:
        return UniquenessWitness(transitions=0, vacuous=True)
    alphas = alpha_grid(*bracket, grid_size)
    outcomes = _outcomes(cfg, alphas, workers)
    decided = [o for o in outcomes if o in (Outcome.CROSSING, Outcome.REBOUND)]
    transitions = sum(1 for x, y in zip(decided, decided[1:]) if x is not y)
    return UniquenessWitness(transitions, False, tuple(float(a) for a in alphas), tuple(outcomes))


def sweep_omega(p: float, q: float, n: int, omegas: Sequence[float], *,
                step: float = 1e-3, r_max: float | None = None,
                decay_tol: float = 1e-6, alpha_tol: float = 1e-9,
                grid_size: int = 24, workers: int = 1) -> list[SweepRow]:
    """Run :func:`find_ground_state` for each ``omega`` and compare with ``omega < omega_{p,q}``.

    ``omega`` values within 2% of the existence threshold are rejected up front:
    ground states there have plateaus too long for the default horizon.
    Integration failures are recorded on their row rather than raised.
    """
    w_pq = omega_threshold(p, q)
    e_pq = eta_threshold(p, q)
    for omega in omegas:
        if abs(omega - w_pq) < _SWEEP_BAND * w_pq:
            raise DomainError(
                f"omega={omega!r} lies within 2% of the existence threshold {w_pq!r}"
            )

    def row(omega: float) -> SweepRow:
        g = DoublePower(omega, p, q)
        predicted = omega < w_pq
        cfg = ShootingConfig.for_double_power(
            g, n, step=step, r_max=r_max, decay_tol=decay_tol, alpha_tol=alpha_tol
        )
        try:
            result = find_ground_state(cfg, grid_size=grid_size)
        except IntegrationError as exc:
            return SweepRow(omega, w_pq, e_pq, predicted, False, None, str(exc))
        alpha = result.alpha_star if isinstance(result, GroundState) else None
        return SweepRow(omega, w_pq, e_pq, predicted, result.found, alpha)

    omegas = [float(w) for w in omegas]
    if workers <= 1:
        return [row(w) for w in omegas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row, omegas))
