"""Seeded randomized cross-checks between the closed forms and the numeric oracle.

Random streams come from numpy's Philox 4x64 counter-based generator, so a
given seed yields the same instances on every platform.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import oracle
from .powerfun import (
    TrichotomyCase,
    TriplePower,
    classify,
    derivative,
    evaluate,
    log_threshold,
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

__all__ = [
    "SuiteResult",
    "make_rng",
    "random_triple",
    "balanced_triple",
    "random_double",
    "lemma_grid",
    "tilde_scale",
    "threshold_grid_gap",
    "run_suites",
    "SUITES",
]

EXP_LOW, EXP_HIGH, EXP_GAP = 0.1, 8.0, 0.1
COEF_DECADES = 3.0


def make_rng(seed) -> np.random.Generator:
    """Philox generator; ``seed`` may be an int or a tuple of ints."""
    return np.random.Generator(np.random.Philox(seed))


def _exponents(rng: np.random.Generator) -> tuple[float, float, float]:
    while True:
        e = np.sort(rng.uniform(EXP_LOW, EXP_HIGH, 3))
        if e[1] - e[0] >= EXP_GAP and e[2] - e[1] >= EXP_GAP:
            return float(e[0]), float(e[1]), float(e[2])


def random_triple(rng: np.random.Generator, *, tilde_ready: bool = False) -> TriplePower:
    """Coefficients log-uniform in ``[1e-3, 1e3]``, sorted exponents in ``(0.1, 8)`` spaced ``>= 0.1``.

    ``tilde_ready`` additionally requires ``p + q > 1``.
    """
    while True:
        p, q, r = _exponents(rng)
        if tilde_ready and p + q <= 1:
            continue
        a, b, c = 10.0 ** rng.uniform(-COEF_DECADES, COEF_DECADES, 3)
        return TriplePower(float(a), float(b), float(c), p, q, r)


def balanced_triple(rng: np.random.Generator, *, decades: float = 1.0,
                    tilde_ready: bool = False) -> TriplePower:
    """Like :func:`random_triple` but with ``a`` within ``decades`` of the threshold.

    Log-uniform ``a`` almost always lands far below the threshold; this draws
    both sides of it evenly.
    """
    f = random_triple(rng, tilde_ready=tilde_ready)
    log_a = log_threshold(f) + math.log(10.0) * rng.uniform(-decades, decades)
    return f.with_a(math.exp(log_a)) if abs(log_a) < 700 else f


def evaluable_triple(rng: np.random.Generator, width: float = 10.0) -> TriplePower:
    """A tilde-ready instance whose terms stay in ``(1e-100, 1e100)`` on ``[u*/width, u* width]``."""
    while True:
        f = balanced_triple(rng, tilde_ready=True) if rng.uniform() < 0.5 else random_triple(
            rng, tilde_ready=True)
        u_star = turning_point(f)
        lo = f.a * (u_star / width) ** f.p + f.b * (u_star / width) ** f.q
        with np.errstate(over="ignore"):
            hi = f.a * (u_star * width) ** f.p + f.c * (u_star * width) ** f.r
        if 1e-100 < lo and hi < 1e100:
            return f


def random_double(rng: np.random.Generator) -> DoublePower:
    """``p`` uniform in ``(1.1, 6)``, ``q - p`` in ``(0.2, 4)``, ``omega`` within a decade of ``omega_{p,q}``."""
    p = float(rng.uniform(1.1, 6.0))
    q = p + float(rng.uniform(0.2, 4.0))
    w = omega_threshold(p, q) * 10.0 ** rng.uniform(-1.0, 1.0)
    return DoublePower(float(w), p, q)


def lemma_grid() -> list[tuple[float, float]]:
    """``p`` in ``{1.1, 1.5, 2, 3, 4}``, ``q`` from ``p + 0.2`` to 8 in steps of 0.2."""
    pairs = []
    for p in (1.1, 1.5, 2.0, 3.0, 4.0):
        for k in range(1, 1000):
            q = round(p + 0.2 * k, 10)
            if q > 8.0 + 1e-9:
                break
            pairs.append((p, q))
    return pairs


def tilde_scale(f: TriplePower, u: float) -> float:
    """``|(u f')' f| + |u f'^2|``: size of the two products whose difference is ``f~``."""
    d1 = derivative(f, u, 1)
    d2 = derivative(f, u, 2)
    return abs((d1 + u * d2) * evaluate(f, u)) + abs(u * d1 * d1)


def threshold_grid_gap(f: TriplePower, points: int = 100_000, span: float = 100.0) -> float:
    """Relative gap between the closed-form threshold and a plain log-grid maximum."""
    peak = oracle.bracket_max(f, points=points, span=span, refine=0)
    return abs(math.expm1(peak.log_value - log_threshold(f)))


def _relative_gap(f: TriplePower) -> float:
    """``|a - T| / T``, computed through logs."""
    return abs(math.expm1(math.log(f.a) - log_threshold(f)))


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failed: int = 0
    skipped: int = 0
    counterexample: dict | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.failed == 0 and self.checked > 0

    def record(self, ok: bool, witness: Callable[[], dict]) -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = witness()


def _params(f) -> dict:
    return asdict(f)


def suite_threshold_oracle(rng, trials: int) -> SuiteResult:
    res = SuiteResult("threshold-vs-grid")
    for _ in range(trials):
        f = random_triple(rng)
        gap = threshold_grid_gap(f)
        res.record(gap <= 1e-6, lambda: {**_params(f), "relative_gap": gap})
    return res


def suite_classification(rng, trials: int) -> SuiteResult:
    res = SuiteResult("classification-agreement")
    for i in range(trials):
        f = random_triple(rng) if i % 2 == 0 else balanced_triple(rng)
        if _relative_gap(f) < 1e-9:
            res.skipped += 1
            continue
        closed, scanned = classify(f, 1e-12), oracle.scan_classify(f)
        res.record(closed is scanned,
                   lambda: {**_params(f), "classify": closed.value, "scan": scanned.value})
    return res


def suite_tilde_identity(rng, trials: int, points: int = 20) -> SuiteResult:
    res = SuiteResult("tilde-identity")
    for _ in range(trials):
        f = evaluable_triple(rng)
        t = tilde(f)
        u_star = turning_point(f)
        for u in u_star * np.geomspace(0.1, 10.0, points):
            u = float(u)
            err = abs(oracle.tilde_fd(f, u) - evaluate(t, u)) / tilde_scale(f, u)
            res.record(err < 1e-6, lambda: {**_params(f), "u": u, "relative_error": err})
    return res


def suite_duality(rng, trials: int) -> SuiteResult:
    res = SuiteResult("tilde-duality")
    for i in range(trials):
        f = random_triple(rng, tilde_ready=True) if i % 2 == 0 else balanced_triple(
            rng, tilde_ready=True)
        if _relative_gap(f) <= 1e-6:
            res.skipped += 1
            continue
        case, dual = classify(f), classify(tilde(f))
        res.record(dual is case.dual,
                   lambda: {**_params(f), "case": case.value, "tilde_case": dual.value})
    for _ in range(max(1, trials // 10)):
        f = random_triple(rng, tilde_ready=True)
        if abs(log_threshold(f)) > 700:
            res.skipped += 1
            continue
        f = f.with_a(math.exp(log_threshold(f)))
        case, dual = classify(f, 1e-9), classify(tilde(f), 1e-9)
        ok = case is TrichotomyCase.ONE_ZERO and dual is TrichotomyCase.ONE_ZERO
        res.record(ok, lambda: {**_params(f), "case": case.value, "tilde_case": dual.value})
    return res


def suite_lemmas(rng, trials: int) -> SuiteResult:
    res = SuiteResult("lemma-closures")
    pairs = lemma_grid() + [(g.p, g.q) for g in (random_double(rng) for _ in range(trials))]
    for p, q in pairs:
        w, e = omega_threshold(p, q), eta_threshold(p, q)
        F = antiderivative(DoublePower(1.0, p, q))
        f = as_triple(DoublePower(1.0, p, q))
        w_closure = abs(w - 2.0 * math.exp(log_threshold(F))) / w
        e_closure = abs(e - math.exp(log_threshold(f))) / e
        ok = w_closure <= 1e-12 and e_closure <= 1e-12 and w < e
        res.record(ok, lambda: {"p": p, "q": q, "omega_pq": w, "eta_pq": e,
                                "omega_closure": w_closure, "eta_closure": e_closure})
    return res


def suite_equivalences(rng, trials: int) -> SuiteResult:
    """Existence: F > 0 somewhere iff F~ < 0; uniqueness: f > 0 somewhere iff f~ < 0."""
    res = SuiteResult("double-power-equivalences")
    for _ in range(trials):
        g = random_double(rng)
        F, f = antiderivative(g), as_triple(g)
        checks = []
        if _relative_gap(F) > 1e-6:
            F_case = classify(F)
            checks += [
                (F_case is TrichotomyCase.POSITIVE_PART)
                == (classify(tilde(F)) is TrichotomyCase.NEGATIVE),
                existence_predicted(g) == (F_case is TrichotomyCase.POSITIVE_PART),
            ]
        if _relative_gap(f) > 1e-6:
            f_case = classify(f)
            checks += [
                (f_case is TrichotomyCase.POSITIVE_PART)
                == (classify(tilde(f)) is TrichotomyCase.NEGATIVE),
                uniqueness_predicted(g) == (f_case is TrichotomyCase.POSITIVE_PART),
            ]
        if not checks:
            res.skipped += 1
            continue
        res.record(all(checks), lambda: _params(g))
    return res


SUITES: dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    "threshold-vs-grid": suite_threshold_oracle,
    "classification-agreement": suite_classification,
    "tilde-identity": suite_tilde_identity,
    "tilde-duality": suite_duality,
    "lemma-closures": suite_lemmas,
    "double-power-equivalences": suite_equivalences,
}


def run_suites(seed: int, trials: int) -> Iterator[SuiteResult]:
    """Run every suite on its own Philox stream derived from ``seed``."""
    for index, suite in enumerate(SUITES.values()):
        yield suite(make_rng((seed, index)), trials)
