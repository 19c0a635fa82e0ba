"""Statistics for comparing predicted affect against ground truth.

Pearson correlation with a two-tailed significance test (Student's t
through the regularized incomplete beta function, evaluated with a
continued fraction — no external stats dependency), root-mean-square
error, and the grading scheme for two-word picks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "CorrelationResult",
    "pearson",
    "p_value",
    "correlate",
    "rmse",
    "MatchResult",
    "MatchTally",
    "match_score",
    "tally_matches",
]


@dataclass(frozen=True)
class CorrelationResult:
    """Sample Pearson coefficient with its two-tailed p-value."""

    rho: float
    n: int
    p: float | None = None
    dimension: str | None = None


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient of two equal-length series."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ValueError("correlation needs at least two points")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation is undefined for a constant series")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    # Clamp against rounding drift so downstream sqrt(1 - rho^2) stays real.
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def _betacf(a: float, b: float, x: float, tol: float = 1e-10) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast on one side of the mean;
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) for the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def p_value(rho: float, n: int) -> float:
    """Two-tailed p-value for a sample Pearson coefficient.

    Under the null of zero correlation, t = rho * sqrt((n - 2) / (1 - rho^2))
    follows Student's t with n - 2 degrees of freedom; the two-tailed tail
    mass is the regularized incomplete beta I_{df/(df + t^2)}(df/2, 1/2).
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation out of range: {rho}")
    if n < 3:
        raise ValueError("p-value needs at least three points")
    if abs(rho) == 1.0:
        return 0.0
    df = n - 2
    t_sq = rho * rho * df / (1.0 - rho * rho)
    return _reg_inc_beta(df / 2.0, 0.5, df / (df + t_sq))


def correlate(
    xs: Sequence[float], ys: Sequence[float], dimension: str | None = None
) -> CorrelationResult:
    """Pearson coefficient plus p-value in one call."""
    rho = pearson(xs, ys)
    return CorrelationResult(rho=rho, n=len(xs), p=p_value(rho, len(xs)), dimension=dimension)


def rmse(expected: Sequence[float], actual: Sequence[float]) -> float:
    """Root-mean-square error between two equal-length series."""
    if len(expected) != len(actual):
        raise ValueError(f"length mismatch: {len(expected)} vs {len(actual)}")
    if not expected:
        raise ValueError("rmse needs at least one point")
    return math.sqrt(
        math.fsum((e - a) ** 2 for e, a in zip(expected, actual)) / len(expected)
    )


@dataclass(frozen=True)
class MatchResult:
    """Overlap grade between a picked word pair and a reference pair."""

    grade: str  # "complete" | "partial" | "none"
    common: frozenset[str]
    hallucinated: frozenset[str]


@dataclass(frozen=True)
class MatchTally:
    complete: int
    partial: int
    none: int

    @property
    def total(self) -> int:
        return self.complete + self.partial + self.none


def match_score(
    picked: Sequence[str], reference: Sequence[str], allowed: Iterable[str]
) -> MatchResult:
    """Grade a two-word pick: both words shared, one, or neither.

    Words outside the allowed vocabulary never count toward the overlap
    and are reported as hallucinated.
    """
    allowed_set = set(allowed)
    picked_set = set(picked)
    reference_set = set(reference)
    hallucinated = picked_set - allowed_set
    common = (picked_set & allowed_set) & reference_set
    if len(common) >= 2:
        grade = "complete"
    elif len(common) == 1:
        grade = "partial"
    else:
        grade = "none"
    return MatchResult(grade=grade, common=frozenset(common), hallucinated=frozenset(hallucinated))


def tally_matches(results: Iterable[MatchResult]) -> MatchTally:
    counts = {"complete": 0, "partial": 0, "none": 0}
    for result in results:
        counts[result.grade] += 1
    return MatchTally(**counts)
