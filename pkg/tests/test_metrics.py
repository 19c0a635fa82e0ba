import math
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate
from scipy import stats as scipy_stats

from chatocc.metrics import (
    MatchResult,
    correlate,
    match_score,
    p_value,
    pearson,
    rmse,
    tally_matches,
)

WORDS = ("alert", "bored", "excited", "serious", "mildly annoyed")


def t_density(x: float, df: int) -> float:
    log_norm = (
        math.lgamma((df + 1) / 2)
        - math.lgamma(df / 2)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - (df + 1) / 2 * math.log1p(x * x / df))


def quadrature_p(rho: float, n: int) -> float:
    """Two-tailed tail mass of Student's t by direct numerical integration."""
    df = n - 2
    t = abs(rho) * math.sqrt(df / (1 - rho * rho))
    tail, _ = integrate.quad(t_density, t, math.inf, args=(df,))
    return 2 * tail


class TestPearson:
    def test_hand_computed_case(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        ys = [2.0, 1.0, 4.0, 3.0]
        # covariance 2/5 of the full spread: rho = 0.6 by direct arithmetic
        assert pearson(xs, ys) == pytest.approx(0.6, abs=1e-12)

    def test_perfectly_collinear_stays_in_range(self):
        xs = [0.1, 0.2, 0.7, 0.9]
        up = pearson(xs, [2 * x + 1 for x in xs])
        down = pearson(xs, [-x for x in xs])
        assert up == pytest.approx(1.0, abs=1e-12)
        assert down == pytest.approx(-1.0, abs=1e-12)
        # the clamp guarantees sqrt(1 - rho^2) downstream stays real
        assert -1.0 <= down <= up <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(ValueError):
            pearson([1.0], [2.0])

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_matches_scipy_on_random_series(self):
        rng = random.Random(7)
        for n in (3, 5, 10, 20, 50, 200):
            xs = [rng.gauss(0, 1) for _ in range(n)]
            ys = [0.6 * x + rng.gauss(0, 0.8) for x in xs]
            expected = scipy_stats.pearsonr(xs, ys)
            assert pearson(xs, ys) == pytest.approx(expected.statistic, abs=1e-12)

    @given(
        st.lists(st.floats(-50, 50), min_size=4, max_size=40),
        st.floats(0.01, 100),
        st.floats(-100, 100),
    )
    def test_positive_affine_invariance(self, xs, a, b):
        assume(max(xs) - min(xs) > 1e-3)
        rng = random.Random(int(sum(xs)) & 0xFFFF)
        ys = [x + rng.gauss(0, 1) for x in xs]
        base = pearson(xs, ys)
        shifted = pearson([a * x + b for x in xs], ys)
        assert shifted == pytest.approx(base, abs=1e-9)


class TestPValue:
    def test_boundaries(self):
        assert p_value(1.0, 20) == 0.0
        assert p_value(-1.0, 20) == 0.0
        assert p_value(0.0, 20) == pytest.approx(1.0, abs=1e-12)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            p_value(1.5, 10)
        with pytest.raises(ValueError):
            p_value(0.5, 2)

    def test_matches_scipy(self):
        rng = random.Random(11)
        for n in (5, 10, 25, 60):
            xs = [rng.gauss(0, 1) for _ in range(n)]
            ys = [0.5 * x + rng.gauss(0, 1) for x in xs]
            expected = scipy_stats.pearsonr(xs, ys)
            assert p_value(pearson(xs, ys), n) == pytest.approx(
                expected.pvalue, abs=1e-9
            )

    def test_matches_quadrature_oracle_on_grid(self):
        for n in (5, 8, 12, 20, 35, 50):
            for rho in (0.05, 0.2, 0.39, 0.5, 0.735, 0.9, 0.98):
                assert p_value(rho, n) == pytest.approx(
                    quadrature_p(rho, n), abs=1e-6
                ), (rho, n)
                assert p_value(-rho, n) == p_value(rho, n)

    def test_monotonic_in_rho(self):
        for n in (5, 20, 50):
            ps = [p_value(r / 100, n) for r in range(0, 100, 5)]
            assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_monotonic_in_n(self):
        ps = [p_value(0.4, n) for n in range(4, 60)]
        assert all(a > b for a, b in zip(ps, ps[1:]))


class TestCorrelate:
    def test_bundles_rho_p_n(self):
        xs = [1.0, 2.0, 3.0, 4.0, 5.0]
        ys = [1.1, 1.9, 3.2, 3.8, 5.1]
        result = correlate(xs, ys, dimension="V")
        assert result.n == 5
        assert result.dimension == "V"
        assert result.rho == pytest.approx(pearson(xs, ys))
        assert result.p == pytest.approx(p_value(result.rho, 5))


class TestRmse:
    def test_hand_computed(self):
        assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(math.sqrt(12.5))

    def test_zero_for_identical(self):
        assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            rmse([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            rmse([], [])

    def test_matches_direct_formula_on_random(self):
        rng = random.Random(3)
        xs = [rng.uniform(0, 1) for _ in range(30)]
        ys = [rng.uniform(0, 1) for _ in range(30)]
        direct = math.sqrt(sum((x - y) ** 2 for x, y in zip(xs, ys)) / 30)
        assert rmse(xs, ys) == pytest.approx(direct, abs=1e-12)


class TestMatchScore:
    def test_complete(self):
        result = match_score(("enjoyment", "excited"), ("excited", "enjoyment"), WORDS + ("enjoyment",))
        assert result.grade == "complete"
        assert result.common == frozenset({"enjoyment", "excited"})
        assert not result.hallucinated

    def test_partial(self):
        result = match_score(("alert", "mildly annoyed"), ("bored", "mildly annoyed"), WORDS)
        assert result.grade == "partial"
        assert result.common == frozenset({"mildly annoyed"})

    def test_none(self):
        result = match_score(("alert", "serious"), ("bored", "excited"), WORDS)
        assert result.grade == "none"
        assert result.common == frozenset()

    def test_hallucinated_word_cannot_match(self):
        result = match_score(("anxious", "alert"), ("anxious", "alert"), WORDS)
        assert result.hallucinated == frozenset({"anxious"})
        # the out-of-vocabulary word never counts toward the overlap
        assert result.grade == "partial"

    def test_tally(self):
        results = [
            MatchResult("complete", frozenset(), frozenset()),
            MatchResult("partial", frozenset(), frozenset()),
            MatchResult("partial", frozenset(), frozenset()),
            MatchResult("none", frozenset(), frozenset()),
        ]
        tally = tally_matches(results)
        assert (tally.complete, tally.partial, tally.none) == (1, 2, 1)
        assert tally.total == 4
