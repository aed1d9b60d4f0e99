import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hereditary_advice.errors import InputError, ProtocolError
from hereditary_advice.guessing_games import (
    ANTI,
    FORMULA_ALIASES,
    FORMULAS,
    MAXASG_BLIND,
    MAXASG_KNOWN,
    SGKH,
    ConstantGuesser,
    EchoPrevious,
    GuessingInstance,
    PerfectAdvice,
    TableStrategy,
    anti_bound,
    anti_small_ratio_bound,
    b_c,
    clique_layer_alpha,
    entropy_h,
    guess_fraction_entropy,
    h_of_c,
    hereditary_sandwich,
    indset_preemption_bound,
    layered_reduction_pieces,
    maxasg_bounds,
    play_guessing,
    sgkh_bound,
)

mpmath.mp.dps = 40


# independent evaluations in arbitrary precision
def mp_h(sigma, x):
    x = mpmath.mpf(x)
    s = mpmath.mpf(sigma)
    terms = [x * mpmath.log(s - 1, s)]
    if x > 0:
        terms.append(-x * mpmath.log(x, s))
    if x < 1:
        terms.append(-(1 - x) * mpmath.log(1 - x, s))
    return float(mpmath.fsum(terms))


def mp_f(sigma, g):
    g = mpmath.mpf(g)
    s = mpmath.mpf(sigma)
    out = mpmath.mpf(1)
    if g < 1:
        out += (1 - g) * mpmath.log((1 - g) / (s - 1), s)
    if g > 0:
        out += g * mpmath.log(g, s)
    return float(out)


def mp_bc(c):
    c = mpmath.mpf(c)
    return float(mpmath.log(1 + mpmath.power(c - 1, c - 1) / mpmath.power(c, c), 2))


class TestPlay:
    def test_constant_one_on_maxasg(self):
        inst = GuessingInstance.from_string("0110", MAXASG_KNOWN)
        rep = play_guessing(inst, ConstantGuesser(1))
        assert rep.feasible and rep.score == 0

    def test_perfect_advice_sgkh(self):
        for sigma in (2, 3, 5, 8):
            inst = GuessingInstance(sigma, tuple((i * 7) % sigma + 1 for i in range(9)), SGKH)
            rep = play_guessing(inst, PerfectAdvice(sigma), PerfectAdvice.oracle(inst))
            assert rep.score == 0
            assert rep.bits_read == 9 * math.ceil(math.log2(sigma))

    def test_echo_previous(self):
        inst = GuessingInstance(2, (1, 1, 2, 2), SGKH)
        assert play_guessing(inst, EchoPrevious(2)).score == 2

    def test_outside_alphabet(self):
        with pytest.raises(ProtocolError):
            play_guessing(GuessingInstance(2, (1, 2), SGKH), ConstantGuesser(3))

    def test_blind_gets_no_history(self):
        seen = []

        class Spy:
            def start(self, n, tape):
                seen.append(n)

            def answer(self, i, history, tape):
                seen.append(history)
                return 1

        play_guessing(GuessingInstance.from_string("01", MAXASG_BLIND), Spy())
        assert seen == [None, None, None]

    def test_table_strategy(self):
        inst = GuessingInstance(2, (2, 1), ANTI)
        strat = TableStrategy({(): 1, (2,): 2})
        assert play_guessing(inst, strat).score == 0

    @given(st.lists(st.integers(0, 1), max_size=12), st.lists(st.integers(0, 1), min_size=12, max_size=12))
    def test_maxasg_feasibility_and_profit(self, x, y):
        y = y[:len(x)]
        inst = GuessingInstance(2, tuple(x), MAXASG_KNOWN)
        rep = play_guessing(inst, TableStrategy({i + 1: b for i, b in enumerate(y)}, blind=True))
        feasible = all(a <= b for a, b in zip(x, y))
        assert rep.feasible == feasible
        if feasible:
            assert rep.score <= x.count(0)
            assert (rep.score == x.count(0)) == (list(y) == list(x))
        else:
            assert rep.score == -math.inf

    @given(st.integers(2, 5), st.lists(st.integers(1, 5), min_size=1, max_size=10), st.integers(1, 5))
    def test_sgkh_counts(self, sigma, x, first):
        x = tuple(min(s, sigma) for s in x)
        inst = GuessingInstance(sigma, x, SGKH)
        rep = play_guessing(inst, EchoPrevious(min(first, sigma)))
        assert rep.score + rep.matches == len(x)
        assert rep.gamma == Fraction(rep.matches, len(x))


class TestFormulas:
    def test_f_anchors(self):
        for sigma in (2, 3, 7, 24):
            assert abs(guess_fraction_entropy(sigma, 1) - 1) < 1e-12
            assert abs(guess_fraction_entropy(sigma, 1 / sigma)) < 1e-12

    def test_sgkh_example(self):
        v = sgkh_bound(2, 0.75, 100).value
        h = -0.75 * math.log2(0.75) - 0.25 * math.log2(0.25)
        assert abs(v - 100 * (1 - h)) < 1e-9
        assert abs(v - 18.872187554086717) < 1e-9

    def test_sgkh_domain(self):
        with pytest.raises(InputError):
            sgkh_bound(4, 0.2, 10)
        with pytest.raises(InputError):
            sgkh_bound(4, 1.01, 10)

    def test_entropy_anchors(self):
        assert abs(entropy_h(2, 0.5) - 1) < 1e-12
        for s in (2, 3, 5, 10):
            assert abs(entropy_h(s, (s - 1) / s) - 1) < 1e-12
        assert entropy_h(3, 0) == 0

    def test_anti_example_two_paths(self):
        rep = anti_bound(3, 1.2, 99)
        h = (5 / 6) * math.log(2) / math.log(3) - (5 / 6) * math.log(5 / 6, 3) - (1 / 6) * math.log(1 / 6, 3)
        assert abs(rep.pieces["h"] - h) < 1e-12
        assert abs(rep.value - (1 - h) * 99 * math.log2(3)) < 1e-9

    def test_anti_domain(self):
        with pytest.raises(InputError):
            anti_bound(2, 2, 10)
        with pytest.raises(InputError):
            anti_bound(3, 0.9, 10)

    def test_anti_limit(self):
        assert anti_bound(3, 1.5 - 1e-12, 10).value < 1e-9

    def test_bc_values(self):
        assert b_c(1) == 1
        assert abs(b_c(2) - math.log2(1.25)) < 1e-12
        assert abs(b_c(2) - 0.3219280948873623) < 1e-12

    def test_maxasg(self):
        lo, hi = maxasg_bounds(1, 10)
        assert lo.value == 10 and hi.value == 10 and "log n" in lo.o_term
        with pytest.raises(InputError):
            maxasg_bounds(11, 10)

    def test_sandwich(self):
        lo, hi = hereditary_sandwich(2, 50)
        assert lo.value == hi.value == pytest.approx(50 * b_c(2))
        assert "log^2" in hi.o_term

    def test_layered_anchor(self):
        rep = layered_reduction_pieces(2, 24000)
        assert rep.pieces["sigma"] == pytest.approx(24)
        assert rep.pieces["n_prime"] == pytest.approx(1000)
        assert rep.pieces["K"] == pytest.approx(math.log2(24) * math.log2(24000))
        assert rep.applicable
        assert rep.pieces["window_lhs"] >= rep.pieces["window_rhs"]

    def test_layered_alpha_window_ratio(self):
        for c, k1 in ((2, 1), (3, 1.5), (10, 2)):
            p = layered_reduction_pieces(c, 10 ** 6, k1).pieces
            assert p["alpha_upper"] / p["alpha_lower"] == pytest.approx(2, abs=1e-12)

    def test_layered_not_applicable(self):
        rep = layered_reduction_pieces(2, 1000)
        assert not rep.applicable and rep.value is None and "window" in rep.note

    def test_indset_preemption(self):
        n = 10000
        rep = indset_preemption_bound(8, n)
        assert rep.value == pytest.approx(0.01 * 4 / 128 * (n - 16))
        with pytest.raises(InputError):
            indset_preemption_bound(7, n)
        with pytest.raises(InputError):
            indset_preemption_bound(8, 100)

    def test_clique_layer_alpha(self):
        assert clique_layer_alpha(2, 10) == Fraction(4, 9)
        a = clique_layer_alpha(2, 10)
        assert Fraction(1, 4) <= a <= Fraction(1, 2)
        with pytest.raises(InputError):
            clique_layer_alpha(6, 10)

    @given(st.integers(2, 200), st.data())
    def test_alpha_window_property(self, n_prime, data):
        c = data.draw(st.fractions(1, Fraction(n_prime + 1, 2)).filter(lambda v: v < Fraction(n_prime + 1, 2)))
        a = clique_layer_alpha(c, n_prime)
        assert Fraction(1, 2) / c <= a <= 1 / c

    def test_h_of_c(self):
        assert h_of_c(8) <= 0.495
        assert h_of_c(8) == pytest.approx((2 + math.log(2) * 4) / (2 * math.log(2) * 7))

    def test_anti_small_ratio(self):
        assert anti_small_ratio_bound(2, Fraction(2), 100).value == 0
        assert anti_small_ratio_bound(2, 1 + 1e-12, 100).value == pytest.approx(50, rel=1e-6)
        rep = anti_small_ratio_bound(3, 1.2, 300)
        assert rep.value == pytest.approx((1 - entropy_h(3, 5 / 6)) * 300 * math.log2(3) / 3, abs=1e-9)
        with pytest.raises(InputError):
            anti_small_ratio_bound(2, 1, 100)
        with pytest.raises(InputError):
            anti_small_ratio_bound(3, 1.6, 100)

    def test_c_as_function_of_n(self):
        assert maxasg_bounds(lambda n: 2, 10)[0].value == pytest.approx(10 * b_c(2))
        assert maxasg_bounds({10: 1}, 10)[0].value == 10
        with pytest.raises(InputError):
            maxasg_bounds({9: 1}, 10)

    def test_registry(self):
        for alias, target in FORMULA_ALIASES.items():
            assert target in FORMULAS


class TestSecondPath:
    @settings(max_examples=200)
    @given(st.integers(2, 30), st.floats(0, 1))
    def test_entropy(self, sigma, x):
        assert abs(entropy_h(sigma, x) - mp_h(sigma, x)) < 1e-12

    @settings(max_examples=200)
    @given(st.integers(2, 30), st.floats(0, 1))
    def test_f(self, sigma, u):
        g = 1 / sigma + u * (1 - 1 / sigma)
        assert abs(guess_fraction_entropy(sigma, g) - mp_f(sigma, g)) < 1e-12

    @settings(max_examples=200)
    @given(st.floats(1, 1e4))
    def test_bc(self, c):
        assert abs(b_c(c) - mp_bc(c)) <= 1e-12 * max(1, mp_bc(c))

    def test_no_nan(self):
        for s in range(2, 12):
            for i in range(101):
                assert not math.isnan(entropy_h(s, i / 100))


class TestMonotone:
    def test_f_increasing(self):
        for sigma in (2, 3, 10):
            grid = [1 / sigma + (1 - 1 / sigma) * i / 500 for i in range(501)]
            vals = [guess_fraction_entropy(sigma, g) for g in grid]
            assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_bc_decreasing(self):
        grid = [1 + i / 50 for i in range(2000)]
        vals = [b_c(c) for c in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_anti_decreasing(self):
        for sigma in (2, 3, 6):
            top = sigma / (sigma - 1)
            grid = [1 + (top - 1) * i / 400 for i in range(400)]
            vals = [anti_bound(sigma, c, 100).value for c in grid]
            assert all(a > b for a, b in zip(vals, vals[1:]))
