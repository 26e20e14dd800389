"""Quantitative and boolean trace semantics."""

import numpy as np
import pytest

from oracles import oracle_robustness, oracle_satisfies, random_case
from stlfalsify.errors import ArgumentError, HorizonError, SchemaError
from stlfalsify.stl import parse, robustness, satisfies
from stlfalsify.stl.ast import Norm, Scale, Signal, Sum
from stlfalsify.stl.semantics import eval_expr
from stlfalsify.trace import Trace


def _trace(**channels):
    return Trace(1.0 / 6.0, channels)


class TestFixtures:
    """Hand-computed reference values, exact to 1e-12."""

    def test_globally_constant_signal(self):
        trace = _trace(x=[0.2, 0.2, 0.2, 0.2])
        assert robustness(parse("G[0,3](x <= 0.5)"), trace) == pytest.approx(0.3, abs=1e-12)

    def test_eventually_peak(self):
        trace = _trace(x=[0.0, 0.4, 1.2, 0.9])
        assert robustness(parse("F[0,3](x >= 1.0)"), trace) == pytest.approx(0.2, abs=1e-12)

    def test_reach_failure_worst_sample(self):
        dist = [0.40, 0.35, 0.28] + [0.25] * 28
        trace = Trace(1.0 / 6.0, {"finger_pos": dist, "point_pos": [0.0] * 31})
        rho = robustness(parse("G[0,30](norm(finger_pos - point_pos) <= 0.3)"), trace)
        assert rho == pytest.approx(-0.10, abs=1e-12)
        assert not satisfies(parse("G[0,30](norm(finger_pos - point_pos) <= 0.3)"), trace)


class TestHorizonHandling:
    def test_strict_mode_raises_when_window_overruns(self):
        trace = _trace(x=[0.0, 1.0, 2.0])
        with pytest.raises(HorizonError):
            robustness(parse("G[0,5](x <= 10)"), trace)

    def test_strict_mode_accounts_for_t0(self):
        trace = _trace(x=[0.0] * 6)
        f = parse("G[0,3](x <= 1)")
        assert robustness(f, trace, 2) == 1.0
        with pytest.raises(HorizonError):
            robustness(f, trace, 3)

    def test_truncate_clamps_to_available_samples(self):
        trace = _trace(x=[0.0, 1.0, 2.0])
        assert robustness(parse("G[0,5](x <= 10)"), trace, truncate=True) == 8.0
        assert robustness(parse("F[0,9](x >= 1)"), trace, truncate=True) == 1.0

    def test_truncate_with_empty_effective_window(self):
        # F[3,5] starting at the last sample has no samples at all: even
        # truncation cannot help, so it must still raise.
        trace = _trace(x=[0.0, 1.0])
        with pytest.raises(HorizonError):
            robustness(parse("F[3,5](x >= 0)"), trace, truncate=True)


class TestValidation:
    def test_undeclared_signal(self):
        trace = _trace(x=[0.0, 1.0])
        with pytest.raises(SchemaError):
            robustness(parse("y <= 1"), trace)

    def test_norm_of_mismatched_dims(self):
        trace = Trace(1.0, {"a": [[0.0, 0.0], [1.0, 1.0]], "b": [0.0, 1.0]})
        with pytest.raises(SchemaError):
            robustness(parse("norm(a - b) <= 1"), trace)

    def test_vector_signal_needs_norm(self):
        trace = Trace(1.0, {"a": [[0.0, 0.0], [1.0, 1.0]]})
        with pytest.raises(SchemaError):
            robustness(parse("a <= 1"), trace)

    @pytest.mark.parametrize("t0", [-1, 4, 100])
    def test_t0_out_of_range(self, t0):
        trace = _trace(x=[0.0, 1.0, 2.0, 3.0])
        with pytest.raises(ArgumentError):
            robustness(parse("x <= 1"), trace, t0)


class TestStrictness:
    """At rho == 0 the boolean verdict distinguishes strict from non-strict."""

    def test_boundary_sample(self):
        trace = _trace(x=[1.0, 1.0])
        assert robustness(parse("x <= 1"), trace) == 0.0
        assert robustness(parse("x < 1"), trace) == 0.0
        assert satisfies(parse("x <= 1"), trace)
        assert not satisfies(parse("x < 1"), trace)
        assert satisfies(parse("x >= 1"), trace)
        assert not satisfies(parse("x > 1"), trace)

    def test_boundary_under_negation(self):
        trace = _trace(x=[1.0, 1.0])
        assert not satisfies(parse("not x <= 1"), trace)
        assert satisfies(parse("not x < 1"), trace)


class TestOracleAgreement:
    """Exact equality against an independent nested-loop evaluator."""

    def test_random_cases(self):
        rng = np.random.default_rng(2024)
        for _ in range(400):
            formula, trace, t0 = random_case(rng)
            rho = robustness(formula, trace, t0)
            assert rho == oracle_robustness(formula, trace, t0)
            assert satisfies(formula, trace, t0) == oracle_satisfies(formula, trace, t0)
            if rho != 0.0:
                assert (rho > 0.0) == satisfies(formula, trace, t0)


class TestAlgebraicProperties:
    def _samples(self, count=120, seed=77):
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            n = int(rng.integers(4, 16))
            out.append(_trace(
                x=np.round(rng.normal(size=n), 3),
                y=np.round(rng.normal(size=n), 3),
            ))
        return out

    def test_negation_flips_sign(self):
        f = parse("G[0,2](x <= 0.1)")
        g = parse("not G[0,2](x <= 0.1)")
        for trace in self._samples():
            assert robustness(g, trace) == -robustness(f, trace)

    def test_and_is_min_or_is_max(self):
        a, b = parse("x <= 0.2"), parse("y >= -0.1")
        both, either = parse("x <= 0.2 and y >= -0.1"), parse("x <= 0.2 or y >= -0.1")
        for trace in self._samples():
            ra, rb = robustness(a, trace), robustness(b, trace)
            assert robustness(both, trace) == min(ra, rb)
            assert robustness(either, trace) == max(ra, rb)

    def test_globally_eventually_duality(self):
        g = parse("G[1,3](x <= 0.5)")
        dual = parse("not F[1,3](not x <= 0.5)")
        for trace in self._samples():
            assert robustness(g, trace) == robustness(dual, trace)

    def test_eventually_is_until_with_true_left(self):
        # F[a,b] phi == True U[a,b] phi; "x <= inf"-style tautology via a huge bound.
        f = parse("F[0,3](x >= 0.2)")
        u = parse("x <= 1000000.0 U[0,3] x >= 0.2")
        for trace in self._samples():
            assert robustness(f, trace) == robustness(u, trace)


class TestEvalExpr:
    """Expressions evaluate to (N, d) arrays; Norm reduces d to 1."""

    def test_norm_of_scalar_is_abs(self):
        trace = _trace(x=[-2.0, 3.0])
        np.testing.assert_array_equal(eval_expr(Norm(Signal("x")), trace), [[2.0], [3.0]])

    def test_norm_of_vector(self):
        trace = Trace(1.0, {"a": [[3.0, 4.0], [0.0, 0.0]]})
        np.testing.assert_array_equal(eval_expr(Norm(Signal("a")), trace), [[5.0], [0.0]])

    def test_scale_and_sum(self):
        trace = _trace(x=[1.0, 2.0], y=[10.0, 20.0])
        np.testing.assert_array_equal(
            eval_expr(Sum(Scale(2.0, Signal("x")), Signal("y")), trace), [[12.0], [24.0]]
        )

    def test_axis_component_access(self):
        trace = Trace(1.0, {"a": [[3.0, 4.0], [1.0, 2.0]]})
        np.testing.assert_array_equal(eval_expr(Signal("a_y"), trace), [[4.0], [2.0]])
