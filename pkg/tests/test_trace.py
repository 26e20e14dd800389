"""Traces, boxes, decimation, and the CSV round trip."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlfalsify.errors import ArgumentError, SamplingError, SchemaError
from stlfalsify.trace import Box, Trace, decimate, trace_from_csv, trace_to_csv


def make_trace(n=5, period=0.1):
    return Trace(period, {
        "pos": np.arange(n * 3, dtype=float).reshape(n, 3),
        "speed": np.linspace(0.0, 1.0, n).reshape(n, 1),
    })


class TestTrace:
    def test_channels_coerced_to_2d(self):
        tr = Trace(0.5, {"x": [1.0, 2.0, 3.0]})
        assert tr.signals["x"].shape == (3, 1)
        assert tr.length == 3

    def test_scalar_and_vector_dims(self):
        tr = make_trace()
        assert tr.dim("pos") == 3
        assert tr.dim("speed") == 1

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(SchemaError):
            Trace(0.1, {"a": [[1.0], [2.0]], "b": [[1.0]]})

    def test_empty_signals_rejected(self):
        with pytest.raises(SchemaError):
            Trace(0.1, {})

    @pytest.mark.parametrize("period", [0.0, -1.0, float("nan"), float("inf")])
    def test_bad_period_rejected(self, period):
        with pytest.raises(SamplingError):
            Trace(period, {"x": [[1.0]]})

    def test_bad_channel_name_rejected(self):
        with pytest.raises(SchemaError):
            Trace(0.1, {"3x": [[1.0]]})

    def test_immutable(self):
        tr = make_trace()
        with pytest.raises(AttributeError):
            tr.sample_period = 0.2

    def test_axis_access(self):
        tr = make_trace()
        assert np.array_equal(tr.channel("pos_x"), tr.signals["pos"][:, 0:1])
        assert np.array_equal(tr.channel("pos_z"), tr.signals["pos"][:, 2:3])
        assert np.array_equal(tr.channel("pos_1"), tr.signals["pos"][:, 1:2])

    def test_declared_name_wins_over_axis_suffix(self):
        tr = Trace(0.1, {"a": [[1.0], [2.0]], "a_x": [[9.0], [9.0]]})
        assert np.array_equal(tr.channel("a_x"), tr.signals["a_x"])

    def test_unknown_channel(self):
        tr = make_trace()
        with pytest.raises(SchemaError):
            tr.channel("nope")
        with pytest.raises(SchemaError):
            tr.channel("pos_w")

    def test_equality(self):
        assert make_trace() == make_trace()
        assert make_trace() != make_trace(period=0.2)


class TestDecimate:
    def test_keeps_every_stride_th_sample(self):
        tr = make_trace(n=301, period=1 / 60)
        dec = decimate(tr, 10)
        assert dec.length == 31
        assert dec.sample_period == pytest.approx(10 / 60)
        assert np.array_equal(dec.signals["pos"], tr.signals["pos"][::10])

    def test_stride_one_is_identity(self):
        tr = make_trace()
        assert decimate(tr, 1) is tr

    @pytest.mark.parametrize("stride", [0, -2, 1.5, True])
    def test_bad_stride(self, stride):
        with pytest.raises(ArgumentError):
            decimate(make_trace(), stride)

    @given(st.integers(2, 9), st.integers(2, 40))
    def test_decimation_selects_exact_rows(self, stride, n):
        tr = Trace(0.5, {"v": np.arange(n, dtype=float)})
        dec = decimate(tr, stride)
        assert np.array_equal(dec.signals["v"][:, 0], np.arange(0, n, stride))


class TestCsv:
    def test_round_trip_exact(self):
        tr = make_trace(n=7, period=1 / 3)
        back = trace_from_csv(trace_to_csv(tr))
        assert back == tr

    def test_header_layout(self):
        header = trace_to_csv(make_trace()).splitlines()[0]
        assert header == "time,pos_x,pos_y,pos_z,speed"

    def test_high_dimension_uses_indices(self):
        tr = Trace(0.1, {"q": np.zeros((2, 5))})
        header = trace_to_csv(tr).splitlines()[0]
        assert header == "time,q_0,q_1,q_2,q_3,q_4"
        assert trace_from_csv(trace_to_csv(tr)) == tr

    def test_scalar_with_suffix_name_stays_scalar(self):
        data = "time,foo_x\n0.0,1.0\n0.1,2.0\n"
        tr = trace_from_csv(data)
        assert list(tr.signals) == ["foo_x"]

    def test_missing_time_column(self):
        with pytest.raises(SchemaError):
            trace_from_csv("t,x\n0,1\n1,2\n")

    def test_single_row_rejected(self):
        with pytest.raises(SamplingError):
            trace_from_csv("time,x\n0.0,1.0\n")

    def test_non_uniform_spacing_rejected(self):
        with pytest.raises(SamplingError):
            trace_from_csv("time,x\n0.0,1.0\n0.1,1.0\n0.3,1.0\n")

    def test_decreasing_time_rejected(self):
        with pytest.raises(SamplingError):
            trace_from_csv("time,x\n0.2,1.0\n0.1,1.0\n")

    def test_ragged_row_rejected(self):
        with pytest.raises(SchemaError):
            trace_from_csv("time,x\n0.0,1.0\n0.1\n")

    def test_non_numeric_rejected(self):
        with pytest.raises(ValueError):
            trace_from_csv("time,x\n0.0,1.0\n0.1,abc\n")

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            trace_from_csv("time,x\n0.0,1.0\n0.1,inf\n")

    def test_duplicate_channel_rejected(self):
        with pytest.raises(SchemaError):
            trace_from_csv("time,x,x\n0.0,1.0,2.0\n0.1,1.0,2.0\n")

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_round_trip_property(self, data):
        n = data.draw(st.integers(2, 12))
        dims = data.draw(st.lists(st.integers(1, 4), min_size=1, max_size=3))
        values = st.floats(
            min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False
        )
        signals = {}
        for i, d in enumerate(dims):
            flat = data.draw(
                st.lists(values, min_size=n * d, max_size=n * d)
            )
            signals[f"c{i}"] = np.array(flat).reshape(n, d)
        period = data.draw(st.floats(min_value=1e-6, max_value=10.0,
                                     allow_nan=False, allow_infinity=False))
        tr = Trace(period, signals)
        assert trace_from_csv(trace_to_csv(tr)) == tr


class TestBox:
    def test_basic_queries(self):
        box = Box([("x", 0.0, 2.0), ("y", -1.0, 1.0)])
        assert box.dim == 2
        assert box.names == ("x", "y")
        assert box.volume() == pytest.approx(4.0)
        assert np.array_equal(box.widths(), [2.0, 2.0])

    def test_contains_and_tolerance(self):
        box = Box([("x", 0.0, 1.0)])
        assert box.contains([0.5])
        assert box.contains([1.0])
        assert not box.contains([1.0 + 1e-9])
        assert box.contains([1.0 + 1e-9], tol=1e-8)

    def test_clip(self):
        box = Box([("x", 0.0, 1.0), ("y", 0.0, 1.0)])
        assert np.array_equal(box.clip([2.0, -1.0]), [1.0, 0.0])
        assert np.array_equal(box.clip([0.3, 0.4]), [0.3, 0.4])

    def test_contains_box(self):
        outer = Box([("x", 0.0, 1.0)])
        assert outer.contains_box(Box([("x", 0.2, 0.8)]))
        assert not outer.contains_box(Box([("x", 0.2, 1.2)]))

    def test_validation(self):
        with pytest.raises(ArgumentError):
            Box([])
        with pytest.raises(ArgumentError):
            Box([("x", 1.0, 0.0)])
        with pytest.raises(ArgumentError):
            Box([("x", 0.0, float("inf"))])
        with pytest.raises(ArgumentError):
            Box([("2x", 0.0, 1.0)])
        with pytest.raises(ArgumentError):
            Box([("x", 0.0, 1.0), ("x", 0.0, 1.0)])

    @given(st.integers(0, 2**32))
    @settings(max_examples=40, deadline=None)
    def test_samples_stay_inside(self, seed):
        from stlfalsify.seeding import generator

        box = Box([("x", -3.0, -1.0), ("y", 10.0, 10.5)])
        rng = generator(seed)
        for _ in range(20):
            assert box.contains(box.sample(rng))

    def test_sampling_is_seed_deterministic(self):
        from stlfalsify.seeding import generator

        box = Box([("x", 0.0, 1.0), ("y", 0.0, 1.0)])
        a = [tuple(box.sample(generator(9))) for _ in range(1)]
        b = [tuple(box.sample(generator(9))) for _ in range(1)]
        assert a == b
