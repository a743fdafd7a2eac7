import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thirringlab.errors import SingularPointError
from thirringlab.fields import (
    DataSpec,
    Region,
    classify,
    data_sample,
    data_sampler,
    dataspec_from_config,
    dataspec_to_config,
    from_wave,
    rescale_data,
    rescale_sampler,
    to_wave,
)


def test_data_sample_examples():
    spec = DataSpec(epsilon=1.0, cutoff=False)
    s = data_sample(spec, 0.0)
    assert s.u == pytest.approx(1.0) and s.v == pytest.approx(1.0)

    cut = DataSpec(epsilon=0.0, cutoff=True)
    s = data_sample(cut, 2.0)
    assert s.u == 0 and s.v == 0

    s = data_sample(DataSpec(epsilon=0.25, cutoff=False), -0.75)
    assert s.u == pytest.approx(1.0) and s.v == pytest.approx(1.0)


def test_data_sample_singular_point():
    with pytest.raises(SingularPointError):
        data_sample(DataSpec(epsilon=0.0, cutoff=True), 0.0)


def test_data_sampler_matches_pointwise():
    spec = DataSpec(kappa_plus=2j, kappa_minus=1.0, epsilon=0.3, cutoff=True)
    xs = np.array([-1.5, -0.9, -0.1, 0.2, 0.97, 1.01])
    vals = data_sampler(spec, "u")(xs)
    for x, v in zip(xs, vals):
        assert v == pytest.approx(complex(data_sample(spec, float(x)).u))


def test_dataspec_validation():
    with pytest.raises(ValueError):
        DataSpec(epsilon=-1.0)
    with pytest.raises(ValueError):
        DataSpec(mass=-0.5)


def test_rescale_examples():
    # eps=0 uncut data are exactly scale invariant
    spec0 = DataSpec(epsilon=0.0, cutoff=False)
    assert rescale_data(spec0, 4.0, 1.0).u == pytest.approx(data_sample(spec0, 1.0).u)

    # eps=1 at x=0: lam^(1/2) * (1)^(-1/2) = 2
    spec1 = DataSpec(epsilon=1.0, cutoff=False)
    assert rescale_data(spec1, 4.0, 0.0).u == pytest.approx(2.0)

    with pytest.raises(ValueError):
        rescale_data(spec1, 0.0, 0.1)


@given(st.floats(0.01, 100.0), st.floats(-50.0, 50.0))
@settings(max_examples=60, deadline=None)
def test_scale_invariance_property(lam, x):
    if abs(x) < 1e-8 or abs(lam * x) < 1e-300:
        return
    spec0 = DataSpec(epsilon=0.0, cutoff=False)
    got = rescale_data(spec0, lam, x)
    want = data_sample(spec0, x)
    assert got.u == pytest.approx(want.u, rel=1e-12)
    assert got.v == pytest.approx(want.v, rel=1e-12)


def test_rescale_sampler_identity():
    spec = DataSpec(epsilon=0.0, cutoff=False)
    base = data_sampler(spec, "u")
    same = rescale_sampler(base, 1.0)
    xs = np.array([-2.0, -0.5, 0.3, 1.7])
    np.testing.assert_allclose(same(xs), base(xs))


def test_classify_examples():
    assert classify(0.0, 1.0) is Region.CONE
    assert classify(2.0, 1.0) is Region.RIGHT
    assert classify(-1.0, 1.0) is Region.CONE  # boundary points belong to the cone
    with pytest.raises(ValueError):
        classify(0.0, 0.0)


def test_wave_coords_example():
    w = to_wave(2.0, 1.0)
    assert (w.y, w.s) == (3.0, -1.0)


@given(st.floats(-100.0, 100.0), st.floats(-100.0, 100.0))
@settings(max_examples=100, deadline=None)
def test_wave_roundtrip(x, t):
    back = from_wave(to_wave(x, t))
    assert back[0] == pytest.approx(x, abs=1e-9)
    assert back[1] == pytest.approx(t, abs=1e-9)


def test_dataspec_config_roundtrip():
    spec = DataSpec(
        kappa_plus=1 + 2j,
        kappa_minus=-0.5j,
        lambda_plus=0.25,
        lambda_minus=3 - 1j,
        epsilon=0.125,
        cutoff=False,
        mass=0.5,
    )
    flat = dataspec_to_config(spec)
    assert set(flat) == {
        "kappa_plus_re", "kappa_plus_im", "kappa_minus_re", "kappa_minus_im",
        "lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im",
        "epsilon", "cutoff", "mass",
    }
    assert dataspec_from_config(flat) == spec


def test_dataspec_config_defaults_and_errors():
    assert dataspec_from_config({}) == DataSpec()
    with pytest.raises(ValueError):
        dataspec_from_config({"cutoff": "maybe"})
