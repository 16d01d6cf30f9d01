import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from conftest import random_plane
from lsid.guide import compute_guide, make_scale_spec, output_center, window_means
from lsid.raster import Plane


def test_scale_spec_div2k_factor2():
    s = make_scale_spec(2040, 1584, 2)
    assert (s.half, s.out_width, s.out_height, s.window_side) == (2, 1020, 792, 5)


def test_scale_spec_fractional():
    s = make_scale_spec(100, 100, 8.75)
    assert (s.half, s.out_width, s.out_height) == (9, 11, 11)


@pytest.mark.parametrize("factor", [1, 0.5, -3, float("nan")])
def test_scale_spec_bad_factor(factor):
    with pytest.raises(ValueError):
        make_scale_spec(10, 10, factor)


def test_scale_spec_too_small():
    with pytest.raises(ValueError, match="too small"):
        make_scale_spec(8, 8, 16)


@pytest.mark.parametrize(
    "p, factor, expected", [((0, 0), 4, (2, 2)), ((1, 1), 2, (3, 3)), ((0, 0), 8.75, (4, 4))]
)
def test_output_center(p, factor, expected):
    spec = make_scale_spec(100, 100, factor)
    assert output_center(p, spec) == expected


def test_output_center_clamped():
    spec = make_scale_spec(5, 5, 2.4)
    # floor(1 * 2.4 + 1.2) = 3, still inside; last row of a tall spec never leaves the image
    assert output_center((1, 1), spec) == (3, 3)
    with pytest.raises(IndexError):
        output_center((2, 0), spec)


def test_guide_ramp_example():
    img = np.arange(16).reshape(4, 4)
    g = compute_guide(Plane(img), make_scale_spec(4, 4, 2))
    # values from the brute-force window oracle
    assert g.data.tolist() == oracles.guide(img.tolist(), 2) == [[8, 8], [10, 10]]


@pytest.mark.parametrize("factor", [2, 3, 4, 8.75, 2.5])
def test_guide_matches_oracle(rng, factor):
    for _ in range(15):
        h, w = rng.integers(int(factor) + 1, 30, 2)
        img = random_plane(rng, h, w)
        g = compute_guide(Plane(img), make_scale_spec(w, h, factor))
        assert g.data.tolist() == oracles.guide(img.tolist(), factor)


@pytest.mark.parametrize("factor", [2, 4, 8, 16, 8.75, 12.5])
@pytest.mark.parametrize("v", [0, 128, 255])
def test_constant_fixed_point(factor, v):
    spec = make_scale_spec(40, 33, factor)
    g = compute_guide(Plane(np.full((33, 40), v)), spec)
    assert g.data.shape == (spec.out_height, spec.out_width)
    assert (g.data == v).all()


@settings(max_examples=60, deadline=None)
@given(
    img=st.tuples(st.integers(3, 40), st.integers(3, 40)).flatmap(lambda s: arrays(np.uint8, s)),
    factor=st.floats(1.05, 3.0),
)
def test_range_preservation(img, factor):
    h, w = img.shape
    spec = make_scale_spec(w, h, factor)
    means = window_means(Plane(img), spec)
    assert means.min() >= img.min() and means.max() <= img.max()
    g = compute_guide(Plane(img), spec)
    assert g.data.shape == (spec.out_height, spec.out_width)
    assert g.data.min() >= img.min() and g.data.max() <= img.max()


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        compute_guide(Plane(np.zeros((10, 10))), make_scale_spec(12, 10, 2))
