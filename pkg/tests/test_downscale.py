import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_plane
from lsid.baselines import downscale_box
from lsid.cooc import compute_profile
from lsid.downscale import (
    LsidParams,
    downscale_image,
    downscale_plane,
    filter_plane,
    weight,
    weight_table,
)
from lsid.guide import compute_guide, make_scale_spec
from lsid.raster import Plane, Raster

# Few-level plane where the co-occurrence kernel visibly departs from the box mean;
# expected outputs computed with oracles.lsid.
MIXED = [
    [21, 21, 45, 45, 60, 45],
    [45, 21, 60, 60, 21, 21],
    [45, 45, 46, 60, 45, 45],
    [60, 60, 21, 60, 46, 46],
    [46, 45, 45, 60, 60, 60],
    [46, 45, 46, 21, 21, 46],
]
MIXED_ALPHA5 = [[45, 44, 53], [47, 44, 46], [53, 46, 47]]
MIXED_ALPHA0 = [[45, 44, 46], [47, 44, 45], [46, 45, 47]]


def run_plane(img, factor, k, alpha, threads=1):
    plane = Plane(np.asarray(img))
    spec = make_scale_spec(plane.width, plane.height, factor)
    params = LsidParams(factor=factor, alpha=alpha, k=k)
    prof = compute_profile(plane, k)
    guide = compute_guide(plane, spec)
    return downscale_plane(plane, guide, prof, params, spec, threads=threads), (plane, guide, prof, params, spec)


def test_weight_examples():
    assert weight(0.3, 0.0) == 1.0
    assert weight(1.0, 5.0) == pytest.approx(148.4131591025766, rel=1e-15)
    assert weight(0.2, 5.0) < weight(0.7, 5.0)
    assert weight(0.2, -5.0) > weight(0.7, -5.0)


def test_weight_table_matches_scalar(rng):
    prof = compute_profile(Plane(random_plane(rng, 20, 20, style=0)), 2)
    table = weight_table(prof, 3.7)
    for a, b in rng.integers(0, 256, (200, 2)):
        assert table[a, b] == weight(prof.norm[a, b], 3.7)


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 5.0, 50.0])
@pytest.mark.parametrize("factor", [2, 3, 8.75])
def test_constant_plane(alpha, factor):
    out, _ = run_plane(np.full((30, 30), 77), factor, 3, alpha)
    assert (out.data == 77).all()


def test_mixed_plane_frozen():
    assert run_plane(MIXED, 2, 1, 5.0)[0].data.tolist() == MIXED_ALPHA5
    assert run_plane(MIXED, 2, 1, 0.0)[0].data.tolist() == MIXED_ALPHA0
    assert oracles.lsid(MIXED, 2, 1, 5.0)[0] == MIXED_ALPHA5


def test_step_edge():
    # two identical rows so that factor 2 yields one output row
    img = [[0, 0, 0, 255, 255, 255]] * 2
    out, _ = run_plane(img, 2, 1, 5.0)
    assert out.data.tolist() == oracles.lsid(img, 2, 1, 5.0)[0] == [[64, 153, 255]]


@pytest.mark.parametrize("factor", [2, 3, 2.5])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("alpha", [-2.0, 0.0, 5.0, 11.3])
def test_matches_oracle(rng, factor, k, alpha):
    for _ in range(6):
        h, w = rng.integers(3, 13, 2)
        img = random_plane(rng, h, w)
        out, _ = run_plane(img, factor, k, alpha)
        expected, raw, _ = oracles.lsid(img.tolist(), factor, k, alpha)
        assert out.data.tolist() == expected


@pytest.mark.parametrize("factor", [2, 4, 8.75])
def test_alpha_zero_is_box(rng, factor):
    img = Raster(rng.integers(0, 256, (61, 47, 3)))
    assert downscale_image(img, LsidParams(factor=factor, alpha=0.0)) == downscale_box(img, factor)


def test_convexity(rng):
    img = random_plane(rng, 40, 40, style=0)
    _, (plane, guide, prof, params, spec) = run_plane(img, 3, 2, 5.0)
    raw = filter_plane(plane, guide, prof, params, spec)
    lo = np.array([[b[0] for b in row] for row in oracles.lsid(img.tolist(), 3, 2, 5.0)[2]])
    hi = np.array([[b[1] for b in row] for row in oracles.lsid(img.tolist(), 3, 2, 5.0)[2]])
    assert (raw >= lo).all() and (raw <= hi).all()


def test_monotonicity_transfer():
    # a pixel pair with norm values c1 > c2: weight ratio grows with alpha
    ratios = [weight(0.8, a) / weight(0.3, a) for a in (0.5, 1.0, 2.0, 5.0, 10.0)]
    assert all(x < y for x, y in zip(ratios, ratios[1:]))


def test_channel_independence(rng):
    r = rng.integers(0, 256, (40, 36))
    b = rng.integers(0, 256, (40, 36))
    img = Raster(np.stack([r, np.full_like(r, 90), b], axis=2))
    params = LsidParams(factor=4)
    out = downscale_image(img, params)
    assert (out.data[:, :, 1] == 90).all()
    for c, plane in ((0, r), (2, b)):
        single = downscale_image(Raster(plane), params)
        assert np.array_equal(out.data[:, :, c], single.data[:, :, 0])


def test_grayscale_path(rng):
    img = Raster(rng.integers(0, 256, (24, 24)))
    out = downscale_image(img, LsidParams(factor=3))
    assert (out.width, out.height, out.channels) == (8, 8, 1)


def test_fractional_dims():
    img = Raster(np.zeros((1152, 2040), dtype=np.uint8))
    out = downscale_image(img, LsidParams(factor=8.75))
    assert (out.width, out.height) == (233, 131)


@pytest.mark.parametrize("threads", [2, 3, 5])
def test_thread_invariance(rng, threads):
    img = random_plane(rng, 90, 70, style=0)
    a, _ = run_plane(img, 4, 3, 5.0)
    b, _ = run_plane(img, 4, 3, 5.0, threads=threads)
    assert a == b


@pytest.mark.parametrize("kwargs", [dict(alpha=51.0), dict(alpha=math.inf), dict(k=0), dict(factor=1.0)])
def test_param_validation(kwargs):
    base = dict(factor=2.0, alpha=5.0, k=3)
    base.update(kwargs)
    with pytest.raises(ValueError):
        LsidParams(**base)


def test_mismatched_guide_or_profile(rng):
    img = random_plane(rng, 12, 12)
    _, (plane, guide, prof, params, spec) = run_plane(img, 2, 2, 5.0)
    with pytest.raises(ValueError):
        downscale_plane(plane, Plane(np.zeros((5, 6))), prof, params, spec)
    with pytest.raises(ValueError):
        downscale_plane(plane, guide, compute_profile(plane, 1), params, spec)


@settings(max_examples=200, deadline=None)
@given(c=st.floats(0, 1), alpha=st.floats(-50, 50))
def test_weight_log_linear(c, alpha):
    w = weight(c, alpha)
    assert w > 0
    assert abs(math.log(w) - alpha * c) <= 1e-12
