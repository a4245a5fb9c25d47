import numpy as np
import pytest

from minkcsc.errors import DimensionMismatchError, SignatureError
from minkcsc.minkowski import (LorentzMap, boost, classify, eta,
                               lorentz_orthonormalize, mink_inner, mink_norm2,
                               random_lorentz, spatial_rotation)


def test_inner_product_signs():
    assert mink_inner([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert mink_inner([0, 0, 0, 1], [0, 0, 0, 1]) == -1.0
    assert mink_inner([1, 2, 3, 4], [4, 3, 2, 1]) == 4 + 6 + 6 - 4


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        mink_inner([1, 0, 0], [1, 0, 0, 0])


def test_classify_tags():
    assert classify([1.0, 0, 0, 0]).tag == "spacelike"
    t = classify([0, 0, 0, 1.0])
    assert t.tag == "timelike" and t.future
    p = classify([0, 0, 0, -1.0])
    assert p.tag == "timelike" and not p.future
    n = classify([1.0, 0, 0, 1.0])
    assert n.tag == "null" and n.future
    assert classify([0.0, 0, 0, 0]).tag == "zero"


def test_classify_tolerance_scales():
    # a nearly-null large vector should be tagged null by the default tol
    v = np.array([1e6, 0.0, 0.0, 1e6 + 1e-9])
    assert classify(v).tag == "null"


def test_boost_moves_time_axis():
    b = boost(np.array([1.0, 0, 0, 0]), 0.7)
    img = b.apply([0, 0, 0, 1.0])
    assert np.allclose(img, [np.sinh(0.7), 0, 0, np.cosh(0.7)])
    assert b.future_preserving


def test_boost_is_one_parameter_group():
    n = np.array([0.0, 1.0, 0, 0])
    ab = boost(n, 0.3) @ boost(n, 0.5)
    assert np.allclose(ab.entries, boost(n, 0.8).entries, atol=1e-12)
    assert np.allclose(boost(n, 0.0).entries, np.eye(4))


def test_boost_rejects_bad_direction():
    with pytest.raises(ValueError):
        boost(np.array([2.0, 0, 0, 0]), 0.5)
    with pytest.raises(ValueError):
        boost(np.array([0.0, 0, 0, 1.0]), 0.5)


def test_lorentz_map_validates():
    with pytest.raises(SignatureError):
        LorentzMap(np.diag([1.0, 1, 1, 2]))
    m = LorentzMap.identity(3)
    assert m.dim == 3


def test_lorentz_inverse_and_composition():
    rng = np.random.default_rng(11)
    m = random_lorentz(rng, 3, 1.0)
    prod = m @ m.inverse()
    assert np.max(np.abs(prod.entries - np.eye(4))) < 1e-12
    v = rng.standard_normal(4)
    assert abs(mink_norm2(m.apply(v)) - mink_norm2(v)) < 1e-10


def test_spatial_rotation_fixes_time():
    q, _ = np.linalg.qr(np.random.default_rng(2).standard_normal((3, 3)))
    r = spatial_rotation(q)
    assert np.allclose(r.apply([0, 0, 0, 1.0]), [0, 0, 0, 1.0])


def test_orthonormalize_gram_is_eta():
    rng = np.random.default_rng(4)
    for _ in range(20):
        basis = random_lorentz(rng, 3, 1.2).entries @ rng.standard_normal((4, 4))
        while abs(np.linalg.det(basis)) < 1e-3:
            basis = rng.standard_normal((4, 4))
        frame = lorentz_orthonormalize(list(basis.T))
        gram = np.array([[mink_inner(u, v) for v in frame] for u in frame])
        assert np.max(np.abs(gram - eta(3))) < 1e-9
        assert frame[-1][-1] > 0  # temporal vector is future


def test_orthonormalize_rejects_spacelike_span():
    # span of three spatial directions plus a dependent vector
    vecs = [np.eye(4)[0], np.eye(4)[1], np.eye(4)[2],
            np.eye(4)[0] + np.eye(4)[1]]
    with pytest.raises(SignatureError):
        lorentz_orthonormalize(vecs)
