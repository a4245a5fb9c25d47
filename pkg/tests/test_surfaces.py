import json

import numpy as np
import pytest

from minkcsc.errors import (BoundaryIndexError, SpacelikeError)
from minkcsc.minkowski import boost, random_lorentz
from minkcsc.slstructure import nullity, sl_defect
from minkcsc.surfaces import (CurtainSample, HeightField, Hyperboloid,
                              TransformedSurface, curtain_build,
                              curtain_condition, field_from_function, jet_at,
                              jet_on, lift, sample_field, scalar_curvature,
                              sigma2, trace_ii_defect)


def round_leaf_field(k=1.0, n=17, half=0.5):
    return sample_field(Hyperboloid(k, d=3), [-half] * 3, [half] * 3, (n,) * 3)


def test_hyperboloid_jets_are_umbilic():
    for k in (0.5, 1.0, 2.0):
        hyp = Hyperboloid(k, d=3)
        jet = jet_on(hyp, np.array([0.3, -0.2, 0.1]))
        assert np.max(np.abs(jet.principal - k)) < 1e-12
        assert abs(scalar_curvature(jet) + k * k) < 1e-12
        # future unit normal
        assert abs(jet.normal[:3] @ jet.normal[:3] - jet.normal[3] ** 2 + 1) < 1e-12
        assert jet.normal[3] > 0


def test_tangent_frame_is_minkowski_orthonormal():
    jet = jet_on(Hyperboloid(1.0, d=3), np.array([0.4, 0.1, -0.3]))
    t = jet.tangent
    gram = t[:, :3] @ t[:, :3].T - np.outer(t[:, 3], t[:, 3])
    assert np.max(np.abs(gram - np.eye(3))) < 1e-12


def test_fd_jets_converge_to_analytic():
    hyp = Hyperboloid(1.0, d=3)
    errs = []
    for n in (17, 33):
        fld = sample_field(hyp, [-0.5] * 3, [0.5] * 3, (n,) * 3)
        idx = (n // 2 + 1, n // 3, n // 2)
        jet = jet_at(fld, idx)
        ref = jet_on(hyp, fld.node(idx))
        errs.append(np.max(np.abs(jet.principal - ref.principal)))
    assert errs[0] > errs[1]
    assert errs[1] < 1e-3


def test_jet_boundary_and_spacelike_errors():
    fld = round_leaf_field()
    with pytest.raises(BoundaryIndexError):
        jet_at(fld, (0, 5, 5))
    with pytest.raises(BoundaryIndexError):
        jet_at(fld, (5, 5, 16))
    with pytest.raises(SpacelikeError):
        field_from_function([-1.0], [1.0], (21,), lambda x: 1.5 * x[..., 0])


def test_height_field_json_round_trip(tmp_path):
    fld = round_leaf_field(n=9)
    path = tmp_path / "f.json"
    fld.save(path)
    back = HeightField.load(path)
    assert np.array_equal(back.values, fld.values)
    assert np.array_equal(back.domain_min, fld.domain_min)
    doc = json.loads(fld.to_json())
    assert doc["schema_version"] == 1
    assert doc["d"] == 3 and doc["shape"] == [9, 9, 9]


def test_height_field_rejects_bad_schema():
    fld = round_leaf_field(n=9)
    doc = json.loads(fld.to_json())
    doc["schema_version"] = 99
    with pytest.raises(ValueError):
        HeightField.from_json(json.dumps(doc))


def test_transformed_surface_matches_exact_image():
    rng = np.random.default_rng(8)
    hyp = Hyperboloid(1.0, d=3)
    lmap = random_lorentz(rng, 3, 0.6)
    v = np.array([0.1, -0.2, 0.3, 0.05])
    exact = hyp.transformed(lmap, v)
    generic = TransformedSurface(hyp, lmap, v)
    for _ in range(5):
        x = rng.uniform(-0.3, 0.3, 3)
        assert abs(exact.height(x) - generic.height(x)) < 1e-12
        assert np.max(np.abs(exact.gradient(x) - generic.gradient(x))) < 1e-10
        assert np.max(np.abs(exact.hessian(x) - generic.hessian(x))) < 1e-8
    jet = jet_on(generic, np.array([0.15, 0.22, -0.1]))
    assert np.max(np.abs(jet.principal - 1.0)) < 1e-8


def test_lift_is_special_legendrian_at_dictionary_scale():
    # sigma_2(k Id) = 3k^2 = 1 at k = 1/sqrt(3)
    k = 1.0 / np.sqrt(3)
    jet = jet_on(Hyperboloid(k, d=3), np.array([0.3, -0.2, 0.5]))
    frame = lift(jet)
    assert abs(sl_defect(frame, np.pi / 2)) < 1e-12
    # m restricted to the lift of a convex graph is positive definite
    gen = np.linalg.eigvalsh(np.linalg.solve(frame.g_gram(), frame.m_gram()))
    assert np.min(gen) > 0


def test_trace_ii_defect_vanishes_on_csc_lift():
    k = 1.0 / np.sqrt(3)
    hyp = Hyperboloid(k, d=3)
    val = trace_ii_defect(hyp, np.array([0.2, 0.1, -0.3]), np.array([1.0, -0.5, 0.2]))
    assert abs(val) < 1e-10
    # fails its precondition away from sigma_2 = 1
    with pytest.raises(ValueError):
        trace_ii_defect(Hyperboloid(1.0, d=3), np.zeros(3), np.array([1.0, 0, 0]))


def test_curtain_condition_formula():
    rng = np.random.default_rng(2)
    for _ in range(10):
        m = rng.standard_normal((2, 2))
        hess = m + m.T
        phi = rng.standard_normal()
        theta = rng.uniform(0, np.pi)
        want = np.imag(np.exp(1j * theta)
                       * np.linalg.det(hess + (1j - phi) * np.eye(2)))
        got = curtain_condition(phi, np.zeros(2), hess, theta)
        assert abs(got - want) < 1e-12
    # constant phi on a 2-dimensional base: defect c^2 - 1 at theta = pi/2
    assert abs(curtain_condition(0.5, np.zeros(2), np.zeros((2, 2)), np.pi / 2)
               - (-0.75)) < 1e-12


def test_curtain_build_phi_one():
    samples = curtain_build(3, (0, 1), 1.0, [0.0, 0.7, -0.4],
                            chart_points=[np.zeros(2), np.array([0.3, -0.6])])
    assert len(samples) == 6
    for s in samples:
        assert isinstance(s, CurtainSample)
        assert abs(sl_defect(s.frame, np.pi / 2)) < 1e-9
        assert nullity(s.frame) >= 1


def test_curtain_m_positivity_with_negative_phi():
    # xi = -phi y, so phi = -1 gives the positive curtain
    for s in curtain_build(3, (0, 1), -1.0, [0.0, 0.5]):
        lam = np.linalg.eigvalsh(s.frame.m_gram())
        assert np.min(lam) > -1e-12


def test_curtain_phi_zero_is_maximally_non_special():
    for s in curtain_build(3, (0, 1), 0.0, [0.0, 0.5]):
        assert abs(abs(sl_defect(s.frame, np.pi / 2)) - 1.0) < 1e-9


def test_curtain_zero_dimensional_base():
    s = curtain_build(3, (), 0.8, [[0.1, 0.2, 0.3]])[0]
    # purely real frame: m vanishes identically and the calibration value is
    # real, so the pi/2 defect has modulus one
    assert nullity(s.frame) == 3
    assert abs(abs(sl_defect(s.frame, np.pi / 2)) - 1.0) < 1e-12


def test_sigma2_helper():
    assert sigma2([1.0, 2.0, 3.0]) == 11.0
    assert abs(sigma2([1, 1, 1] / np.sqrt(3)) - 1.0) < 1e-12


def test_boost_image_is_csc():
    hyp = Hyperboloid(1.0, center=np.array([0.0, 0, 0, 0.3]), d=3)
    moved = hyp.transformed(boost(np.array([1.0, 0, 0, 0]), 0.8))
    jet = jet_on(moved, np.array([0.1, -0.2, 0.25]))
    assert abs(scalar_curvature(jet) + 1.0) < 1e-12
