import numpy as np
import pytest

from minkcsc.errors import FrameError, NumericalError
from minkcsc.slstructure import (ContactPoint, LagrangianFrame, contact_curvature,
                                 gmet, graph_frame, graphical_sl_defect, jmap,
                                 liouville, mmet, nullity, omega, omega_eval,
                                 omega_hat_eval, orthonormalized, pair, phi_k,
                                 random_lagrangian_basis, refined_angle, rmap,
                                 scale_to_angle, simultaneous_diagonalize,
                                 sl_defect, spatial_basis)

RNG = np.random.default_rng(42)
P0 = ContactPoint(np.zeros(4), np.array([0.0, 0, 0, 1.0]))


def rand_pair(rng, d=3):
    return pair(rng.standard_normal(d + 1), rng.standard_normal(d + 1))


def test_structure_maps():
    for _ in range(50):
        x, y = rand_pair(RNG), rand_pair(RNG)
        assert np.allclose(jmap(jmap(x)), -x)
        assert np.allclose(rmap(rmap(x)), x)
        assert np.allclose(jmap(rmap(x)), -rmap(jmap(x)))
        assert abs(omega(jmap(x), jmap(y)) - omega(x, y)) < 1e-12
        assert abs(omega(rmap(x), rmap(y)) + omega(x, y)) < 1e-12
        assert abs(gmet(x, y) - omega(x, jmap(y))) < 1e-12
        assert abs(mmet(x, y) + omega(x, rmap(y))) < 1e-12


def test_contact_point_validation():
    with pytest.raises(FrameError):
        ContactPoint(np.zeros(4), np.array([0.0, 0, 0, 2.0]))
    with pytest.raises(FrameError):
        ContactPoint(np.zeros(4), np.array([0.0, 0, 0, -1.0]))


def test_spatial_basis_is_orthonormal_complement():
    rng = np.random.default_rng(7)
    from minkcsc.minkowski import mink_inner, random_lorentz
    for _ in range(10):
        y = random_lorentz(rng, 3, 1.0).apply([0, 0, 0, 1.0])
        basis = spatial_basis(y)
        for a in range(3):
            assert abs(mink_inner(basis[a], y)) < 1e-10
            for b in range(3):
                assert abs(mink_inner(basis[a], basis[b]) - (a == b)) < 1e-10


def test_graph_frame_requires_symmetry():
    b = np.array([[1.0, 2, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(FrameError):
        graph_frame(P0, b)


def test_liouville_vanishes_on_fibre():
    frame = graph_frame(P0, np.diag([1.0, 2, 3]))
    for v in frame.vectors:
        assert abs(liouville(frame.point, v)) < 1e-12


def test_lagrangian_basis_signature_and_volume():
    rng = np.random.default_rng(9)
    for _ in range(20):
        basis = random_lagrangian_basis(rng, 3)
        gram = np.array([[gmet(a, b) for b in basis] for a in basis])
        lam = np.linalg.eigvalsh(gram)
        assert np.sum(lam > 0) == 3 and np.sum(lam < 0) == 1
        assert abs(abs(omega_hat_eval(basis)) - 1.0) < 1e-9
        for i in range(4):
            for j in range(i + 1, 4):
                assert abs(omega(basis[i], basis[j])) < 1e-9


def test_orthonormalized_frame():
    frame = graph_frame(P0, np.diag([0.5, 1.0, 2.0]))
    on = orthonormalized(frame)
    assert on.orthonormal
    assert np.max(np.abs(on.g_gram() - np.eye(3))) < 1e-12


def test_sl_defect_vanishes_at_sigma2_one():
    # sigma_2(diag(t,t,t)) = 3 t^2 = 1 at t = 1/sqrt(3)
    b = np.eye(3) / np.sqrt(3)
    frame = graph_frame(P0, b)
    assert abs(sl_defect(frame, np.pi / 2)) < 1e-12
    assert abs(graphical_sl_defect(b, np.pi / 2)) < 1e-12
    # off the sigma_2 = 1 locus the defect is nonzero
    assert abs(sl_defect(graph_frame(P0, 1.2 * b), np.pi / 2)) > 1e-3


def test_sl_defect_matches_graphical_form():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = rng.standard_normal((3, 3))
        b = 0.6 * (m + m.T)
        frame = orthonormalized(graph_frame(P0, b))
        # both expressions differ by the positive factor prod sqrt(1+mu_i^2)
        val = sl_defect(frame, 0.4)
        ref = graphical_sl_defect(b, 0.4)
        scale = np.prod(np.sqrt(1 + np.linalg.eigvalsh(b) ** 2))
        assert abs(abs(val) * scale - abs(ref)) < 1e-9 * scale


def test_omega_eval_modulus_on_orthonormal_frames():
    frame = orthonormalized(graph_frame(P0, np.diag([0.3, 0.9, 1.8])))
    assert abs(abs(omega_eval(frame)) - 1.0) < 1e-12


def test_refined_angle_examples():
    assert abs(refined_angle(np.eye(3)) - 3 * np.pi / 4) < 1e-12
    # arctan1 + arctan2 + arctan3 = pi
    assert abs(refined_angle(np.diag([1.0, 2, 3])) - np.pi) < 1e-12
    with pytest.raises(ValueError):
        refined_angle(np.diag([-1.0, 2, 3]))


def test_scale_to_angle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = rng.standard_normal((3, 3))
        b = scale_to_angle(m @ m.T + 0.1 * np.eye(3), np.pi / 2)
        assert abs(refined_angle(b) - np.pi / 2) < 1e-10
        # at the pi/2 branch sigma_2 = 1 and the defect vanishes
        assert abs(graphical_sl_defect(b, np.pi / 2)) < 1e-9


def test_simultaneous_diagonalize_graph_values():
    # graph of diag(mu): m eigenvalues 2mu/(1+mu^2), m(.,J.) gives (1-mu^2)/(1+mu^2)
    mu = np.array([3.0, 2.0, 1.0])
    frame = graph_frame(P0, np.diag(mu))
    basis, m_diag, mj_diag = simultaneous_diagonalize(frame)
    want_m = np.sort(2 * mu / (1 + mu ** 2))
    assert np.max(np.abs(m_diag - want_m)) < 1e-12
    want_mj = {round(float(v), 9) for v in (1 - mu ** 2) / (1 + mu ** 2)}
    got_mj = {round(float(v), 9) for v in mj_diag}
    assert want_mj == got_mj
    assert np.max(np.abs(basis.g_gram() - np.eye(3))) < 1e-9


def test_simultaneous_diagonalize_rejects_non_commuting_input():
    # a frame that is independent and in the fibre but NOT lagrangian is
    # rejected at construction, so force the numerical failure by hand
    frame = graph_frame(P0, np.diag([1.0, 1.0, 2.0]))
    bad = LagrangianFrame(frame.point, frame.vectors, frame.tolerance)
    object.__setattr__(bad, "vectors", frame.vectors + 0.0)
    # perturb one vector's imaginary part beyond the lagrangian tolerance
    v = bad.vectors.copy()
    v[0, 1] += 2e-4 * np.array([0.0, 1.0, 1.0, 0.0])
    object.__setattr__(bad, "vectors", v)
    with pytest.raises((NumericalError, FrameError)):
        simultaneous_diagonalize(bad)


def test_phi_k_matches_small_brute_force():
    rng = np.random.default_rng(12)
    m = rng.standard_normal((3, 3))
    frame = graph_frame(P0, 0.7 * (m + m.T))
    gram = frame.g_gram()
    mm = frame.m_gram()
    chol = np.linalg.cholesky(gram)
    for k in (1, 2, 3):
        val = phi_k(frame, k)
        best = np.inf
        for _ in range(3000):
            c = rng.standard_normal((3, k))
            q, _ = np.linalg.qr(c)
            w = np.linalg.solve(chol.T, q)
            best = min(best, float(np.einsum("ak,ab,bk->", w, mm, w)))
        assert val <= best + 1e-12
        assert best - val < 5e-3


def test_nullity():
    assert nullity(graph_frame(P0, np.diag([0.0, 1.0, 2.0]))) == 1
    assert nullity(graph_frame(P0, np.diag([0.0, 0.0, 2.0]))) == 2
    assert nullity(graph_frame(P0, np.eye(3))) == 0


def test_contact_curvature_symmetries():
    rng = np.random.default_rng(5)
    basis = spatial_basis(P0.y)
    def fibre_vec():
        c = rng.standard_normal((2, 3))
        return pair(basis.T @ c[0], basis.T @ c[1])
    for _ in range(10):
        x, y, z, w = (fibre_vec() for _ in range(4))
        r = contact_curvature(P0, x, y, z, w)
        assert abs(r + contact_curvature(P0, y, x, z, w)) < 1e-9
        assert abs(r + contact_curvature(P0, x, y, w, z)) < 1e-9


def test_contact_curvature_values():
    e1, e2 = np.eye(4)[0], np.eye(4)[1]
    zero = np.zeros(4)
    # purely real vectors span a flat plane
    x, y = pair(e1, zero), pair(e2, zero)
    assert contact_curvature(P0, x, y, y, x) == 0.0
    # purely imaginary orthonormal pair: sectional curvature -1
    xi, yi = pair(zero, e1), pair(zero, e2)
    assert contact_curvature(P0, xi, yi, yi, xi) == -1.0


def test_contact_curvature_rejects_non_fibre_vectors():
    bad = pair(np.array([0.0, 0, 0, 1.0]), np.zeros(4))
    with pytest.raises(FrameError):
        contact_curvature(P0, bad, bad, bad, bad)
