"""Spacelike graph hypersurfaces x_{d+1} = u(x) in R^{d,1}.

Provides grid-sampled height fields with finite-difference jets, analytic
oracle surfaces with exact jets, legendrian lifts into the contact bundle,
and the curtain construction over totally geodesic subspheres of H^d.

Graph formulas used throughout (p = grad u, H = Hess u, nu = sqrt(1-|p|^2)):

    induced metric   G = Id - p p^T
    future normal    N = (p, 1) / nu
    shape operator   A = G^{-1} H / nu          (coordinate frame)
                     A_sym = G^{-1/2} H G^{-1/2} / nu   (orthonormal frame)

These are the unique closed forms satisfying the unit-normal and
Weingarten relations, validated against the hyperboloid oracle in tests.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (BoundaryIndexError, DimensionMismatchError, SpacelikeError)
from .minkowski import LorentzMap, mink_inner
from .slstructure import ContactPoint, LagrangianFrame, gmet, omega, pair

__all__ = [
    "HeightField",
    "field_from_function",
    "sample_field",
    "SurfaceJet",
    "jet_from_derivatives",
    "jet_at",
    "jet_on",
    "scalar_curvature",
    "sigma2",
    "lift",
    "Hyperboloid",
    "TransformedSurface",
    "trace_ii_defect",
    "curtain_condition",
    "CurtainSample",
    "curtain_build",
]

SCHEMA_VERSION = 1


@dataclass
class HeightField:
    """A spacelike graph sampled on a rectangular grid.

    ``values`` has one axis per spatial dimension; grid node i along axis a
    sits at domain_min[a] + i * spacing[a].  Construction checks that the
    interior central-difference gradient stays below 1 - margin.
    """

    domain_min: np.ndarray
    domain_max: np.ndarray
    values: np.ndarray
    margin: float = 1e-3
    validate: bool = True

    def __post_init__(self):
        self.domain_min = np.atleast_1d(np.asarray(self.domain_min, dtype=float))
        self.domain_max = np.atleast_1d(np.asarray(self.domain_max, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        d = self.domain_min.shape[0]
        if self.domain_max.shape != (d,) or self.values.ndim != d:
            raise DimensionMismatchError("domain bounds and value grid are inconsistent")
        if np.any(self.domain_max <= self.domain_min) or min(self.values.shape) < 3:
            raise ValueError("need a nondegenerate domain with at least 3 nodes per axis")
        if self.validate:
            self.check_spacelike()

    @property
    def dim(self) -> int:
        return self.domain_min.shape[0]

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def spacing(self) -> np.ndarray:
        n = np.array(self.values.shape)
        return (self.domain_max - self.domain_min) / (n - 1)

    def axis_coords(self, a: int) -> np.ndarray:
        return self.domain_min[a] + self.spacing[a] * np.arange(self.values.shape[a])

    def node(self, index) -> np.ndarray:
        return self.domain_min + self.spacing * np.asarray(index)

    def interior_gradient(self) -> np.ndarray:
        """Central-difference gradient at interior nodes, shape (d,) + interior."""
        core = tuple(slice(1, -1) for _ in range(self.dim))
        out = []
        for a in range(self.dim):
            hi = tuple(slice(2, None) if b == a else slice(1, -1) for b in range(self.dim))
            lo = tuple(slice(None, -2) if b == a else slice(1, -1) for b in range(self.dim))
            out.append((self.values[hi] - self.values[lo]) / (2 * self.spacing[a]))
        del core
        return np.stack(out)

    def check_spacelike(self):
        grad = self.interior_gradient()
        speed = np.sqrt(np.sum(grad * grad, axis=0))
        worst = float(np.max(speed))
        if worst >= 1.0 - self.margin:
            raise SpacelikeError(
                f"max |grad u| = {worst:.6f} violates the spacelike margin {self.margin}")

    def with_values(self, values) -> "HeightField":
        return HeightField(self.domain_min, self.domain_max, values,
                           margin=self.margin, validate=self.validate)

    # JSON round trip -----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "d": self.dim,
            "domain_min": list(self.domain_min),
            "domain_max": list(self.domain_max),
            "shape": list(self.values.shape),
            "spacing": list(self.spacing),
            "values": [float(v) for v in self.values.ravel(order="C")],
        }
        return json.dumps(doc)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text: str, margin: float = 1e-3) -> "HeightField":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')}")
        shape = tuple(doc["shape"])
        values = np.array(doc["values"], dtype=float).reshape(shape, order="C")
        fld = cls(np.array(doc["domain_min"]), np.array(doc["domain_max"]), values,
                  margin=margin)
        if not np.allclose(fld.spacing, doc["spacing"], rtol=1e-12, atol=1e-12):
            raise ValueError("stored spacing is inconsistent with bounds and shape")
        return fld

    @classmethod
    def load(cls, path, margin: float = 1e-3) -> "HeightField":
        with open(path) as fh:
            return cls.from_json(fh.read(), margin=margin)


def field_from_function(domain_min, domain_max, shape, fn, margin=1e-3) -> HeightField:
    """Sample u = fn(points) on a rectangular grid; fn acts on (..., d) arrays."""
    domain_min = np.atleast_1d(np.asarray(domain_min, dtype=float))
    domain_max = np.atleast_1d(np.asarray(domain_max, dtype=float))
    axes = [np.linspace(domain_min[a], domain_max[a], shape[a])
            for a in range(len(shape))]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return HeightField(domain_min, domain_max, fn(mesh), margin=margin)


def sample_field(surface, domain_min, domain_max, shape, margin=1e-3) -> HeightField:
    return field_from_function(domain_min, domain_max, shape, surface.height,
                               margin=margin)


# ---------------------------------------------------------------------------
# jets


@dataclass(frozen=True)
class SurfaceJet:
    """Second-order data of a spacelike graph at one point.

    ``tangent`` rows are a Minkowski-orthonormal tangent frame; ``shape_op``
    is the symmetric matrix of the Weingarten map in that frame, so its
    eigenvalues are the principal curvatures.
    """

    x: np.ndarray          # base point, spatial
    u: float
    grad: np.ndarray
    hess: np.ndarray
    normal: np.ndarray     # future unit timelike, length d+1
    tangent: np.ndarray    # (d, d+1) orthonormal frame
    shape_op: np.ndarray   # (d, d) symmetric
    principal: np.ndarray  # eigenvalues, ascending

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def point(self) -> np.ndarray:
        return np.append(self.x, self.u)


def jet_from_derivatives(x, u, grad, hess, margin=0.0) -> SurfaceJet:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    grad = np.atleast_1d(np.asarray(grad, dtype=float))
    hess = np.asarray(hess, dtype=float)
    hess = np.atleast_2d(0.5 * (hess + hess.T))
    d = x.shape[0]
    speed2 = float(grad @ grad)
    if speed2 >= (1.0 - margin) ** 2:
        raise SpacelikeError(f"|grad u| = {np.sqrt(speed2):.6f} is not spacelike")
    nu = np.sqrt(1.0 - speed2)
    normal = np.append(grad, 1.0) / nu

    g = np.eye(d) - np.outer(grad, grad)
    lam, q = np.linalg.eigh(g)
    g_isqrt = (q / np.sqrt(lam)) @ q.T
    a_sym = g_isqrt @ hess @ g_isqrt / nu
    a_sym = 0.5 * (a_sym + a_sym.T)

    coord_frame = np.hstack([np.eye(d), grad[:, None]])  # rows T_b = (e_b, p_b)
    tangent = g_isqrt @ coord_frame
    principal = np.linalg.eigvalsh(a_sym)
    return SurfaceJet(x, float(u), grad, hess, normal, tangent, a_sym, principal)


def jet_at(field: HeightField, index, margin=None) -> SurfaceJet:
    """Finite-difference jet at an interior grid node (central second order)."""
    idx = tuple(int(i) for i in index)
    d = field.dim
    n = field.shape
    if len(idx) != d:
        raise DimensionMismatchError("index rank does not match the grid")
    if any(not 1 <= idx[a] <= n[a] - 2 for a in range(d)):
        raise BoundaryIndexError(f"index {idx} is too close to the boundary for jets")
    if margin is None:
        margin = field.margin
    h = field.spacing
    v = field.values

    def at(offset):
        return v[tuple(idx[a] + offset[a] for a in range(d))]

    grad = np.zeros(d)
    hess = np.zeros((d, d))
    zero = (0,) * d
    for a in range(d):
        ea = tuple(1 if b == a else 0 for b in range(d))
        ma = tuple(-1 if b == a else 0 for b in range(d))
        grad[a] = (at(ea) - at(ma)) / (2 * h[a])
        hess[a, a] = (at(ea) - 2 * at(zero) + at(ma)) / h[a] ** 2
    for a in range(d):
        for b in range(a + 1, d):
            pp = tuple((1 if c == a else 0) + (1 if c == b else 0) for c in range(d))
            pm = tuple((1 if c == a else 0) - (1 if c == b else 0) for c in range(d))
            mp = tuple(-(1 if c == a else 0) + (1 if c == b else 0) for c in range(d))
            mm = tuple(-(1 if c == a else 0) - (1 if c == b else 0) for c in range(d))
            hess[a, b] = hess[b, a] = (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * h[a] * h[b])
    try:
        return jet_from_derivatives(field.node(idx), at(zero), grad, hess, margin=margin)
    except SpacelikeError as exc:
        raise SpacelikeError(f"stencil at {idx}: {exc}") from exc


def jet_on(surface, x) -> SurfaceJet:
    """Exact jet of an analytic surface."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return jet_from_derivatives(x, surface.height(x), surface.gradient(x),
                                surface.hessian(x))


def sigma2(principal) -> float:
    lam = np.asarray(principal, dtype=float)
    s1 = float(np.sum(lam))
    return 0.5 * (s1 * s1 - float(np.sum(lam * lam)))


def scalar_curvature(jet: SurfaceJet) -> float:
    """S = -(2 / d(d-1)) sigma_2(principal curvatures)."""
    d = jet.dim
    if d < 2:
        raise ValueError("scalar curvature needs d >= 2")
    return -2.0 * sigma2(jet.principal) / (d * (d - 1))


def lift(jet: SurfaceJet, tolerance: float = 1e-8) -> LagrangianFrame:
    """Legendrian lift: the frame (T_a, A T_a) at the contact point (x, N(x))."""
    p = ContactPoint(jet.point, jet.normal, tolerance=tolerance)
    a_img = jet.shape_op @ jet.tangent  # rows: sum_b A[a,b] T_b
    vectors = np.stack([pair(jet.tangent[a], a_img[a]) for a in range(jet.dim)])
    return LagrangianFrame(p, vectors, tolerance)


# ---------------------------------------------------------------------------
# analytic oracle surfaces


class Hyperboloid:
    """The hyperboloid |X - center|^2 = -1/k^2 (future sheet) as a graph.

    This is the fuchsian leaf of curvature parameter k; its shape operator
    is k Id everywhere and its scalar curvature is -k^2.  Affine isometries
    map hyperboloids to hyperboloids, so ``transformed`` stays exact.
    """

    def __init__(self, k: float, center=None, d: int = 3):
        if k <= 0:
            raise ValueError("k must be positive")
        if center is None:
            center = np.zeros(d + 1)
        center = np.asarray(center, dtype=float)
        self.k = float(k)
        self.center = center
        self.d = center.shape[0] - 1

    def _w(self, x):
        q = np.asarray(x, dtype=float) - self.center[:-1]
        return q, np.sqrt(1.0 / self.k ** 2 + np.sum(q * q, axis=-1))

    def height(self, x):
        q, w = self._w(x)
        return self.center[-1] + w

    def gradient(self, x):
        q, w = self._w(x)
        return q / w[..., None] if np.ndim(w) else q / w

    def hessian(self, x):
        q, w = self._w(x)
        return np.eye(self.d) / w - np.outer(q, q) / w ** 3

    def transformed(self, lmap: LorentzMap, translation=None) -> "Hyperboloid":
        t = np.zeros(self.d + 1) if translation is None else np.asarray(translation)
        if not lmap.future_preserving:
            raise ValueError("only future-preserving isometries keep the future sheet")
        return Hyperboloid(self.k, lmap.apply(self.center) + t, d=self.d)


class TransformedSurface:
    """Image of an analytic graph under an affine isometry, re-read as a graph.

    The base point is found by Newton iteration; the gradient follows from
    the implicit function theorem and the hessian by central differences of
    that exact gradient.
    """

    def __init__(self, base, lmap: LorentzMap, translation=None, fd_step=1e-6):
        self.base = base
        self.lmap = lmap
        d = lmap.dim
        self.d = d
        self.translation = (np.zeros(d + 1) if translation is None
                            else np.asarray(translation, dtype=float))
        m = lmap.entries
        self.m_ss = m[:d, :d]
        self.m_st = m[:d, d]
        self.m_ts = m[d, :d]
        self.m_tt = m[d, d]
        self.fd_step = fd_step

    def _preimage(self, x):
        x = np.asarray(x, dtype=float)
        xi = np.linalg.solve(self.m_ss + np.outer(self.m_st, self.m_ts) / max(self.m_tt, 1.0),
                             x - self.translation[:-1])
        for _ in range(60):
            res = self.m_ss @ xi + self.m_st * self.base.height(xi) + self.translation[:-1] - x
            if np.max(np.abs(res)) < 1e-14 * (1.0 + np.max(np.abs(x))):
                break
            jac = self.m_ss + np.outer(self.m_st, self.base.gradient(xi))
            xi = xi - np.linalg.solve(jac, res)
        return xi

    def height(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim > 1:
            flat = x.reshape(-1, x.shape[-1])
            return np.array([self.height(p) for p in flat]).reshape(x.shape[:-1])
        xi = self._preimage(x)
        return float(self.m_ts @ xi + self.m_tt * self.base.height(xi)
                     + self.translation[-1])

    def gradient(self, x):
        xi = self._preimage(np.asarray(x, dtype=float))
        g0 = self.base.gradient(xi)
        dxi = np.linalg.inv(self.m_ss + np.outer(self.m_st, g0))
        return (self.m_ts + self.m_tt * g0) @ dxi

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        h = self.fd_step
        out = np.zeros((self.d, self.d))
        for a in range(self.d):
            e = np.zeros(self.d)
            e[a] = h
            out[:, a] = (self.gradient(x + e) - self.gradient(x - e)) / (2 * h)
        return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# second fundamental form trace of the lift


def trace_ii_defect(surface, x, direction, sigma2_tol=1e-4, fd_step=1e-4):
    """sum_a II(X, e_a, e_a) of the legendrian lift, over an orthonormal frame.

    Vanishes for lifts of surfaces with sigma_2 = 1 (the pi/2-special
    legendrian case); the surface must be analytic since third derivatives
    enter through the finite difference of the lift's tangent fields.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    direction = np.atleast_1d(np.asarray(direction, dtype=float))
    jet = jet_on(surface, x)
    s2 = sigma2(jet.principal)
    if abs(s2 - 1.0) > sigma2_tol:
        raise ValueError(f"sigma_2 = {s2:.6f} is not 1 within {sigma2_tol}; "
                         "the lift is not pi/2-special legendrian")

    def coord_fields(pt):
        j = jet_on(surface, pt)
        d = j.dim
        nu = np.sqrt(1.0 - j.grad @ j.grad)
        dnu_inv = (j.hess @ j.grad) / nu ** 3  # grad of 1/nu
        n_ext = np.append(j.grad, 1.0)
        fields = []
        for a in range(d):
            t_a = np.append(np.eye(d)[a], j.grad[a])
            dn_a = np.append(j.hess[:, a], 0.0) / nu + n_ext * dnu_inv[a]
            fields.append(pair(t_a, dn_a))
        return np.stack(fields)

    v0 = coord_fields(x)
    step = fd_step * direction / np.linalg.norm(direction)
    dv = (coord_fields(x + step) - coord_fields(x - step)) / (2 * fd_step)

    d = jet.dim
    gram = np.array([[gmet(v0[a], v0[b]) for b in range(d)] for a in range(d)])
    ginv = np.linalg.inv(gram)
    total = 0.0
    for a in range(d):
        for b in range(d):
            total += ginv[a, b] * (-omega(dv[a], v0[b]))
    return float(total)


# ---------------------------------------------------------------------------
# curtain submanifolds


def curtain_condition(phi_value, phi_gradient, phi_hessian, theta):
    """Im(e^{i theta} det(Hess(phi) + (i - phi) Id)) on a d'-dimensional base.

    The gradient enters the displacement field, not this determinant; it is
    accepted so callers can pass a full 2-jet of phi.
    """
    del phi_gradient
    h = np.atleast_2d(np.asarray(phi_hessian, dtype=float))
    if np.max(np.abs(h - h.T)) > 1e-9 * (1.0 + np.max(np.abs(h))):
        raise ValueError("phi hessian must be symmetric")
    n = h.shape[0]
    val = np.linalg.det(h + (1j - phi_value) * np.eye(n))
    return float(np.imag(np.exp(1j * theta) * val))


@dataclass(frozen=True)
class CurtainSample:
    base: np.ndarray            # y on the geodesic subsphere S
    normal_offset: np.ndarray   # x in N_y S
    displacement: np.ndarray    # xi(y) = grad phi - phi y
    point: ContactPoint         # (x + xi(y), y)
    frame: LagrangianFrame
    chart: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _sphere_chart(axes, w, d):
    """Point of S = H^d intersect span(axes + time), plus frames at it."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    dprime = len(axes)
    y = np.zeros(d + 1)
    y[list(axes)] = w
    y[d] = np.sqrt(1.0 + w @ w)
    tangent = []
    for i, a in enumerate(axes):
        t = np.zeros(d + 1)
        t[a] = 1.0
        t[d] = w[i] / y[d]
        tangent.append(t)
    if dprime:
        tangent = np.stack(tangent)
        gram = np.array([[mink_inner(s, t) for t in tangent] for s in tangent])
        chol = np.linalg.cholesky(gram)
        tangent = np.linalg.solve(chol, tangent)
    else:
        tangent = np.zeros((0, d + 1))
    normal_axes = [a for a in range(d) if a not in axes]
    normals = np.eye(d + 1)[normal_axes]
    return y, tangent, normals


def curtain_build(d, axes, phi, offsets, chart_points=None, tolerance=1e-9):
    """Samples of the curtain N^xi S over S = H^{d'} = H^d intersect span(axes).

    ``axes`` lists the d' spatial coordinate axes spanning S (d' < d), and
    ``phi`` is a constant; the displacement is xi(y) = grad(phi) - phi y and
    the tangent frame follows the normal-bundle construction with the shape
    operator of the totally geodesic S identically zero.  ``offsets``
    scales the normal directions: scalars for codimension one, otherwise
    (d - d')-vectors.  ``chart_points`` are d'-tuples of chart coordinates
    on S (one sample per (chart_point, offset) combination).
    """
    axes = tuple(int(a) for a in axes)
    dprime = len(axes)
    if dprime >= d or any(not 0 <= a < d for a in axes) or len(set(axes)) != dprime:
        raise ValueError("axes must be distinct spatial axes with d' < d")
    phi = float(phi)
    if chart_points is None:
        chart_points = [np.zeros(dprime)]
    samples = []
    for w in chart_points:
        y, tangent, normals = _sphere_chart(axes, w, d)
        xi = -phi * y  # grad phi = 0 for constant phi
        for off in offsets:
            off = np.atleast_1d(np.asarray(off, dtype=float))
            if off.shape == (1,) and normals.shape[0] != 1:
                raise ValueError("scalar offsets need codimension one")
            x = off @ normals
            point = ContactPoint(x + xi, y, tolerance=tolerance)
            vectors = [pair(-phi * tangent[i], tangent[i]) for i in range(dprime)]
            vectors += [pair(normals[j], np.zeros(d + 1)) for j in range(normals.shape[0])]
            frame = LagrangianFrame(point, np.stack(vectors), tolerance)
            samples.append(CurtainSample(y, x, xi, point, frame,
                                         np.atleast_1d(np.asarray(w, dtype=float))))
    return samples
