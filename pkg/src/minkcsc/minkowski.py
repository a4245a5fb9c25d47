"""Signature-(d,1) linear algebra on R^{d,1}.

Vectors are plain numpy arrays of length d+1; the last coordinate is the
temporal one, so the quadratic form is dx_1^2 + ... + dx_d^2 - dx_{d+1}^2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SignatureError

__all__ = [
    "eta",
    "mink_inner",
    "mink_norm2",
    "CausalClass",
    "classify",
    "causal_tolerance",
    "LorentzMap",
    "boost",
    "spatial_rotation",
    "random_lorentz",
    "lorentz_orthonormalize",
]


def eta(d: int) -> np.ndarray:
    """Gram matrix diag(1, ..., 1, -1) of the Minkowski form on R^{d,1}."""
    m = np.eye(d + 1)
    m[d, d] = -1.0
    return m


def _as_vec(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] < 2:
        raise DimensionMismatchError(f"expected a vector of R^(d+1), got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    return v


def mink_inner(u, v) -> float:
    """<u,v> = u1 v1 + ... + ud vd - u_{d+1} v_{d+1}."""
    u = _as_vec(u)
    v = _as_vec(v)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(u[:-1] @ v[:-1] - u[-1] * v[-1])


def mink_norm2(v) -> float:
    return mink_inner(v, v)


def causal_tolerance(v) -> float:
    """Scale-aware default tolerance for causal classification."""
    v = np.asarray(v, dtype=float)
    return 1e-10 * (1.0 + float(v @ v))


@dataclass(frozen=True)
class CausalClass:
    tag: str  # "spacelike" | "timelike" | "null" | "zero"
    future: bool | None = None  # meaningful for timelike/null only

    def __str__(self):
        if self.tag in ("timelike", "null"):
            return f"{self.tag} ({'future' if self.future else 'past'})"
        return self.tag


def classify(v, tol: float | None = None) -> CausalClass:
    """Causal class of v from the sign of its norm-squared.

    ``tol`` defaults to 1e-10 * (1 + |v|_euclidean^2); the zero tag is
    reserved for the zero vector itself.
    """
    v = _as_vec(v)
    if tol is None:
        tol = causal_tolerance(v)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if np.all(np.abs(v) <= tol):
        return CausalClass("zero")
    q = mink_norm2(v)
    if q > tol:
        return CausalClass("spacelike")
    future = bool(v[-1] > 0)
    if q < -tol:
        return CausalClass("timelike", future)
    return CausalClass("null", future)


class LorentzMap:
    """A linear isometry of R^{d,1}, checked at construction.

    The entries must satisfy M^T eta M = eta within ``tolerance``.
    """

    def __init__(self, entries, tolerance: float = 1e-9):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError("a Lorentz map must be a square matrix")
        if tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        d = entries.shape[0] - 1
        defect = entries.T @ eta(d) @ entries - eta(d)
        if np.max(np.abs(defect)) > tolerance:
            raise SignatureError(
                f"matrix does not preserve the Minkowski form (defect {np.max(np.abs(defect)):.3e})"
            )
        self.entries = entries
        self.tolerance = tolerance
        self.dim = d

    @property
    def future_preserving(self) -> bool:
        return bool(self.entries[-1, -1] > 0)

    def apply(self, v) -> np.ndarray:
        return self.entries @ np.asarray(v, dtype=float)

    def __matmul__(self, other):
        if isinstance(other, LorentzMap):
            return LorentzMap(self.entries @ other.entries,
                              max(self.tolerance, other.tolerance) * 4)
        return self.entries @ other

    def inverse(self) -> "LorentzMap":
        # eta M^T eta is the exact inverse of a Lorentz matrix
        e = eta(self.dim)
        return LorentzMap(e @ self.entries.T @ e, self.tolerance * 4)

    @classmethod
    def identity(cls, d: int) -> "LorentzMap":
        return cls(np.eye(d + 1))


def boost(direction, rapidity: float, tol: float = 1e-10) -> LorentzMap:
    """Lorentz boost along a unit spacelike direction.

    boost(n, 0) is the identity and boost(n, a) @ boost(n, b) = boost(n, a+b).
    """
    n = _as_vec(direction)
    d = n.shape[0] - 1
    if abs(mink_norm2(n) - 1.0) > tol or abs(n[-1]) > tol:
        raise ValueError("direction must be a unit spatial vector")
    t = np.zeros(d + 1)
    t[-1] = 1.0
    e = eta(d)
    a = e @ n  # row functional <., n>
    b = e @ t  # row functional <., t> = -t-component
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    m = np.eye(d + 1) + (c - 1.0) * (np.outer(n, a) - np.outer(t, b)) \
        + s * (np.outer(t, a) - np.outer(n, b))
    return LorentzMap(m, tolerance=1e-9 * max(1.0, c * c))


def spatial_rotation(rot) -> LorentzMap:
    """Embed an orthogonal d x d matrix as a Lorentz map fixing the time axis."""
    rot = np.asarray(rot, dtype=float)
    d = rot.shape[0]
    m = np.eye(d + 1)
    m[:d, :d] = rot
    return LorentzMap(m)


def random_lorentz(rng: np.random.Generator, d: int = 3,
                   max_rapidity: float = 1.0) -> LorentzMap:
    """Random future-preserving element of SO(d,1): rotation, boost, rotation."""
    def rand_rot():
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return spatial_rotation(q)

    n = np.zeros(d + 1)
    n[0] = 1.0
    a = rng.uniform(-max_rapidity, max_rapidity)
    return rand_rot() @ boost(n, a) @ rand_rot()


def lorentz_orthonormalize(basis, tol: float = 1e-10):
    """Orthonormalize a spanning set into d spatial + 1 future temporal vectors.

    Returns a list [s_1, ..., s_d, t] whose Gram matrix is eta.  The most
    timelike input is pivoted first, which keeps the reduction away from the
    light cone; a degenerate or wrong-signature input raises SignatureError.
    """
    vecs = [_as_vec(v) for v in basis]
    d = vecs[0].shape[0] - 1
    if len(vecs) != d + 1 or any(v.shape[0] != d + 1 for v in vecs):
        raise DimensionMismatchError("need d+1 vectors of R^{d+1}")

    scale = max(float(np.linalg.norm(v)) for v in vecs)
    if scale == 0.0:
        raise SignatureError("zero basis")

    # the most timelike combination of the inputs comes from the bottom
    # eigenvector of the Minkowski Gram matrix (no single input vector
    # need be timelike for the span to have signature (d,1))
    mat = np.stack(vecs, axis=1)
    gram = mat.T @ eta(d) @ mat
    lam, coeff = np.linalg.eigh(gram)
    if lam[0] >= -tol * scale * scale or lam[1] <= tol * scale * scale:
        raise SignatureError("degenerate basis or wrong signature (need (d,1))")
    t = mat @ coeff[:, 0]
    t = t / np.sqrt(-mink_norm2(t))
    if t[-1] < 0:
        t = -t

    spatial = []
    for v in vecs:
        w = v + mink_inner(v, t) * t  # remove the timelike component
        for s in spatial:
            w = w - mink_inner(w, s) * s
        q = mink_norm2(w)
        if q <= tol * scale * scale:
            continue  # dependent on what is already collected
        spatial.append(w / np.sqrt(q))
        if len(spatial) == d:
            break
    if len(spatial) < d:
        raise SignatureError("degenerate basis or wrong signature")
    return spatial + [t]
