"""The real special lagrangian structure on R^{d,1} x R^{d,1}.

A pair vector (X_r, X_i) is stored as a numpy array of shape (2, d+1):
row 0 the real part, row 1 the imaginary part.  The structure maps are

    omega(X, Y) = <X_r, Y_i> - <Y_r, X_i>
    J(X_r, X_i) = (-X_i, X_r)
    R(X_r, X_i) = (X_r, -X_i)

with derived metrics g = omega(., J.) and m = -omega(., R.).  On contact
fibres of the unit tangent bundle g is riemannian, which is what makes the
frame machinery below work.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, FrameError, NumericalError
from .minkowski import eta, mink_inner, mink_norm2

__all__ = [
    "pair",
    "omega",
    "jmap",
    "rmap",
    "gmet",
    "mmet",
    "liouville",
    "ContactPoint",
    "LagrangianFrame",
    "spatial_basis",
    "graph_frame",
    "orthonormalized",
    "omega_hat_eval",
    "omega_eval",
    "sl_defect",
    "graphical_sl_defect",
    "refined_angle",
    "scale_to_angle",
    "simultaneous_diagonalize",
    "phi_k",
    "nullity",
    "contact_curvature",
    "random_unitary",
    "random_lagrangian_basis",
]


def pair(xr, xi) -> np.ndarray:
    xr = np.asarray(xr, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if xr.shape != xi.shape or xr.ndim != 1:
        raise DimensionMismatchError("real and imaginary parts must be vectors of equal dim")
    if not (np.all(np.isfinite(xr)) and np.all(np.isfinite(xi))):
        raise ValueError("pair vector has non-finite components")
    return np.stack([xr, xi])


def _check_pair(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != 2:
        raise DimensionMismatchError(f"expected shape (2, d+1), got {x.shape}")
    return x


def omega(x, y) -> float:
    x, y = _check_pair(x), _check_pair(y)
    if x.shape != y.shape:
        raise DimensionMismatchError("dimension mismatch in omega")
    return mink_inner(x[0], y[1]) - mink_inner(y[0], x[1])


def jmap(x) -> np.ndarray:
    x = _check_pair(x)
    return np.stack([-x[1], x[0]])


def rmap(x) -> np.ndarray:
    x = _check_pair(x)
    return np.stack([x[0], -x[1]])


def gmet(x, y) -> float:
    """g(X,Y) = omega(X, JY) = <X_r,Y_r> + <X_i,Y_i>."""
    x, y = _check_pair(x), _check_pair(y)
    if x.shape != y.shape:
        raise DimensionMismatchError("dimension mismatch in g")
    return mink_inner(x[0], y[0]) + mink_inner(x[1], y[1])


def mmet(x, y) -> float:
    """m(X,Y) = -omega(X, RY) = <X_r,Y_i> + <Y_r,X_i>."""
    x, y = _check_pair(x), _check_pair(y)
    if x.shape != y.shape:
        raise DimensionMismatchError("dimension mismatch in m")
    return mink_inner(x[0], y[1]) + mink_inner(y[0], x[1])


@dataclass(frozen=True)
class ContactPoint:
    """A point (x, y) of the unit tangent bundle: |y|^2 = -1, y future."""

    x: np.ndarray
    y: np.ndarray
    tolerance: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.x.shape != self.y.shape:
            raise DimensionMismatchError("base and direction must have equal dim")
        if abs(mink_norm2(self.y) + 1.0) > self.tolerance:
            raise FrameError(f"direction is not unit timelike: |y|^2 = {mink_norm2(self.y)}")
        if self.y[-1] <= 0:
            raise FrameError("direction must be future-oriented")

    @property
    def dim(self) -> int:
        return self.x.shape[0] - 1


def liouville(p: ContactPoint, x) -> float:
    """Liouville form lambda_(x,y)(X) = <X_r, y>."""
    x = _check_pair(x)
    return mink_inner(x[0], p.y)


def _in_fibre(p: ContactPoint, v, tol: float) -> bool:
    return (abs(mink_inner(v[0], p.y)) <= tol
            and abs(mink_inner(v[1], p.y)) <= tol)


@dataclass(frozen=True)
class LagrangianFrame:
    """d spanning vectors of a lagrangian subspace of the contact fibre at ``point``.

    Construction validates the fibre condition, the vanishing of omega on
    all pairs and linear independence.  ``orthonormal`` is set when the
    g-Gram matrix is the identity within tolerance.
    """

    point: ContactPoint
    vectors: np.ndarray  # shape (d, 2, d+1)
    tolerance: float = 1e-9
    orthonormal: bool = field(init=False, default=False)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        d = self.point.dim
        if v.shape != (d, 2, d + 1):
            raise DimensionMismatchError(
                f"expected {d} pair vectors of shape (2, {d + 1}), got {v.shape}")
        object.__setattr__(self, "vectors", v)
        scale = max(1.0, float(np.max(np.abs(v))))
        tol = self.tolerance * scale
        for a in range(d):
            if not _in_fibre(self.point, v[a], tol):
                raise FrameError(f"vector {a} is not in the contact fibre")
        for a in range(d):
            for b in range(a + 1, d):
                if abs(omega(v[a], v[b])) > tol:
                    raise FrameError(
                        f"omega({a},{b}) = {omega(v[a], v[b]):.3e}: frame is not lagrangian")
        gram = self.g_gram()
        if np.linalg.matrix_rank(gram, tol=1e-12 * scale * scale * d) < d:
            raise FrameError("frame vectors are linearly dependent")
        object.__setattr__(
            self, "orthonormal",
            bool(np.max(np.abs(gram - np.eye(d))) <= self.tolerance * 10))

    @property
    def dim(self) -> int:
        return self.point.dim

    def g_gram(self) -> np.ndarray:
        return _form_gram(gmet, self.vectors)

    def m_gram(self) -> np.ndarray:
        return _form_gram(mmet, self.vectors)

    def mj_gram(self) -> np.ndarray:
        jv = np.stack([jmap(v) for v in self.vectors])
        d = len(self.vectors)
        return np.array([[mmet(self.vectors[a], jv[b]) for b in range(d)]
                         for a in range(d)])


def _form_gram(form, vectors) -> np.ndarray:
    d = len(vectors)
    return np.array([[form(vectors[a], vectors[b]) for b in range(d)]
                     for a in range(d)])


def spatial_basis(y) -> np.ndarray:
    """Orthonormal spatial basis of the Minkowski complement of a unit timelike y.

    {y, e_1, ..., e_d} always spans since y is timelike, so reducing it
    yields d spatial unit vectors orthogonal to y.
    """
    y = np.asarray(y, dtype=float)
    d = y.shape[0] - 1
    t = y / np.sqrt(-mink_norm2(y))
    spatial = []
    for v in np.eye(d + 1):
        w = v + mink_inner(v, t) * t
        for s in spatial:
            w = w - mink_inner(w, s) * s
        q = mink_norm2(w)
        if q > 1e-12:
            spatial.append(w / np.sqrt(q))
        if len(spatial) == d:
            break
    return np.stack(spatial)


def graph_frame(p: ContactPoint, b, tolerance: float = 1e-9) -> LagrangianFrame:
    """Frame spanning the graph of a symmetric map B over the real subspace at p.

    The vectors are (E_a, B E_a) for an orthonormal spatial basis {E_a} of
    the orthogonal complement of p.y; symmetry of B is exactly the
    lagrangian condition.
    """
    b = np.asarray(b, dtype=float)
    d = p.dim
    if b.shape != (d, d):
        raise DimensionMismatchError(f"B must be {d}x{d}")
    if np.max(np.abs(b - b.T)) > tolerance * max(1.0, np.max(np.abs(b))):
        raise FrameError("B must be symmetric (otherwise the graph is not lagrangian)")
    basis = spatial_basis(p.y)
    vectors = np.stack([pair(basis[a], basis.T @ b[:, a]) for a in range(d)])
    return LagrangianFrame(p, vectors, tolerance)


def orthonormalized(frame: LagrangianFrame) -> LagrangianFrame:
    """Replace the spanning vectors by a g-orthonormal basis of the same span."""
    gram = frame.g_gram()
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise FrameError("g is not positive definite on the frame span") from exc
    coeff = scipy.linalg.solve_triangular(chol, np.eye(frame.dim), lower=True)
    new = np.einsum("ab,bkc->akc", coeff, frame.vectors)
    return LagrangianFrame(frame.point, new, frame.tolerance)


def _complex_rows(vectors) -> np.ndarray:
    """Matrix Z[k, j] = dz^k(v_j) with the temporal dual carrying the sign flip."""
    v = np.stack([_check_pair(x) for x in vectors])
    n = v.shape[2]
    z = (v[:, 0, :] + 1j * v[:, 1, :]).T  # rows indexed by coordinate k
    z[-1, :] = -z[-1, :]
    if z.shape != (n, len(vectors)):
        raise DimensionMismatchError("omega_hat expects d+1 vectors of R^{d,1} x R^{d,1}")
    return z


def omega_hat_eval(vectors) -> complex:
    """The holomorphic (d+1)-form evaluated on d+1 pair vectors.

    The overall sign is fixed once and for all by the canonical basis order;
    callers should only rely on the modulus and on vanishing of defects.
    """
    z = _complex_rows(vectors)
    if z.shape[0] != z.shape[1]:
        raise DimensionMismatchError(f"need d+1 vectors, got {z.shape[1]} of dim {z.shape[0]}")
    return complex(np.linalg.det(z))


def omega_eval(frame: LagrangianFrame) -> complex:
    """Contraction of the holomorphic form by (y, 0), evaluated on the frame."""
    y0 = pair(frame.point.y, np.zeros_like(frame.point.y))
    return omega_hat_eval([y0] + list(frame.vectors))


def sl_defect(frame: LagrangianFrame, theta: float) -> float:
    """Im(e^{i theta} Omega) on the g-orthonormalized frame.

    Vanishes exactly when the frame spans a theta-special legendrian plane;
    orthonormalizing first makes the value scale-free (|Omega| = 1).
    """
    if not frame.orthonormal:
        frame = orthonormalized(frame)
    return float(np.imag(np.exp(1j * theta) * omega_eval(frame)))


def graphical_sl_defect(b, theta: float) -> float:
    """Independent graphical form Im(e^{i theta} det(Id + iB))."""
    b = np.asarray(b, dtype=float)
    val = np.linalg.det(np.eye(b.shape[0]) + 1j * b)
    return float(np.imag(np.exp(1j * theta) * val))


def refined_angle(b, tol: float = 1e-12) -> float:
    """Sum of arctangents of the eigenvalues of a positive definite matrix.

    Only the graph case is supported; the continuous extension to
    non-graphical positive planes has no computable formula here.
    """
    b = np.asarray(b, dtype=float)
    lam = np.linalg.eigvalsh(0.5 * (b + b.T))
    if lam[0] <= tol:
        raise ValueError("refined angle requires a positive definite matrix")
    return float(np.sum(np.arctan(lam)))


def scale_to_angle(b, target: float = np.pi / 2) -> np.ndarray:
    """Scale a positive definite matrix so its refined angle hits ``target``."""
    b = np.asarray(b, dtype=float)
    d = b.shape[0]
    if not 0.0 < target < d * np.pi / 2:
        raise ValueError("target angle out of range")
    import scipy.optimize

    def f(log_s):
        return refined_angle(np.exp(log_s) * b) - target

    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo -= 1.0
    while f(hi) < 0:
        hi += 1.0
    log_s = scipy.optimize.brentq(f, lo, hi, xtol=1e-14)
    return np.exp(log_s) * b


def _generalized_eig(frame: LagrangianFrame):
    gram = frame.g_gram()
    mm = frame.m_gram()
    lam, coeff = scipy.linalg.eigh(mm, gram)
    return lam, coeff


def simultaneous_diagonalize(frame: LagrangianFrame, cluster_gap: float = 1e-8,
                             residual_tol: float = 1e-7):
    """Joint g-orthonormal eigenbasis of m(.,.) and m(., J.) on the frame span.

    First diagonalizes m against g, then re-diagonalizes m(., J.) inside
    each m-eigenvalue cluster; the two forms commute on lagrangian planes,
    so a residual above ``residual_tol`` is reported as a numerical failure.
    Returns (basis_frame, m_diagonal, mj_diagonal) with the m diagonal
    sorted ascending.
    """
    lam, coeff = _generalized_eig(frame)
    mj = frame.mj_gram()
    mj_t = coeff.T @ mj @ coeff
    scale = 1.0 + float(np.max(np.abs(lam)))

    # re-diagonalize inside eigenvalue clusters
    d = frame.dim
    start = 0
    while start < d:
        end = start + 1
        while end < d and abs(lam[end] - lam[end - 1]) <= cluster_gap * scale:
            end += 1
        if end - start > 1:
            block = 0.5 * (mj_t[start:end, start:end] + mj_t[start:end, start:end].T)
            _, rot = np.linalg.eigh(block)
            coeff[:, start:end] = coeff[:, start:end] @ rot
            mj_t = coeff.T @ mj @ coeff
        start = end

    off = mj_t - np.diag(np.diag(mj_t))
    if np.max(np.abs(off)) > residual_tol * (1.0 + np.max(np.abs(mj_t))):
        raise NumericalError(
            f"joint diagonalization residual {np.max(np.abs(off)):.3e} "
            "exceeds tolerance; the input frame is unlikely to be lagrangian")

    vectors = np.einsum("ba,bkc->akc", coeff, frame.vectors)
    basis = LagrangianFrame(frame.point, vectors, frame.tolerance)
    return basis, lam.copy(), np.diag(mj_t).copy()


def phi_k(frame: LagrangianFrame, k: int) -> float:
    """Sum of the k smallest eigenvalues of m with respect to g on the span.

    Equals the infimum of sum m(X_a, X_a) over g-orthonormal k-tuples in
    the span (Ky Fan); the variational definition is retained as a test
    oracle only.
    """
    if not 1 <= k <= frame.dim:
        raise ValueError(f"k must lie in 1..{frame.dim}")
    lam, _ = _generalized_eig(frame)
    return float(np.sum(lam[:k]))


def nullity(frame: LagrangianFrame, tol: float = 1e-9) -> int:
    """Multiplicity of the zero eigenvalue of m with respect to g."""
    lam, _ = _generalized_eig(frame)
    return int(np.sum(np.abs(lam) <= tol))


def contact_curvature(p: ContactPoint, x, y, z, w, tol: float = 1e-9) -> float:
    """g(Rbar_{XY} Z, W) for fibre vectors at p, by the four-term product formula.

    Antisymmetric under X <-> Y and under Z <-> W.
    """
    vecs = [_check_pair(v) for v in (x, y, z, w)]
    for i, v in enumerate(vecs):
        if not _in_fibre(p, v, tol * max(1.0, float(np.max(np.abs(v))))):
            raise FrameError(f"argument {i} is not in the contact fibre at p")
    x, y, z, w = vecs
    return (
        -mink_inner(w[0], x[1]) * mink_inner(z[0], y[1])
        - mink_inner(w[1], x[1]) * mink_inner(z[1], y[1])
        + mink_inner(z[0], x[1]) * mink_inner(w[0], y[1])
        + mink_inner(z[1], x[1]) * mink_inner(w[1], y[1])
    )


def random_unitary(rng: np.random.Generator, d: int = 3, scale: float = 0.7) -> np.ndarray:
    """Random complex matrix preserving the hermitian form g + i omega.

    Exponential of eta @ K with K anti-hermitian; such matrices map the
    real subspace onto a random lagrangian subspace of signature (d,1).
    """
    n = d + 1
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    k = scale * (a - a.conj().T) / 2.0
    return scipy.linalg.expm(eta(d) @ k)


def random_lagrangian_basis(rng: np.random.Generator, d: int = 3):
    """Orthonormal basis (Gram = eta for g) of a random lagrangian subspace."""
    u = random_unitary(rng, d)
    return [pair(u[:, j].real, u[:, j].imag) for j in range(d + 1)]
