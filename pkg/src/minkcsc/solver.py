"""Newton and continuation solver for the sigma_2 curvature equation.

The unknown is the height field u of a spacelike graph; the equation is

    sigma_2(A(u)) = 3 k^2     (equivalently S = -k^2, since S = -sigma_2/3)

with Dirichlet boundary values, solved by damped Newton with the exact
sparse Jacobian of the discrete residual.  The module also assembles the
stability operator

    Jf = B^{ij} A^2_{ij} f - B^{ij} f_{;ij},   B = (Tr(A) Id - A) / 3

whose round-leaf constant 2k^3 and finite-difference consistency are the
main verification targets.  All grid algebra is vectorized over interior
nodes; boundary nodes are never unknowns.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import BranchError, ConvergenceError, SpacelikeError
from .surfaces import HeightField

__all__ = [
    "assemble_B",
    "GridJets",
    "grid_jets",
    "CurvatureResidual",
    "curvature_residual",
    "jacobi_coefficients",
    "jacobi_apply",
    "jacobi_fd_check",
    "jacobi_matrix",
    "jacobi_invertibility_check",
    "SolveReport",
    "newton_solve",
    "harmonic_init",
    "stamp_boundary",
    "field_from_surface",
    "continuation",
    "foliation_probe",
]


def assemble_B(a) -> np.ndarray:
    """B = (Tr(A) Id - A) / 3; positive definite whenever A is.

    Satisfies Tr(BA) = (2/3) sigma_2(A), which is 2k^2 on a leaf with
    sigma_2 = 3k^2.
    """
    a = np.asarray(a, dtype=float)
    return (np.trace(a) * np.eye(a.shape[0]) - a) / 3.0


# ---------------------------------------------------------------------------
# vectorized interior jets


def _interior_shift(values, offset):
    """The interior block of ``values`` shifted by an integer offset vector."""
    return values[tuple(slice(1 + o, n - 1 + o)
                        for o, n in zip(offset, values.shape))]


@dataclass
class GridJets:
    """Second-order data at every interior node, flattened to N points.

    ``a_coord`` is the shape operator in graph coordinates (similar to the
    symmetric form, same eigenvalues); ``principal`` comes from the
    congruent symmetric matrix so it is numerically robust.
    """

    shape: tuple           # interior grid shape
    spacing: np.ndarray
    grad: np.ndarray       # (N, d)
    hess: np.ndarray       # (N, d, d)
    nu: np.ndarray         # (N,)
    ginv: np.ndarray       # (N, d, d) inverse induced metric
    a_coord: np.ndarray    # (N, d, d)
    sigma2: np.ndarray     # (N,)
    principal: np.ndarray  # (N, d) ascending

    @property
    def npoints(self) -> int:
        return self.grad.shape[0]

    @property
    def dim(self) -> int:
        return self.grad.shape[1]


def grid_jets(fld: HeightField) -> GridJets:
    v = fld.values
    d = fld.dim
    h = fld.spacing
    interior = tuple(n - 2 for n in v.shape)
    npts = int(np.prod(interior))

    zero = (0,) * d
    center = _interior_shift(v, zero)
    grad = np.empty((npts, d))
    hess = np.empty((npts, d, d))
    for a in range(d):
        ea = tuple(1 if b == a else 0 for b in range(d))
        ma = tuple(-1 if b == a else 0 for b in range(d))
        grad[:, a] = ((_interior_shift(v, ea) - _interior_shift(v, ma))
                      / (2 * h[a])).ravel()
        hess[:, a, a] = ((_interior_shift(v, ea) - 2 * center + _interior_shift(v, ma))
                         / h[a] ** 2).ravel()
    for a in range(d):
        for b in range(a + 1, d):
            def off(sa, sb):
                return tuple(sa * (1 if c == a else 0) + sb * (1 if c == b else 0)
                             for c in range(d))
            mixed = (_interior_shift(v, off(1, 1)) - _interior_shift(v, off(1, -1))
                     - _interior_shift(v, off(-1, 1)) + _interior_shift(v, off(-1, -1))
                     ) / (4 * h[a] * h[b])
            hess[:, a, b] = hess[:, b, a] = mixed.ravel()

    speed2 = np.einsum("na,na->n", grad, grad)
    if np.max(speed2) >= 1.0:
        raise SpacelikeError(
            f"interior gradient reaches |grad u| = {np.sqrt(np.max(speed2)):.4f}")
    nu = np.sqrt(1.0 - speed2)
    eye = np.eye(d)
    ginv = eye + np.einsum("na,nb->nab", grad, grad) / speed_div(nu)[:, None, None]
    a_coord = np.einsum("nab,nbc->nac", ginv, hess) / nu[:, None, None]
    tr = np.einsum("naa->n", a_coord)
    tr2 = np.einsum("nab,nba->n", a_coord, a_coord)
    sigma2 = 0.5 * (tr * tr - tr2)

    # congruent symmetric matrix g^{-1/2} H g^{-1/2} / nu for eigenvalues;
    # g^{-1/2} = Id + (1/nu - 1) \hat p \hat p^T in closed form
    pn = np.sqrt(np.maximum(speed2, 1e-300))
    phat = grad / pn[:, None]
    g_isqrt = eye + (1.0 / nu - 1.0)[:, None, None] * np.einsum("na,nb->nab", phat, phat)
    a_sym = np.einsum("nab,nbc,ncd->nad", g_isqrt, hess, g_isqrt) / nu[:, None, None]
    principal = np.linalg.eigvalsh(0.5 * (a_sym + np.swapaxes(a_sym, 1, 2)))
    return GridJets(interior, h.copy(), grad, hess, nu, ginv, a_coord, sigma2, principal)


def speed_div(nu):
    """nu^2, guarded so the p p^T / nu^2 term is exact at p = 0."""
    return np.maximum(nu * nu, 1e-300)


@dataclass
class CurvatureResidual:
    """Grid of sigma_2(A) / 3 + k^2 = -(S + k^2) values at interior nodes."""

    k: float
    values: np.ndarray  # interior grid shape, in S units: S(u) + k^2 negated

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values ** 2)))


def curvature_residual(fld: HeightField, k: float, jets: GridJets = None) -> CurvatureResidual:
    if jets is None:
        jets = grid_jets(fld)
    res = (jets.sigma2 / 3.0 - k * k).reshape(jets.shape)
    return CurvatureResidual(float(k), res)


# ---------------------------------------------------------------------------
# stability operator


def jacobi_coefficients(jets: GridJets):
    """Per-node data (w, drift, c0) of Jf = c0 f - w : Hess f - drift . grad f.

    w raises the operator B with the inverse induced metric; the drift term
    carries the flat-chart Christoffel correction u_{ij} u_k / nu^2 of the
    covariant Hessian, and c0 = B^{ij} A^2_{ij} = Tr(B A^2).
    """
    d = jets.dim
    eye = np.eye(d)
    tr = np.einsum("naa->n", jets.a_coord)
    b_op = (tr[:, None, None] * eye - jets.a_coord) / 3.0
    w = np.einsum("nab,nbc->nac", b_op, jets.ginv)
    w = 0.5 * (w + np.swapaxes(w, 1, 2))
    wh = np.einsum("nab,nab->n", w, jets.hess)
    drift = wh[:, None] * jets.grad / speed_div(jets.nu)[:, None]
    a2 = np.einsum("nab,nbc->nac", jets.a_coord, jets.a_coord)
    c0 = np.einsum("nab,nba->n", b_op, a2)
    return w, drift, c0


def jacobi_apply(fld: HeightField, f: np.ndarray, jets: GridJets = None) -> np.ndarray:
    """Apply the stability operator to a full-grid function f; interior output.

    f must be given on the whole grid (its boundary values feed the
    stencils of interior nodes next to the boundary).
    """
    if jets is None:
        jets = grid_jets(fld)
    f = np.asarray(f, dtype=float)
    if f.shape != fld.shape:
        raise ValueError(f"f must live on the full grid {fld.shape}")
    d = fld.dim
    h = fld.spacing
    w, drift, c0 = jacobi_coefficients(jets)

    zero = (0,) * d
    fc = _interior_shift(f, zero).ravel()
    out = c0 * fc
    for a in range(d):
        ea = tuple(1 if b == a else 0 for b in range(d))
        ma = tuple(-1 if b == a else 0 for b in range(d))
        fp = _interior_shift(f, ea).ravel()
        fm = _interior_shift(f, ma).ravel()
        out -= w[:, a, a] * (fp - 2 * fc + fm) / h[a] ** 2
        out -= drift[:, a] * (fp - fm) / (2 * h[a])
        for b in range(a + 1, d):
            def off(sa, sb):
                return tuple(sa * (1 if c == a else 0) + sb * (1 if c == b else 0)
                             for c in range(d))
            mixed = (_interior_shift(f, off(1, 1)) - _interior_shift(f, off(1, -1))
                     - _interior_shift(f, off(-1, 1)) + _interior_shift(f, off(-1, -1))
                     ).ravel() / (4 * h[a] * h[b])
            out -= 2 * w[:, a, b] * mixed
    return out.reshape(jets.shape)


def jacobi_fd_check(fld: HeightField, f: np.ndarray, eps: float) -> float:
    """Relative discrepancy between jacobi_apply and a normal-motion difference.

    The normal perturbation x + eps f N of a graph is, to first order in
    eps, the vertical perturbation u + eps f nu (the gauge factor between
    normal and graph coordinates); the check re-reads the perturbed graph
    and differences its scalar curvature.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != fld.shape:
        raise ValueError(f"f must live on the full grid {fld.shape}")
    jets = grid_jets(fld)
    grad_full = np.stack(np.gradient(fld.values, *fld.spacing, edge_order=2))
    speed2 = np.sum(grad_full ** 2, axis=0)
    if np.max(speed2) >= 1.0:
        raise SpacelikeError("cannot form the gauge factor: grid not spacelike")
    nu_full = np.sqrt(1.0 - speed2)

    perturbed = fld.with_values(fld.values + eps * f * nu_full)
    s0 = -jets.sigma2.reshape(jets.shape) / 3.0
    s1 = -grid_jets(perturbed).sigma2.reshape(jets.shape) / 3.0
    fd = (s1 - s0) / eps
    exact = jacobi_apply(fld, f, jets)
    # the boundary ring carries one-sided nu values whose error is not
    # smooth; measure one layer further in, where only central stencils
    # feed the jets
    if min(jets.shape) >= 3:
        deep = tuple(slice(1, -1) for _ in range(fld.dim))
        fd, exact = fd[deep], exact[deep]
    denom = max(float(np.max(np.abs(exact))), 1e-300)
    return float(np.max(np.abs(fd - exact)) / denom)


# ---------------------------------------------------------------------------
# sparse assembly over interior nodes


def _assemble_operator(shape, spacing, w, drift, zeroth):
    """Sparse matrix of f -> zeroth f + w : Hess f + drift . grad f.

    Interior nodes only, homogeneous Dirichlet: stencil legs that leave
    the interior are dropped (their values are fixed data, not unknowns).
    """
    d = len(shape)
    n = int(np.prod(shape))
    coords = np.indices(shape).reshape(d, n)
    rows_all, cols_all, data_all = [], [], []

    def add(offset, coeff):
        nb = coords + np.asarray(offset)[:, None]
        mask = np.all((nb >= 0) & (nb < np.asarray(shape)[:, None]), axis=0)
        rows_all.append(np.arange(n)[mask])
        cols_all.append(np.ravel_multi_index(tuple(nb[:, mask]), shape))
        data_all.append(np.asarray(coeff)[mask] if np.ndim(coeff) else
                        np.full(int(np.sum(mask)), coeff))

    center = zeroth.copy()
    for a in range(d):
        ha = spacing[a]
        center -= 2 * w[:, a, a] / ha ** 2
        for s in (+1, -1):
            off = [0] * d
            off[a] = s
            add(off, w[:, a, a] / ha ** 2 + s * drift[:, a] / (2 * ha))
        for b in range(a + 1, d):
            hb = spacing[b]
            for sa in (+1, -1):
                for sb in (+1, -1):
                    off = [0] * d
                    off[a], off[b] = sa, sb
                    add(off, sa * sb * 2 * w[:, a, b] / (4 * ha * hb))
    add([0] * d, center)
    mat = scipy.sparse.coo_matrix(
        (np.concatenate(data_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(n, n))
    return mat.tocsr()


def jacobi_matrix(fld: HeightField, jets: GridJets = None):
    """Sparse matrix of the stability operator with homogeneous boundary."""
    if jets is None:
        jets = grid_jets(fld)
    w, drift, c0 = jacobi_coefficients(jets)
    return _assemble_operator(jets.shape, jets.spacing, -w, -drift, c0), jets


def jacobi_invertibility_check(fld: HeightField, power_iters: int = 30):
    """Lower-bound estimate of the smallest singular value of the operator.

    Requires A positive definite everywhere; asserts the zeroth-order
    coefficient positive and the second-order coefficient matrix pointwise
    strictly diagonally dominant, then estimates the smallest singular
    value by inverse power iteration on a sparse LU factorization.
    """
    jets = grid_jets(fld)
    if np.min(jets.principal[:, 0]) <= 0:
        raise ValueError("the shape operator must be positive definite everywhere")
    w, drift, c0 = jacobi_coefficients(jets)
    floor = float(np.min(c0))
    assert floor > 0, "zeroth-order coefficient must be positive"
    diag = np.einsum("naa->na", w)
    offsum = np.sum(np.abs(w), axis=2) - np.abs(diag)
    assert np.all(diag > offsum), "second-order coefficients not diagonally dominant"

    mat, _ = jacobi_matrix(fld, jets)
    lu = scipy.sparse.linalg.splu(mat.tocsc())
    rng = np.random.default_rng(7)
    x = rng.standard_normal(mat.shape[0])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(power_iters):
        y = lu.solve(x, trans="N")
        y = lu.solve(y, trans="T")  # (K K^T)^{-1} power step
        norm = np.linalg.norm(y)
        est = 1.0 / np.sqrt(norm)
        x = y / norm
    return {"smin_estimate": est, "zeroth_floor": floor}


# ---------------------------------------------------------------------------
# Newton solver


@dataclass
class SolveReport:
    k: float
    iterations: int = 0
    converged: bool = False
    residual_history: list = dc_field(default_factory=list)  # max |S + k^2|
    damping_steps: list = dc_field(default_factory=list)     # halvings per iteration
    min_principal: float = np.nan    # over the grid, final iterate
    convex: bool = False
    tol: float = 1e-8

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_history": [float(r) for r in self.residual_history],
            "damping_steps": [int(s) for s in self.damping_steps],
            "min_principal": float(self.min_principal),
            "convex": self.convex,
            "tol": self.tol,
        }


def _newton_jacobian(jets: GridJets):
    """Exact sparse Jacobian of the residual sigma_2(A(u))/3 at interior nodes.

    With M = dsigma_2/dA = Tr(A) Id - A^T, the chain rule through
    A = G^{-1} H / nu gives the Hessian coefficient G^{-1} M / nu and the
    gradient coefficient below (the M : A contraction equals 2 sigma_2).
    """
    m = (np.einsum("naa->n", jets.a_coord)[:, None, None] * np.eye(jets.dim)
         - np.swapaxes(jets.a_coord, 1, 2))
    nu = jets.nu[:, None, None]
    w = np.einsum("nab,nbc->nac", jets.ginv, m) / nu
    w = 0.5 * (w + np.swapaxes(w, 1, 2))
    gp = np.einsum("nab,nb->na", jets.ginv, jets.grad)
    hgp = np.einsum("nab,nb->na", jets.hess, gp)
    term1 = np.einsum("nab,nbc,nc->na", jets.ginv, m, hgp) / jets.nu[:, None]
    gh = np.einsum("nab,nbc->nac", jets.ginv, jets.hess)
    term2 = np.einsum("nab,ncb,nc->na", gh, m, gp) / jets.nu[:, None]
    drift = term1 + term2 + 2.0 * jets.sigma2[:, None] * jets.grad \
        / speed_div(jets.nu)[:, None]
    return _assemble_operator(jets.shape, jets.spacing, w / 3.0, drift / 3.0,
                              np.zeros(jets.npoints))


def _shifted_jacobian(jets: GridJets, mu_floor: float):
    """Jacobian with the shape operator floored at mu_floor in the derivative.

    Away from the convex branch M = Tr(A) Id - A^T can vanish or lose
    ellipticity; flooring the eigenvalues of A (in the derivative only)
    keeps the linear systems solvable so damped Newton can reach the
    branch.  On the branch the shift is zero and this is the exact
    Jacobian.
    """
    lift = np.maximum(0.0, mu_floor - jets.principal[:, 0])
    if np.max(lift) == 0.0:
        return _newton_jacobian(jets)
    shifted = jets.a_coord + lift[:, None, None] * np.eye(jets.dim)
    tr = np.einsum("naa->n", shifted)
    tr2 = np.einsum("nab,nba->n", shifted, shifted)
    surrogate = GridJets(jets.shape, jets.spacing, jets.grad, jets.hess, jets.nu,
                         jets.ginv, shifted, 0.5 * (tr * tr - tr2), jets.principal)
    return _newton_jacobian(surrogate)


def _linear_solve(mat, rhs):
    n = mat.shape[0]
    if n <= 20000:
        return scipy.sparse.linalg.spsolve(mat.tocsc(), rhs)
    # large 3-d grids: algebraic multigrid preconditioned Krylov; direct
    # sparse LU suffers cubic fill-in on these stencils
    import pyamg
    ml = pyamg.smoothed_aggregation_solver(
        mat.tocsr(), symmetry="nonsymmetric",
        smooth=("energy", {"krylov": "gmres"}), max_coarse=500)
    residuals = []
    sol = ml.solve(rhs, tol=1e-12, accel="bicgstab", maxiter=300,
                   residuals=residuals)
    rel = np.linalg.norm(mat @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if rel > 1e-8:
        raise ConvergenceError(f"inner linear solve stalled (relative residual {rel:.1e})")
    return sol


def newton_solve(init: HeightField, k: float, tol: float = 1e-8,
                 max_iter: int = 30, max_halvings: int = 20,
                 mu_floor: float = None):
    """Damped Newton for sigma_2(A(u)) = 3k^2 with the boundary of ``init`` fixed.

    Returns (solution, SolveReport).  Every accepted iterate must keep the
    graph spacelike; once the shape operator is positive definite it must
    stay so (the locally strictly convex branch), otherwise BranchError.
    Non-convergence raises ConvergenceError carrying the report.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if mu_floor is None:
        mu_floor = 0.5 * k
    core = tuple(slice(1, -1) for _ in range(init.dim))
    fld = init
    jets = grid_jets(fld)
    report = SolveReport(k=float(k), tol=tol)
    res = curvature_residual(fld, k, jets)
    report.residual_history.append(res.max_norm)
    was_convex = bool(np.min(jets.principal[:, 0]) > 0)

    for it in range(max_iter):
        if res.max_norm <= tol:
            report.converged = True
            break
        jac = _shifted_jacobian(jets, mu_floor)
        step = _linear_solve(jac, -res.values.ravel()).reshape(jets.shape)

        halvings = 0
        scale = 1.0
        while True:
            trial_values = fld.values.copy()
            trial_values[core] += scale * step
            try:
                trial = fld.with_values(trial_values)
                trial_jets = grid_jets(trial)
                trial_res = curvature_residual(trial, k, trial_jets)
            except SpacelikeError:
                trial_res = None
            if trial_res is not None and trial_res.max_norm < res.max_norm:
                break
            halvings += 1
            scale *= 0.5
            if halvings > max_halvings:
                report.iterations = it + 1
                report.min_principal = float(np.min(jets.principal[:, 0]))
                raise ConvergenceError(
                    f"line search failed after {max_halvings} halvings "
                    f"(residual {res.max_norm:.3e})", report=report)
        fld, jets, res = trial, trial_jets, trial_res
        report.iterations = it + 1
        report.damping_steps.append(halvings)
        report.residual_history.append(res.max_norm)

        convex = bool(np.min(jets.principal[:, 0]) > 0)
        if was_convex and not convex:
            report.min_principal = float(np.min(jets.principal[:, 0]))
            raise BranchError(
                "iterate left the locally strictly convex branch "
                f"(min principal curvature {report.min_principal:.3e})",
                report=report)
        was_convex = was_convex or convex
    else:
        report.min_principal = float(np.min(jets.principal[:, 0]))
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations "
            f"(residual {res.max_norm:.3e})", report=report)

    report.min_principal = float(np.min(jets.principal[:, 0]))
    report.convex = bool(report.min_principal > 0)
    return fld, report


# ---------------------------------------------------------------------------
# initial data helpers


def field_from_surface(surface, domain_min, domain_max, shape, margin=1e-3) -> HeightField:
    from .surfaces import sample_field
    return sample_field(surface, domain_min, domain_max, shape, margin=margin)


def stamp_boundary(target: HeightField, source_values: np.ndarray) -> HeightField:
    """Replace the boundary ring of ``target`` with the values of ``source``."""
    if source_values.shape != target.shape:
        raise ValueError("boundary source must match the grid")
    v = target.values.copy()
    mask = np.zeros(target.shape, dtype=bool)
    core = tuple(slice(1, -1) for _ in range(target.dim))
    mask[...] = True
    mask[core] = False
    v[mask] = source_values[mask]
    return target.with_values(v)


def harmonic_init(boundary: HeightField) -> HeightField:
    """Discrete harmonic extension of the boundary ring into the interior.

    A plane fit of a curved Dirichlet trace jumps at the boundary ring and
    breaks the spacelike margin at fine resolution, so the from-scratch
    initial guess is the Laplace solve instead: it matches the boundary
    exactly, is as flat as the data allows, and carries no convexity,
    which exercises the solver's entry into the convex branch.
    """
    d = boundary.dim
    shape_int = tuple(n - 2 for n in boundary.shape)
    npts = int(np.prod(shape_int))
    w = np.broadcast_to(np.eye(d), (npts, d, d))
    drift = np.zeros((npts, d))
    mat = _assemble_operator(shape_int, boundary.spacing, w, drift, np.zeros(npts))
    core = tuple(slice(1, -1) for _ in range(d))
    full = boundary.values.copy()
    full[core] = 0.0
    rhs = -_apply_second_order(shape_int, boundary.spacing, w, drift, full)
    v = boundary.values.copy()
    v[core] = _linear_solve(mat, rhs).reshape(shape_int)
    return boundary.with_values(v)


# ---------------------------------------------------------------------------
# continuation and foliation


def continuation(trace_fields, k: float, init: HeightField, tol: float = 1e-8,
                 max_iter: int = 30):
    """Solve a path of Dirichlet problems with warm starts.

    ``trace_fields`` is a sequence of HeightFields whose boundary rings
    supply the Dirichlet data (interiors are ignored except as the very
    first warm start via ``init``).  Returns a list of (field, report);
    the first failure raises ConvergenceError with the partial family and
    the failing index attached.
    """
    results = []
    current = init
    for i, trace in enumerate(trace_fields):
        try:
            # carry the boundary increment into the interior harmonically;
            # stamping the ring alone would put a kink into the warm start
            delta = harmonic_init(current.with_values(trace.values - current.values))
            current = current.with_values(current.values + delta.values)
        except SpacelikeError as exc:
            raise ConvergenceError(
                f"continuation failed at step {i}: {exc}",
                partial=results, failed_index=i) from exc
        try:
            sol, rep = newton_solve(current, k, tol=tol, max_iter=max_iter)
        except (ConvergenceError, BranchError, SpacelikeError) as exc:
            raise ConvergenceError(
                f"continuation failed at step {i}: {exc}",
                report=getattr(exc, "report", None),
                partial=results, failed_index=i) from exc
        results.append((sol, rep))
        current = sol
    return results


def foliation_probe(domain_min, domain_max, shape, k_list, tol: float = 1e-8):
    """Monotonicity of the solved leaf family plus the linear comparison solve.

    Solves the Dirichlet problem with exact-leaf boundary data for each k,
    asserts the solved heights strictly decrease pointwise in k, then
    solves the linear problem B^{ij} g_{;ij} = 1 + phi g (phi the positive
    zeroth-order coefficient of the stability operator) on the first leaf.
    The boundary value for g is the constant particular solution -1/(2k^3),
    which the interior must reproduce; g < 0 everywhere is asserted.
    """
    from .surfaces import Hyperboloid
    k_list = sorted(float(k) for k in k_list)
    d = len(shape)
    solutions = {}
    for k in k_list:
        leaf = field_from_surface(Hyperboloid(k, d=d), domain_min, domain_max, shape)
        sol, rep = newton_solve(leaf, k, tol=tol)
        solutions[k] = (sol, rep)

    core = tuple(slice(1, -1) for _ in range(d))
    monotone = True
    margins = []
    for ka, kb in zip(k_list, k_list[1:]):
        diff = solutions[ka][0].values[core] - solutions[kb][0].values[core]
        margins.append(float(np.min(diff)))
        monotone = monotone and bool(np.min(diff) > 0)

    k0 = k_list[0]
    fld = solutions[k0][0]
    jets = grid_jets(fld)
    w, drift, c0 = jacobi_coefficients(jets)
    # (w : Hess + drift . grad - phi) g = 1, Dirichlet g = -1/(2 k^3)
    mat = _assemble_operator(jets.shape, jets.spacing, w, drift, -c0)
    g_bc = -1.0 / (2.0 * k0 ** 3)
    rhs = np.ones(jets.npoints)
    # move the fixed Dirichlet contribution of dropped stencil legs to the rhs
    full = np.full(fld.shape, g_bc)
    full[core] = 0.0
    rhs -= _apply_second_order(jets.shape, jets.spacing, w, drift, full)
    g = _linear_solve(mat, rhs).reshape(jets.shape)
    return {
        "k_list": k_list,
        "monotone": monotone,
        "monotone_margins": margins,
        "solutions": solutions,
        "g": g,
        "g_reference": g_bc,
        "g_negative": bool(np.max(g) < 0),
        "g_max_rel_dev": float(np.max(np.abs(g - g_bc)) / abs(g_bc)),
    }


def _apply_second_order(shape, spacing, w, drift, f):
    """Apply (w : Hess + drift . grad) to a full-grid field of fixed data.

    Used to move Dirichlet contributions to the right-hand side: pass a
    field that is zero at interior nodes so only stencil legs touching the
    boundary ring contribute.
    """
    d = len(shape)
    h = spacing
    zero = (0,) * d
    fc = _interior_shift(f, zero).ravel()
    out = np.zeros(int(np.prod(shape)))
    for a in range(d):
        ea = tuple(1 if b == a else 0 for b in range(d))
        ma = tuple(-1 if b == a else 0 for b in range(d))
        fp = _interior_shift(f, ea).ravel()
        fm = _interior_shift(f, ma).ravel()
        out += w[:, a, a] * (fp - 2 * fc + fm) / h[a] ** 2
        out += drift[:, a] * (fp - fm) / (2 * h[a])
        for b in range(a + 1, d):
            def off(sa, sb):
                return tuple(sa * (1 if c == a else 0) + sb * (1 if c == b else 0)
                             for c in range(d))
            mixed = (_interior_shift(f, off(1, 1)) - _interior_shift(f, off(1, -1))
                     - _interior_shift(f, off(-1, 1)) + _interior_shift(f, off(-1, -1))
                     ).ravel() / (4 * h[a] * h[b])
            out += 2 * w[:, a, b] * mixed
    return out
