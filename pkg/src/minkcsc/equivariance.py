"""Affine isometries of R^{d,1}, cocycles, and the fuchsian foliation.

An affine deformation of a linear group is encoded by a cocycle tau with
tau(alpha beta) = tau(alpha) + alpha tau(beta); the future cone, the
cosmological time and the hyperboloid leaves give the fuchsian model in
which the position and completeness predicates are computable.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .minkowski import LorentzMap, classify, mink_norm2

__all__ = [
    "AffineIsometry",
    "Cocycle",
    "coboundary",
    "ConeDomain",
    "fuchsian_time",
    "leaf_samples",
    "cone_position_check",
    "future_complete_check",
]


@dataclass(frozen=True)
class AffineIsometry:
    """x -> L x + t with L a Lorentz map; the semidirect product group."""

    linear: LorentzMap
    translation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float)
        if t.shape != (self.linear.dim + 1,):
            raise DimensionMismatchError("translation does not match the linear part")
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return self.linear.dim

    def apply(self, v) -> np.ndarray:
        return self.linear.apply(v) + self.translation

    @classmethod
    def identity(cls, d: int) -> "AffineIsometry":
        return cls(LorentzMap.identity(d), np.zeros(d + 1))


def compose(a: AffineIsometry, b: AffineIsometry) -> AffineIsometry:
    """(alpha, x) (beta, y) = (alpha beta, x + alpha y)."""
    return AffineIsometry(a.linear @ b.linear,
                          a.translation + a.linear.apply(b.translation))


def invert(a: AffineIsometry) -> AffineIsometry:
    inv = a.linear.inverse()
    return AffineIsometry(inv, -inv.apply(a.translation))


AffineIsometry.__matmul__ = lambda self, other: compose(self, other)
AffineIsometry.inverse = invert


class Cocycle:
    """Translation parts tau(generator) of an affine deformation.

    ``generators`` maps names to LorentzMaps and ``values`` to vectors;
    ``relators`` are words (see ``extend``) that must map to zero, checked
    at construction since the extension to a group with relations is only
    well defined then.
    """

    def __init__(self, generators: dict, values: dict, relators=(),
                 tolerance: float = 1e-9):
        if set(generators) != set(values):
            raise ValueError("generators and cocycle values must share names")
        self.generators = dict(generators)
        self.values = {k: np.asarray(v, dtype=float) for k, v in values.items()}
        self.relators = [list(r) for r in relators]
        some = next(iter(self.generators.values()), None)
        self.dim = some.dim if some is not None else None
        for name, vec in self.values.items():
            if vec.shape != (self.generators[name].dim + 1,):
                raise DimensionMismatchError(f"value for '{name}' has wrong dimension")
        for r in self.relators:
            defect = np.max(np.abs(self.extend(r)))
            if defect > tolerance:
                raise ValueError(f"relator {r} maps to a nonzero vector ({defect:.3e})")

    def word(self, tokens) -> AffineIsometry:
        """The affine isometry of a signed word like ["a", "-b", "a"]."""
        out = AffineIsometry.identity(self.dim)
        for tok in tokens:
            out = compose(out, self.letter(tok))
        return out

    def letter(self, token: str) -> AffineIsometry:
        inverse_letter = token.startswith("-")
        name = token[1:] if inverse_letter else token
        if name not in self.generators:
            raise KeyError(f"unknown generator '{name}'")
        g = AffineIsometry(self.generators[name], self.values[name])
        return invert(g) if inverse_letter else g

    def extend(self, tokens) -> np.ndarray:
        """tau on a word, by tau(gamma w) = tau(gamma) + gamma tau(w).

        Inverse letters use tau(gamma^{-1}) = -gamma^{-1} tau(gamma),
        which is forced by the cocycle identity on gamma gamma^{-1}.
        """
        return self.word(tokens).translation

    @classmethod
    def from_json(cls, text: str, tolerance: float = 1e-9) -> "Cocycle":
        doc = json.loads(text)
        gens = {name: LorentzMap(np.array(mat, dtype=float))
                for name, mat in doc["generators"].items()}
        vals = {name: np.array(vec, dtype=float)
                for name, vec in doc.get("tau", {}).items()}
        return cls(gens, vals, doc.get("relators", ()), tolerance=tolerance)

    def to_json(self) -> str:
        return json.dumps({
            "generators": {k: v.entries.tolist() for k, v in self.generators.items()},
            "tau": {k: v.tolist() for k, v in self.values.items()},
            "relators": self.relators,
        })


def coboundary(generators: dict, v) -> Cocycle:
    """The cocycle tau(alpha) = v - alpha v; trivially satisfies the identity."""
    v = np.asarray(v, dtype=float)
    values = {name: v - g.apply(v) for name, g in generators.items()}
    return Cocycle(generators, values)


# ---------------------------------------------------------------------------
# the fuchsian model


@dataclass(frozen=True)
class ConeDomain:
    """The future cone C = {|x - apex|^2 <= 0, (x - apex)_{d+1} >= 0}."""

    apex: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "apex", np.asarray(self.apex, dtype=float))

    def contains(self, x, tol: float = 0.0) -> bool:
        q = np.asarray(x, dtype=float) - self.apex
        return bool(mink_norm2(q) <= tol and q[-1] >= -tol)

    def time(self, x) -> float:
        """Cosmological time sqrt(-|x - apex|^2); zero outside the cone."""
        q = np.asarray(x, dtype=float) - self.apex
        return float(np.sqrt(max(0.0, -mink_norm2(q))))


def fuchsian_time(y) -> float:
    """-1/|y|^2 for y strictly inside the future cone; equals k^2 on the
    leaf of curvature parameter k (the hyperboloid of radius 1/k)."""
    y = np.asarray(y, dtype=float)
    cls = classify(y)
    if cls.tag != "timelike" or not cls.future:
        raise ValueError(f"y must lie in the open future cone, got {cls}")
    return -1.0 / mink_norm2(y)


def leaf_samples(k: float, count: int, rng: np.random.Generator, d: int = 3,
                 spread: float = 1.0) -> np.ndarray:
    """Random points of the leaf |y|^2 = -1/k^2 in the future cone."""
    x = spread * rng.standard_normal((count, d))
    t = np.sqrt(1.0 / k ** 2 + np.sum(x * x, axis=1))
    return np.hstack([x, t[:, None]])


def cone_position_check(samples, k: float, tol: float = 1e-9) -> dict:
    """Containment in the cone and exactness of the time offset 1/k.

    In the fuchsian model the set of points at cosmological time >= 1/k
    and the closed future side of the leaf coincide, so the check reduces
    to |time(sample) - 1/k| <= tol plus cone membership.
    """
    cone = ConeDomain(np.zeros(np.shape(samples)[1]))
    offsets = np.array([cone.time(s) for s in samples])
    inside = all(cone.contains(s, tol=tol) for s in samples)
    dev = float(np.max(np.abs(offsets - 1.0 / k)))
    return {
        "all_in_cone": inside,
        "offset_target": 1.0 / k,
        "max_offset_deviation": dev,
        "passed": bool(inside and dev <= tol),
    }


def future_complete_check(samples, member, displacements=None, rng=None) -> dict:
    """Does the domain absorb future displacements of its points?

    ``member`` is a membership predicate; for every sample inside the
    domain and every future causal displacement v the point x + v must
    stay inside.  Violations are collected, not raised.
    """
    samples = np.asarray(samples, dtype=float)
    d = samples.shape[1] - 1
    if displacements is None:
        if rng is None:
            rng = np.random.default_rng(0)
        x = rng.standard_normal((16, d))
        t = np.sqrt(np.sum(x * x, axis=1)) * (1.0 + rng.uniform(0, 1, 16))
        displacements = np.hstack([x, t[:, None]])
        displacements = np.vstack([displacements, np.eye(d + 1)[-1]])
    violations = []
    tested = 0
    for s in samples:
        if not member(s):
            continue
        for v in displacements:
            tested += 1
            if not member(s + v):
                violations.append((s.copy(), np.asarray(v, dtype=float).copy()))
    return {"tested": tested, "violations": violations,
            "passed": not violations}
