"""Finite sample spaces, claims, densities and Young functions.

On a finite sample space every Orlicz space collapses to R^n, so claims are
plain float vectors. Densities are stored as probability vectors (the measure
Q itself), not as Radon-Nikodym ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PROB_TOL = 1e-12


@dataclass(frozen=True)
class SampleSpace:
    """Atoms with strictly positive reference probabilities."""

    probs: np.ndarray
    atoms: tuple[str, ...] = field(default=())

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size < 1:
            raise ValueError("sample space needs at least one atom")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise ValueError("reference probabilities must be finite and > 0")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        atoms = tuple(self.atoms) or tuple(f"w{k + 1}" for k in range(p.size))
        if len(atoms) != p.size:
            raise ValueError("atom labels and probabilities differ in length")
        object.__setattr__(self, "atoms", atoms)

    @property
    def n(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "SampleSpace":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_weights(cls, weights: Sequence[float], atoms: Sequence[str] = ()) -> "SampleSpace":
        """Normalize positive weights into a sample space."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), tuple(atoms))

    def radon_nikodym(self, q) -> np.ndarray:
        """dQ/dP as a vector q_k / p_k."""
        return as_density(self, q) / self.probs

    def indicator(self, k: int) -> np.ndarray:
        e = np.zeros(self.n)
        e[k] = 1.0
        return e


def as_claim(space: SampleSpace, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (space.n,):
        raise ValueError(f"claim has shape {x.shape}, expected ({space.n},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("claims must have finite entries")
    return x


def as_density(space: SampleSpace, q, tol: float = PROB_TOL) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (space.n,):
        raise ValueError(f"density has shape {q.shape}, expected ({space.n},)")
    if np.any(q < -tol) or abs(q.sum() - 1.0) > tol:
        raise ValueError("density must be nonnegative and sum to 1")
    return q


def expectation(space: SampleSpace, q, x) -> float:
    """E_Q[x] as a plain dot product."""
    q = as_density(space, q)
    x = as_claim(space, x)
    return float(q @ x)


def classify_density(space: SampleSpace, q) -> str:
    q = as_density(space, q)
    return "equivalent" if q.min() > 0 else "absolutely_continuous"


@dataclass(frozen=True)
class YoungFunction:
    """Even convex Phi with Phi(0) = 0.

    kind "power": |a|**p (p >= 1); "exp": exp(gamma*|a|) - 1;
    "capped": |a| on [-1, 1] and +inf outside.
    """

    kind: str = "power"
    p: float = 2.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("power", "exp", "capped"):
            raise ValueError(f"unknown Young function kind {self.kind!r}")
        if self.kind == "power" and self.p < 1:
            raise ValueError("power Young function needs p >= 1")
        if self.kind == "exp" and self.gamma <= 0:
            raise ValueError("exponential Young function needs gamma > 0")

    def __call__(self, a):
        a = np.abs(np.asarray(a, dtype=float))
        if self.kind == "power":
            return a ** self.p
        if self.kind == "exp":
            return np.expm1(self.gamma * a)
        return np.where(a <= 1.0, a, np.inf)

    @property
    def smooth(self) -> bool:
        return self.kind != "capped"

    def derivative(self, a):
        """Phi'(a) for a >= 0 (right derivative at 0)."""
        a = np.abs(np.asarray(a, dtype=float))
        if self.kind == "power":
            return self.p * a ** (self.p - 1)
        if self.kind == "exp":
            return self.gamma * np.exp(self.gamma * a)
        return np.where(a <= 1.0, 1.0, np.inf)

    def inverse(self, v: float) -> float:
        """Smallest a >= 0 with Phi(a) >= v."""
        if self.kind == "power":
            return v ** (1.0 / self.p)
        if self.kind == "exp":
            return math.log1p(v) / self.gamma
        return min(v, 1.0)

    def to_dict(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "p": self.p}
        if self.kind == "exp":
            return {"kind": "exp", "gamma": self.gamma}
        return {"kind": "capped"}


def luxemburg_norm(phi: YoungFunction, space: SampleSpace, x, rtol: float = 1e-12) -> float:
    """inf{c > 0 : E[Phi(x / c)] <= 1}, by bisection on c."""
    x = as_claim(space, x)
    top = float(np.max(np.abs(x)))
    if top == 0.0:
        return 0.0
    y = x / top  # homogeneity; keeps the bisection away from subnormal scales

    def excess(c: float) -> float:
        return float(space.probs @ phi(y / c)) - 1.0

    hi = 2.0
    for _ in range(2100):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    lo = hi / 2.0
    for _ in range(2100):
        if excess(lo) > 0:
            break
        hi, lo = lo, lo / 2.0
    for _ in range(200):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return top * hi
