"""Gaussian measures, Gauss-Hermite quadrature and Wiener-coordinate sampling.

Measures never materialize a Banach space: a sample IS its finite list of
coordinates ell_{e_1}..ell_{e_n}, extended lazily.  Every computation in the
calculus factors through finitely many coordinates, so nothing more is needed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import special

MAX_GH_ORDER = 256
DEFAULT_QUAD_BUDGET = 10**8

# Dedicated sub-stream key for the tail remainder in exact-law sampling of
# ell_a minus its projection (see stochproj); keeps coordinate keys clean.
REMAINDER_KEY = 2**32 - 1


def quad_budget() -> int:
    """Point budget for tensor quadrature; env GAUSSWEYL_QUAD_MAX overrides."""
    raw = os.environ.get("GAUSSWEYL_QUAD_MAX")
    if raw is None:
        return DEFAULT_QUAD_BUDGET
    try:
        return int(float(raw))
    except ValueError as exc:
        raise ValueError(f"GAUSSWEYL_QUAD_MAX is not a number: {raw!r}") from exc


@dataclass(frozen=True)
class GaussianMeasure:
    """Centered Gaussian mu_{R^d, s}: dimension d, variance s per coordinate."""

    dim: int
    variance: float

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        sq = x * x if self.dim == 1 else np.sum(x * x, axis=-1)
        return (2.0 * math.pi * self.variance) ** (-self.dim / 2.0) * np.exp(
            -sq / (2.0 * self.variance)
        )


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights integrating exactly against mu_{R,s} up to degree 2n-1."""

    nodes: np.ndarray
    weights: np.ndarray
    variance: float
    order: int


def gh_rule(n: int, s: float) -> QuadratureRule:
    """Gauss-Hermite rule for the measure mu_{R,s}.

    Nodes and weights come from the symmetric tridiagonal eigenproblem of the
    e^{-t^2} orthonormal-polynomial recurrence, then are rescaled by
    x = sqrt(2 s) t; weights are normalized to sum exactly to 1.

    Parameters
    ----------
    n : int
        Order, 1 <= n <= 256.
    s : float
        Variance of the target Gaussian measure.

    Returns
    -------
    QuadratureRule
    """
    if not 1 <= n <= MAX_GH_ORDER:
        raise ValueError(f"quadrature order {n} outside [1, {MAX_GH_ORDER}]")
    if not s > 0:
        raise ValueError("variance must be positive")
    t, w = special.roots_hermite(n)
    w = w / w.sum()
    return QuadratureRule(nodes=math.sqrt(2.0 * s) * t, weights=w, variance=s, order=n)


def gl_panel_rule(lo: float, hi: float, panels: int, nodes: int) -> QuadratureRule:
    """Composite Gauss-Legendre rule on [lo, hi] against plain Lebesgue
    measure (weights sum to hi - lo; variance field is 0 as a marker).

    Used where the integrand has edges or oscillation that a single global
    rule would smear: panel boundaries can be placed on the features.
    """
    if hi <= lo:
        raise ValueError("need hi > lo")
    if panels < 1 or nodes < 1:
        raise ValueError("panels and nodes must be >= 1")
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes=xs, weights=ws, variance=0.0, order=panels * nodes)


def integrate_1d(f, rule: QuadratureRule) -> complex:
    vals = np.asarray(f(rule.nodes))
    return complex(np.sum(vals * rule.weights))


def integrate_tensor(f, rule: QuadratureRule, m: int) -> complex:
    """Tensor-product quadrature of f against mu_{R^m, s}.

    f is called once on an (n^m, m) array of points and must broadcast to a
    length-n^m vector (constants are accepted).

    Raises
    ------
    ValueError
        If n^m exceeds the point budget (GAUSSWEYL_QUAD_MAX, default 1e8).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    npts = rule.order**m
    if npts > quad_budget():
        raise ValueError(
            f"tensor quadrature budget exceeded: {rule.order}^{m} = {npts} points"
        )
    grids = np.meshgrid(*([rule.nodes] * m), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([rule.weights] * m), indexing="ij")
    wts = np.ones(npts)
    for wg in wgrids:
        wts = wts * wg.ravel()
    vals = np.asarray(f(pts))
    if vals.shape == ():
        vals = np.full(npts, complex(vals))
    return complex(np.sum(vals * wts))


def ell_norm(p: float, s: float, b_norm: float) -> float:
    """L^p(mu_{B,s}) norm of ell_b: C_{p,s} |b| with
    C_{p,s} = sqrt(2s) pi^{-1/(2p)} Gamma((p+1)/2)^{1/p}."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if b_norm < 0:
        raise ValueError("b_norm must be >= 0")
    return c_ps(p, s) * b_norm


def c_ps(p: float, s: float) -> float:
    return (
        math.sqrt(2.0 * s)
        * math.pi ** (-1.0 / (2.0 * p))
        * math.gamma((p + 1.0) / 2.0) ** (1.0 / p)
    )


@dataclass(frozen=True)
class WienerSample:
    """Values of ell_{e_1}..ell_{e_n} at one sample point of (B, mu_{B,s})."""

    coords: np.ndarray
    variance: float
    stream: int

    def ell(self, a) -> float:
        """ell_a for a finite direction vector a (truncated to shared length)."""
        a = np.asarray(a, dtype=float)
        k = min(len(a), len(self.coords))
        return float(np.dot(a[:k], self.coords[:k]))


def coordinate_stream(stream: int, coord_key: int) -> np.random.Generator:
    """Philox generator keyed by (stream, coordinate); counter-based, so every
    (stream, coordinate) pair is an independent reproducible stream."""
    return np.random.Generator(
        np.random.Philox(key=np.array([stream, coord_key], dtype=np.uint64))
    )


def mc_sample_array(n: int, s: float, stream: int, count: int) -> np.ndarray:
    """(count, n) array of i.i.d. N(0, s) coordinates.

    Column j is drawn from its own keyed sub-stream, so extending n never
    changes earlier coordinates and extending count never changes earlier
    samples.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    out = np.empty((count, n))
    root = math.sqrt(s)
    for j in range(n):
        out[:, j] = root * coordinate_stream(stream, j + 1).standard_normal(count)
    return out


def mc_sample(n: int, s: float, stream: int, count: int) -> list[WienerSample]:
    arr = mc_sample_array(n, s, stream, count)
    return [WienerSample(coords=arr[i], variance=s, stream=stream) for i in range(count)]


class QuadratureConvergenceError(RuntimeError):
    """Raised when the adaptive order ladder hits its cap without stabilizing."""


def ladder(value_at_order, start: int = 48, step: int = 16, cap: int = 192):
    """Raise quadrature order until two successive orders agree.

    Acceptance: |v(n+step) - v(n)| <= max(1e-10, 1e-9 |v(n+step)|).  Returns
    (value, order_used); raises QuadratureConvergenceError past the cap.
    """
    n = min(start, cap)
    prev = value_at_order(n)
    while n < cap:
        n = min(n + step, cap)
        cur = value_at_order(n)
        delta = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        scale = float(np.max(np.abs(np.asarray(cur))))
        if delta <= max(1e-10, 1e-9 * scale):
            return cur, n
        prev = cur
    raise QuadratureConvergenceError(
        f"order ladder did not stabilize by order {cap}"
    )
