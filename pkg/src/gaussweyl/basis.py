"""h-scaled Hermite functions, Laguerre polynomials, Bargman kernels and
multi-index bookkeeping.

The Hermite family here is the polynomial one, orthonormal in
L2(R, mu_{R,h/2}) where mu_{R,s} is the centered Gaussian measure of variance
s.  The Gaussian weight lives in the measure, not in the functions; the
gamma transform moves it into the functions when Lebesgue L2 is wanted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Mapping

import numpy as np

MAX_HERMITE_DEGREE = 512
MAX_LAGUERRE_TOTAL = 200


@dataclass(frozen=True)
class CalcContext:
    """Semiclassical parameter bundle; h > 0."""

    h: float = 1.0

    def __post_init__(self) -> None:
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError(f"h must be a positive finite real, got {self.h!r}")


class MultiIndex:
    """Finitely supported map: coordinate index (>= 1) -> degree (>= 1).

    Absent coordinates have degree 0.  Instances are immutable and hashable so
    they can key expansion coefficient maps.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(entries)
        for idx, deg in items.items():
            if idx < 1:
                raise ValueError(f"coordinate indices start at 1, got {idx}")
            if deg < 0:
                raise ValueError(f"degrees must be nonnegative, got {deg} at {idx}")
        self._entries = tuple(sorted((i, d) for i, d in items.items() if d > 0))

    @classmethod
    def from_tuple(cls, degrees: Iterable[int]) -> "MultiIndex":
        """Build from a dense degree tuple (coordinate 1 first)."""
        return cls({i + 1: d for i, d in enumerate(degrees)})

    def degree(self, idx: int) -> int:
        for i, d in self._entries:
            if i == idx:
                return d
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._entries)

    def depth(self) -> int:
        """Maximum stored degree (0 for the empty index)."""
        return max((d for _, d in self._entries), default=0)

    def max_coordinate(self) -> int:
        return max((i for i, _ in self._entries), default=0)

    def total(self) -> int:
        return sum(d for _, d in self._entries)

    def as_tuple(self, d: int) -> tuple[int, ...]:
        if self.max_coordinate() > d:
            raise ValueError(f"support exceeds dimension {d}")
        return tuple(self.degree(i) for i in range(1, d + 1))

    def items(self):
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiIndex) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        body = ", ".join(f"{i}:{d}" for i, d in self._entries)
        return f"MultiIndex({{{body}}})"


ZERO_INDEX = MultiIndex()


@dataclass(frozen=True)
class TruncationSet:
    """All multi-indices supported on {1..d} with every degree <= N.

    Enumeration is graded-lexicographic (total degree first, then lex on the
    dense degree tuple), which fixes matrix layouts across runs.
    """

    dims: int
    max_degree: int

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")

    @property
    def size(self) -> int:
        return (self.max_degree + 1) ** self.dims

    def indices(self) -> list[MultiIndex]:
        tuples = sorted(
            product(range(self.max_degree + 1), repeat=self.dims),
            key=lambda t: (sum(t), t),
        )
        return [MultiIndex.from_tuple(t) for t in tuples]

    def index_of(self, alpha: MultiIndex) -> int:
        try:
            return self.indices().index(alpha)
        except ValueError:
            raise KeyError(f"{alpha!r} not in truncation set") from None


def _check_degree(j: int) -> None:
    if j < 0:
        raise ValueError(f"degree must be nonnegative, got {j}")
    if j > MAX_HERMITE_DEGREE:
        raise ValueError(
            f"degree {j} exceeds the recurrence accuracy budget ({MAX_HERMITE_DEGREE})"
        )


def hermite_eval(j: int, x, ctx: CalcContext):
    """Evaluate the h-scaled Hermite polynomial psi_j at x.

    Three-term recurrence:
        psi_j = sqrt(2/h) (x / sqrt(j)) psi_{j-1} - sqrt((j-1)/j) psi_{j-2},
    with psi_{-1} = 0, psi_0 = 1.  Vectorized over x.

    Parameters
    ----------
    j : int
        Degree, 0 <= j <= 512.
    x : float or ndarray
        Evaluation points.
    ctx : CalcContext
        Supplies h.

    Returns
    -------
    float or ndarray
        psi_j(x).
    """
    _check_degree(j)
    x = np.asarray(x, dtype=float)
    c = math.sqrt(2.0 / ctx.h)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for m in range(1, j + 1):
        prev, cur = cur, c * x / math.sqrt(m) * cur - math.sqrt((m - 1) / m) * prev
    return cur if cur.shape else float(cur)


def hermite_batch(jmax: int, x, ctx: CalcContext) -> np.ndarray:
    """All psi_0..psi_jmax at x in one recurrence sweep; shape (jmax+1,) + x.shape."""
    _check_degree(jmax)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((jmax + 1,) + x.shape)
    c = math.sqrt(2.0 / ctx.h)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = c * x
    for m in range(2, jmax + 1):
        out[m] = c * x / math.sqrt(m) * out[m - 1] - math.sqrt((m - 1) / m) * out[m - 2]
    return out


def laguerre_eval(k: int, alpha: int, x):
    """Generalized Laguerre polynomial L_k^(alpha)(x) by its explicit sum.

    The factorial ratio (k+alpha)!/((k-m)!(alpha+m)!) is carried as a running
    product so nothing overflows for k + alpha <= 200.
    """
    if k < 0 or alpha < 0:
        raise ValueError("k and alpha must be nonnegative")
    if k + alpha > MAX_LAGUERRE_TOTAL:
        raise ValueError(
            f"k + alpha = {k + alpha} exceeds the overflow guard ({MAX_LAGUERRE_TOTAL})"
        )
    x = np.asarray(x, dtype=float)
    # term_m = C(k+alpha, k-m) (-x)^m / m!; start at m=0 and update multiplicatively.
    term = np.full_like(x, math.comb(k + alpha, k), dtype=float)
    acc = term.copy()
    for m in range(1, k + 1):
        # ratio term_m/term_{m-1} = -(k-m+1)/((alpha+m) m) * x
        term = term * (-(k - m + 1) / ((alpha + m) * m)) * x
        acc += term
    return acc if acc.shape else float(acc)


def bargman_eval(v: complex, x, ctx: CalcContext):
    """Bargman kernel K_v(x) = exp(x v sqrt(2/h) - v^2/2)."""
    x = np.asarray(x, dtype=float)
    val = np.exp(x * v * math.sqrt(2.0 / ctx.h) - v * v / 2.0)
    return val if val.shape else complex(val)


def bargman_partial_sum(v: complex, x, ctx: CalcContext, J: int):
    """Partial sum sum_{j<=J} psi_j(x) v^j / sqrt(j!) of the Bargman kernel."""
    if J < 0:
        raise ValueError("J must be >= 0")
    x = np.asarray(x, dtype=float)
    psis = hermite_batch(J, x, ctx)
    acc = np.zeros(x.shape if x.shape else (1,), dtype=complex)
    coef = 1.0 + 0.0j  # v^j / sqrt(j!)
    for j in range(J + 1):
        if j > 0:
            coef = coef * v / math.sqrt(j)
        acc += coef * psis[j]
    return acc if x.shape else complex(acc[0])


def gamma_transform(f: Callable, ctx: CalcContext, d: int = 1) -> Callable:
    """Gaussian weight isometry L2(mu_{R^d,h/2}) -> L2(dy).

    Returns y |-> (pi h)^{-d/4} e^{-|y|^2 / 2h} f(y).  For d > 1 the argument
    is an array whose last axis has length d.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    h = ctx.h
    pref = (math.pi * h) ** (-d / 4.0)

    def gf(y):
        y = np.asarray(y, dtype=float)
        if d == 1:
            sq = y * y
        else:
            sq = np.sum(y * y, axis=-1)
        return pref * np.exp(-sq / (2.0 * h)) * f(y)

    return gf
