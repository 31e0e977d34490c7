"""Operator matrix elements, quadratic forms, and the rotation identities.

The central object is the matrix element

    I_{alpha beta}(F) = int F(x, xi) prod_j W(psi_{alpha_j}, psi_{beta_j})(x_j, xi_j)
                        dmu_{R^{2d}, h/2}(x, xi),

the (alpha, beta) entry of the operator with symbol F in the Hermite basis.
Coordinates beyond the symbol's base dimension d integrate to delta factors,
so entries with alpha_j != beta_j for some j > d vanish identically; per-pair
radial symbols kill every off-diagonal entry the same way.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import CalcContext, MultiIndex, TruncationSet, hermite_eval
from .gaussian import gh_rule, gl_panel_rule, integrate_tensor, ladder, quad_budget
from .symbols import SymbolDescriptor, custom_symbol, eval_ddot
from .wigner import wigner_closed

MAX_MATRIX_SIZE = 4096


def _as_index(a) -> MultiIndex:
    return a if isinstance(a, MultiIndex) else MultiIndex.from_tuple(tuple(a))


# ---------------------------------------------------------------------------
# Polynomials in one (x, xi) pair, with an exact rotation derivative.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly2:
    """Polynomial in a single phase-space pair: sum of c * x^i xi^j terms.

    Carries the rotation derivative rot = x d/dxi - xi d/dx in closed form,
    which keeps the integration-by-parts checks free of finite differencing.
    """

    terms: tuple[tuple[tuple[int, int], complex], ...]

    @classmethod
    def from_dict(cls, d: dict[tuple[int, int], complex]) -> "Poly2":
        items = tuple(
            sorted(((ij, complex(c)) for ij, c in d.items() if c != 0))
        )
        return cls(terms=items)

    def eval(self, x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
        for (i, j), c in self.terms:
            out = out + c * x**i * xi**j
        return out

    def __call__(self, xblock, xiblock):
        # evaluator form used by custom symbols: blocks of shape (npoints, 1)
        return self.eval(np.asarray(xblock)[..., 0], np.asarray(xiblock)[..., 0])

    def rot(self) -> "Poly2":
        """x d/dxi - xi d/dx, exactly."""
        acc: dict[tuple[int, int], complex] = {}
        for (i, j), c in self.terms:
            if j:
                key = (i + 1, j - 1)
                acc[key] = acc.get(key, 0.0) + c * j
            if i:
                key = (i - 1, j + 1)
                acc[key] = acc.get(key, 0.0) - c * i
        return Poly2.from_dict(acc)

    def rot_power(self, n: int) -> "Poly2":
        p = self
        for _ in range(n):
            p = p.rot()
        return p

    def degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=0)


def poly_symbol(poly: Poly2) -> SymbolDescriptor:
    """A d=1 custom symbol whose evaluator is a Poly2 (unbounded)."""
    return custom_symbol(poly, d=1, smooth=True, bounded=False)


# ---------------------------------------------------------------------------
# Hermite expansions and operator matrices.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermiteExpansion:
    """Finite expansion sum_alpha c_alpha psi_alpha in the Hermite basis."""

    coeffs: tuple[tuple[MultiIndex, complex], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "HermiteExpansion":
        if isinstance(pairs, dict):
            pairs = pairs.items()
        seen: dict[MultiIndex, complex] = {}
        for idx, c in pairs:
            idx = _as_index(idx)
            seen[idx] = seen.get(idx, 0.0) + complex(c)
        items = tuple(sorted(seen.items(), key=lambda kv: (kv[0].total(), kv[0].as_tuple(kv[0].max_coordinate() or 1))))
        return cls(coeffs=items)

    @classmethod
    def single(cls, idx, c: complex = 1.0) -> "HermiteExpansion":
        return cls.from_pairs([(idx, c)])

    def items(self):
        return self.coeffs

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for _, c in self.coeffs))

    def dims(self) -> int:
        return max((idx.max_coordinate() for idx, _ in self.coeffs), default=0)


@dataclass
class OperatorMatrix:
    """Assembled matrix of I_{alpha beta} over a truncation set, with the
    bookkeeping needed to reproduce it (symbol text, h, quadrature orders)."""

    truncation: TruncationSet
    entries: np.ndarray
    symbol_text: str
    h: float
    d: int
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


# ---------------------------------------------------------------------------
# Matrix elements.
# ---------------------------------------------------------------------------


def _pair_shot(j: int, k: int, nu: float, ctx: CalcContext, n: int) -> complex:
    """int e^{-nu r^2} W_jk dmu_{R^2,h/2} with an order-n tensor rule.

    The Gaussian factor is folded into the quadrature measure (variance
    h/(2(1+nu h)), mass 1/(1+nu h)), leaving a polynomial integrand that the
    rule handles exactly; otherwise large nu h makes the integrand much
    narrower than the measure and starves the node ladder."""
    scale = 1.0 + float(nu) * ctx.h
    r = gh_rule(n, ctx.h / (2.0 * scale))
    x = r.nodes[:, None]
    xi = r.nodes[None, :]
    vals = wigner_closed(j, k, x, xi, ctx)
    return complex(np.einsum("i,j,ij->", r.weights, r.weights, vals)) / scale


def _pair_integral(j, k, nu, ctx, rule=None, cache=None):
    key = (j, k, float(nu), ctx.h)
    if cache is not None and key in cache:
        return cache[key]
    if rule is not None:
        val, order = _pair_shot(j, k, nu, ctx, rule.order), rule.order
    else:
        val, order = ladder(
            lambda n: _pair_shot(j, k, nu, ctx, n), start=2 * (max(j, k) + 1) + 16
        )
    if cache is not None:
        cache[key] = (val, order)
    return val, order


def _wigner_on_grid_by_quadrature(j, k, xs, xis, ctx, n: int):
    """W(psi_j, psi_k) on a grid of phase-space points, via the defining
    integral (the slow dual route to wigner_closed)."""
    r = gh_rule(n, ctx.h / 2.0)
    t = r.nodes[None, :]
    xs = np.asarray(xs, dtype=float).reshape(-1, 1)
    xis = np.asarray(xis, dtype=float).reshape(-1, 1)
    vals = (
        np.exp(-2j * xis * t / ctx.h)
        * hermite_eval(j, xs + t, ctx)
        * hermite_eval(k, xs - t, ctx)
    )
    return (vals @ r.weights) * np.exp(xis[:, 0] ** 2 / ctx.h)


def _tensor_shot(sym, alpha, beta, ctx, n: int, wigner_route: str) -> complex:
    d = sym.d
    rule = gh_rule(n, ctx.h / 2.0)

    def f(pts):
        x = pts[:, :d]
        xi = pts[:, d:]
        vals = np.asarray(eval_ddot(sym, x, xi, ctx), dtype=complex)
        for i in range(1, d + 1):
            a_i, b_i = alpha.degree(i), beta.degree(i)
            if a_i or b_i:
                if wigner_route == "closed":
                    w = wigner_closed(a_i, b_i, x[:, i - 1], xi[:, i - 1], ctx)
                else:
                    inner = max(64, 2 * (max(a_i, b_i) + 1) + 16)
                    w = _wigner_on_grid_by_quadrature(
                        a_i, b_i, x[:, i - 1], xi[:, i - 1], ctx, inner
                    )
                vals = vals * w
        return vals

    return complex(integrate_tensor(f, rule, 2 * d))


def _tensor_element(sym, alpha, beta, ctx, rule=None, wigner_route="closed"):
    if rule is not None:
        return _tensor_shot(sym, alpha, beta, ctx, rule.order, wigner_route), rule.order
    maxdeg = max(
        [alpha.degree(i) for i in range(1, sym.d + 1)]
        + [beta.degree(i) for i in range(1, sym.d + 1)]
        + [0]
    )
    cap = min(192, int(quad_budget() ** (1.0 / (2 * sym.d))))
    start = min(2 * (maxdeg + 1) + 16, cap)
    return ladder(
        lambda n: _tensor_shot(sym, alpha, beta, ctx, n, wigner_route),
        start=start,
        cap=cap,
    )


def _box_cut(j: int, k: int, h: float) -> float:
    # Gaussian-weighted Hermite-pair mass is negligible past the turning
    # point sqrt(h (2(j+k)+1)/2) plus a wide safety margin.
    return math.sqrt(h) * (math.sqrt(2.0 * (j + k) + 1.0) + 12.0)


def _box_shot(sym, j, k, ctx, panels: int, nodes: int) -> complex:
    h = ctx.h
    cut = _box_cut(j, k, h)
    xhi = min(2.0 * math.pi * h * sym.a, cut)
    yhi = min(sym.a, cut)
    if xhi <= 0.0 or yhi <= 0.0:
        return 0.0j
    rx = gl_panel_rule(0.0, xhi, panels, nodes)
    ry = gl_panel_rule(0.0, yhi, panels, nodes)
    x = rx.nodes[:, None]
    xi = ry.nodes[None, :]
    vals = wigner_closed(j, k, x, xi, ctx) * np.exp(-(x * x + xi * xi) / h) / (math.pi * h)
    return complex(np.einsum("i,j,ij->", rx.weights, ry.weights, vals))


def _box_element(sym, j, k, ctx):
    panels = max(4, (j + k) // 2 + 2)
    nodes = 32
    prev = _box_shot(sym, j, k, ctx, panels, nodes)
    for _ in range(3):
        cur = _box_shot(sym, j, k, ctx, 2 * panels, nodes)
        if abs(cur - prev) <= max(1e-11, 1e-9 * abs(cur)):
            return cur, 2 * panels * nodes
        panels *= 2
        prev = cur
    return prev, panels * nodes


def _element_with_order(sym, alpha, beta, ctx, rule=None, wigner_route="closed", cache=None):
    alpha = _as_index(alpha)
    beta = _as_index(beta)
    d = sym.d
    top = max(alpha.max_coordinate(), beta.max_coordinate())
    for i in range(d + 1, top + 1):
        if alpha.degree(i) != beta.degree(i):
            # the pair's Wigner factor integrates to delta_{jk}
            return 0.0j, 0
    if sym.family == "box":
        if wigner_route != "closed":
            raise ValueError("box matrix elements support only the closed Wigner route")
        return _box_element(sym, alpha.degree(1), beta.degree(1), ctx)
    mix = sym.gauss_mixture()
    if mix is not None and wigner_route == "closed":
        total = 0.0j
        order = 0
        for coeff, nus in mix:
            prod = complex(coeff)
            for i in range(1, d + 1):
                val, o = _pair_integral(
                    alpha.degree(i), beta.degree(i), nus.get(i, 0.0), ctx, rule, cache
                )
                prod *= val
                order = max(order, o)
            total += prod
        return total, order
    return _tensor_element(sym, alpha, beta, ctx, rule, wigner_route)


def matrix_element(sym, alpha, beta, ctx: CalcContext, rule=None, wigner_route="closed"):
    """I_{alpha beta}(F): the (alpha, beta) matrix entry of the operator with
    symbol `sym`.

    Entries with alpha_j != beta_j at a coordinate beyond the symbol's base
    dimension vanish identically and are returned as exact zeros.  With
    wigner_route="quadrature" the per-pair Wigner factors are themselves
    computed from the defining integral instead of the closed form.
    """
    val, _ = _element_with_order(sym, alpha, beta, ctx, rule, wigner_route)
    return val


def assemble_matrix(
    sym,
    truncation: TruncationSet,
    ctx: CalcContext,
    rule=None,
    wigner_route="closed",
) -> OperatorMatrix:
    """All I_{alpha beta} over a graded truncation set, as a dense matrix.

    Per-pair radial symbols produce exactly diagonal matrices; those zeros are
    structural (no quadrature is run for them).  Real symbols fill the lower
    triangle by Hermitian symmetry.
    """
    if truncation.size > MAX_MATRIX_SIZE:
        raise ValueError(
            f"truncation has {truncation.size} elements; the dense-matrix cap is {MAX_MATRIX_SIZE}"
        )
    idxs = truncation.indices()
    size = len(idxs)
    entries = np.zeros((size, size), dtype=complex)
    pairwise_radial = sym.is_pairwise_radial()
    hermitian = sym.family != "custom"
    # one pair-integral cache shared across the whole assembly
    cache: dict = {}
    structural = 0
    max_order = 0
    for p in range(size):
        qlo = p if hermitian else 0
        for q in range(qlo, size):
            a, b = idxs[p], idxs[q]
            if pairwise_radial and a != b:
                structural += 1
                continue
            val, order = _element_with_order(sym, a, b, ctx, rule, wigner_route, cache)
            max_order = max(max_order, order)
            entries[p, q] = val
            if hermitian and q > p:
                entries[q, p] = np.conjugate(val)
    try:
        text = sym.text()
    except ValueError:
        text = f"<{sym.family}>"
    meta = {
        "wigner_route": wigner_route,
        "max_order": max_order,
        "structural_zeros": structural,
        "pairwise_radial": pairwise_radial,
    }
    return OperatorMatrix(
        truncation=truncation,
        entries=entries,
        symbol_text=text,
        h=ctx.h,
        d=sym.d,
        meta=meta,
    )


def quadratic_form(sym, f: HermiteExpansion, g: HermiteExpansion, ctx: CalcContext, rule=None, wigner_route="closed") -> complex:
    """<Op(F) f, g> = sum_{alpha,beta} c_alpha conj(c'_beta) I_{alpha beta}."""
    pairwise_radial = sym.is_pairwise_radial()
    cache: dict = {}
    total = 0.0j
    seen: dict[tuple[MultiIndex, MultiIndex], complex] = {}
    for a, ca in f.items():
        for b, cb in g.items():
            if pairwise_radial and a != b:
                continue
            key = (a, b)
            if key not in seen:
                seen[key], _ = _element_with_order(sym, a, b, ctx, rule, wigner_route, cache)
            total += ca * np.conjugate(cb) * seen[key]
    return complex(total)


def eig_hermitian(matrix) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (OperatorMatrix or array).

    Raises if the Hermiticity defect exceeds 1e-8 relative to the norm.
    """
    A = matrix.entries if isinstance(matrix, OperatorMatrix) else np.asarray(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.linalg.norm(A)))
    defect = float(np.linalg.norm(A - A.conj().T)) / scale
    if defect > 1e-8:
        raise ValueError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    return np.linalg.eigvalsh(0.5 * (A + A.conj().T))


# ---------------------------------------------------------------------------
# Integration-by-parts (rotation) identities.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IppResult:
    lhs: complex
    rhs: complex
    residual: float
    method: str
    fd_warning: bool = False

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.residual))


def _fd_rot(F, n: int, step: float = 1e-4):
    """Finite-difference rot^n of a callable F(x, xi); noisy for n >= 2."""

    def rot_one(G):
        def rG(x, xi):
            dxi = (G(x, xi + step) - G(x, xi - step)) / (2.0 * step)
            dx = (G(x + step, xi) - G(x - step, xi)) / (2.0 * step)
            return x * dxi - xi * dx

        return rG

    G = F
    for _ in range(n):
        G = rot_one(G)
    return G


def _poly1_eval(P, t):
    if P is None:
        return np.ones_like(np.asarray(t, dtype=float))
    if callable(P):
        return np.asarray(P(t))
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for m, c in enumerate(P):
        out = out + c * t**m
    return out


def ipp_check(F, n: int, s: int, eps: int, P, ctx: CalcContext, rule=None) -> IppResult:
    """Two-sided check of the rotation integration-by-parts identity

        (-s i eps)^n int F (x + i eps xi)^s P(r^2) e^{-r^2/h} dx dxi
          = int (rot^n F) (x + i eps xi)^s P(r^2) e^{-r^2/h} dx dxi

    over plain Lebesgue measure.  F is a Poly2 (exact rotation) or a callable
    (finite differences, flagged when the residual is untrustworthy).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    h = ctx.h

    if isinstance(F, Poly2):
        Feval = F.eval
        roteval = F.rot_power(n).eval
        method = "analytic"
        extra_deg = F.degree()
    else:
        Feval = F
        roteval = _fd_rot(F, n)
        method = "finite-difference"
        extra_deg = 6

    pdeg = 0 if (P is None or callable(P)) else 2 * (len(P) - 1)

    def shot(order: int):
        r = gh_rule(order, h / 2.0)

        def integrand(which):
            def f(pts):
                x, xi = pts[:, 0], pts[:, 1]
                base = (x + 1j * eps * xi) ** s * _poly1_eval(P, x * x + xi * xi)
                return np.asarray(which(x, xi), dtype=complex) * base

            return f

        lhs_i = integrate_tensor(integrand(Feval), r, 2)
        rhs_i = integrate_tensor(integrand(roteval), r, 2)
        # un-normalize: dmu = e^{-r^2/h} dx dxi / (pi h)
        return (math.pi * h) * np.array([lhs_i, rhs_i])

    if rule is not None:
        both = shot(rule.order)
    else:
        start = 2 * (s + extra_deg + pdeg + 2) + 16
        both, _ = ladder(lambda o: shot(o), start=min(start, 192))
    lhs = (-s * 1j * eps) ** n * both[0]
    rhs = both[1]
    residual = abs(lhs - rhs)
    scale = max(1.0, abs(lhs), abs(rhs))
    fd_warning = method == "finite-difference" and residual > 1e-6 * scale
    if fd_warning:
        warnings.warn(
            "finite-difference rotation is unstable here; supply a Poly2 for an exact check",
            RuntimeWarning,
            stacklevel=2,
        )
    return IppResult(lhs=complex(lhs), rhs=complex(rhs), residual=float(residual), method=method, fd_warning=fd_warning)


def rotation_reduction(sym, alpha, beta, coord: int, n: int, ctx: CalcContext, rule=None):
    """I_{alpha beta} via the transported rotation derivative at `coord`:

        I_{alpha beta}(F) = i^n / (beta_j - alpha_j)^n *
                            int (rot_j^n F) prod W dmu.

    Requires alpha_j != beta_j.  Symbols radial in that pair rotate to zero,
    so the entry is returned as an exact 0.
    """
    alpha = _as_index(alpha)
    beta = _as_index(beta)
    aj, bj = alpha.degree(coord), beta.degree(coord)
    if aj == bj:
        raise ValueError("rotation reduction needs alpha != beta at the chosen coordinate")
    if coord > sym.d:
        return 0.0j  # the symbol does not see this pair; delta factor kills it
    if sym.is_pairwise_radial():
        return 0.0j  # rot_j F = 0 for symbols radial in the pair
    if sym.family == "box":
        raise ValueError("rotation reduction needs a smooth symbol")
    if isinstance(sym.evaluator, Poly2):
        if sym.d != 1 or coord != 1:
            raise ValueError("Poly2 symbols are one-pair symbols")
        rot_sym = poly_symbol(sym.evaluator.rot_power(n))
    else:
        if sym.d != 1 or coord != 1:
            raise ValueError("finite-difference rotation is only supported for d=1")
        fd = _fd_rot(lambda x, xi: sym.evaluator(x[..., None], xi[..., None]), n)
        rot_sym = custom_symbol(lambda xb, xib: fd(xb[..., 0], xib[..., 0]), d=1)
    val, _ = _tensor_element(rot_sym, alpha, beta, ctx, rule, "closed")
    return (1j**n / (bj - aj) ** n) * val


# ---------------------------------------------------------------------------
# Deterministic exports.
# ---------------------------------------------------------------------------


def export_matrix_csv(om: OperatorMatrix, path) -> None:
    """Dense entries as RFC-4180 CSV: row_index,col_index,re,im (row-major)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row_index", "col_index", "re", "im"])
        for p in range(om.size):
            for q in range(om.size):
                v = om.entries[p, q]
                w.writerow([p, q, repr(float(v.real)), repr(float(v.imag))])


def matrix_metadata(om: OperatorMatrix) -> dict:
    """JSON-sidecar payload: everything needed to reproduce the matrix."""
    return {
        "symbol": om.symbol_text,
        "h": om.h,
        "N": om.truncation.max_degree,
        "d": om.truncation.dims,
        "symbol_d": om.d,
        "basis_size": om.size,
        "wigner_route": om.meta.get("wigner_route", "closed"),
        "quadrature_order": om.meta.get("max_order", 0),
        "structural_zeros": om.meta.get("structural_zeros", 0),
    }
