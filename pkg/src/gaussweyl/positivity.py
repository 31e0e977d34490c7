"""Executable positivity experiments: the non-positivity witness, radial and
tensor-radial lower bounds, the Garding inequality, and the box-localization
(Flandrin) eigenvalue search.

The Flandrin pipeline works in h-free classical variables: the matrix

    M_jk(a) = int_{[0,a)^2} W_cl(phi_j, phi_k)(x, eta) dx deta

over the 2 pi-adapted Hermite functions.  The eta-substitution that produces
it from the Gaussian-variable quadratic form cancels every h, which is
asserted by rebuilding a section through the h-dependent bridge at two
different h values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import roots_laguerre

from .basis import CalcContext, TruncationSet
from .gaussian import QuadratureConvergenceError, gl_panel_rule
from .quadform import HermiteExpansion, assemble_matrix, eig_hermitian, quadratic_form
from .symbols import (
    PhiSpec,
    SymbolDomainError,
    box_symbol,
    cv_class_params,
    eval_ddot,
    gaussian_symbol,
    lemma_epsilon,
)
from .wigner import classical_wigner_bridge, classical_wigner_closed, classical_wigner_diagonals

MAX_FLANDRIN_N = 128


# ---------------------------------------------------------------------------
# Non-positivity witness.
# ---------------------------------------------------------------------------


def nonpos_witness(nu: float, anorm: float, ctx: CalcContext):
    """The sign-changing quadratic form behind the main counterexample.

    Returns (closed_form, quadrature_value) for Q(F)(l_a, l_a) with
    F = e^{-nu |a|^2 r^2} and l_a = |a| sqrt(h/2) psi_1 in the first
    coordinate:

        closed = (h|a|^2/2) (1 - h nu |a|^2) / (1 + h nu |a|^2)^2,

    negative exactly when h nu |a|^2 > 1.
    """
    if not nu > 0:
        raise SymbolDomainError("nu", f"must be > 0, got {nu!r}")
    if not anorm > 0:
        raise SymbolDomainError("anorm", f"must be > 0, got {anorm!r}")
    h = ctx.h
    u = h * nu * anorm**2
    closed = (h * anorm**2 / 2.0) * (1.0 - u) / (1.0 + u) ** 2
    ell = HermiteExpansion.single((1,), anorm * math.sqrt(h / 2.0))
    q = quadratic_form(gaussian_symbol(nu, anorm), ell, ell, ctx)
    if abs(q.imag) > 1e-10 * max(1.0, abs(q.real)):
        raise AssertionError(f"quadratic form of a real symbol came out complex: {q!r}")
    return closed, q.real


# ---------------------------------------------------------------------------
# Radial lower bounds.
# ---------------------------------------------------------------------------


def radial_lower_bound(phi, ctx: CalcContext) -> float:
    """(1/h) int_0^inf Phi(t) e^{-t/h} dt: the operator lower bound of a
    radial symbol Phi(r_1^2) in one pair.

    PhiSpec profiles use the closed form; callables use 64-node
    Gauss-Laguerre after t = h u.
    """
    if isinstance(phi, PhiSpec):
        return phi.laplace_mean(ctx.h)
    u, w = roots_laguerre(64)
    vals = np.asarray(phi(ctx.h * u), dtype=float)
    res = float(np.sum(w * vals))
    tail = abs(w[-1] * vals[-1])
    if not np.isfinite(res) or tail > 1e-8 * max(1.0, abs(res)):
        raise ValueError("profile grows too fast for the e^{-t/h} weight")
    return res


def _block_bound(phi: PhiSpec, dj: int, h: float) -> float:
    """Closed form of the d-pair bound: sum_i c_i / (1 + nu_i h)^d."""
    return sum(c / (1.0 + nu * h) ** dj for c, nu in phi.exp_terms())


@dataclass(frozen=True)
class RadialPositivity:
    bound: float
    min_eig: float
    ok: bool
    increasing: bool
    diagonal: np.ndarray = field(compare=False, default=None)
    quad_meta: dict = field(compare=False, default=None)

    def __iter__(self):
        return iter((self.bound, self.min_eig, self.ok))


def radial_positivity_check(sym, truncation: TruncationSet, ctx: CalcContext) -> RadialPositivity:
    """Compare the spectrum of a radial/tensor-radial operator section with
    the product lower bound prod_blocks (1/h^d) int Phi e^{-t/h}.

    The matrix is diagonal (radial symbols kill every off-diagonal element);
    that is re-checked and an AssertionError raised if violated.  The lower
    bound is a theorem only for nondecreasing profiles; `increasing` reports
    whether that hypothesis holds, and `ok` reports the raw comparison.
    """
    if sym.family == "radial":
        parts = ((sym.phi, sym.d),)
    elif sym.family == "tensor_radial":
        parts = sym.parts
    else:
        raise ValueError("radial_positivity_check needs a radial or tensorradial symbol")
    bound = 1.0
    for phi, dj in parts:
        bound *= _block_bound(phi, dj, ctx.h)
    om = assemble_matrix(sym, truncation, ctx)
    off = om.entries - np.diag(np.diag(om.entries))
    max_off = float(np.max(np.abs(off))) if off.size else 0.0
    if max_off > 1e-10:
        raise AssertionError(
            f"radial symbol produced off-diagonal element {max_off:.3e} > 1e-10"
        )
    eigs = eig_hermitian(om)
    min_eig = float(eigs[0])
    increasing = all(phi.is_increasing() for phi, _ in parts)
    return RadialPositivity(
        bound=float(bound),
        min_eig=min_eig,
        ok=bool(min_eig >= bound - 1e-8),
        increasing=increasing,
        diagonal=np.real(np.diag(om.entries)).copy(),
        quad_meta=dict(om.meta),
    )


# ---------------------------------------------------------------------------
# Garding inequality.
# ---------------------------------------------------------------------------


_TAIL_REL = 3e-14


def _eps_resolver(spec):
    """Built-in epsilon sequences with closed square tails, or a callable."""
    if callable(spec):
        return spec, getattr(spec, "__name__", "custom"), None
    name = str(spec)
    if name in ("j^-2", "j**-2", "lemma"):
        return lemma_epsilon, "j^-2", lambda J: 1.0 / (3.0 * J**3)
    if name in ("2^-j", "geometric"):
        return (lambda j: 2.0**-j), "2^-j", lambda J: 4.0**-J / 3.0
    if name in ("zero", "0"):
        return (lambda j: 0.0), "zero", lambda J: 0.0
    raise ValueError(f"unknown epsilon spec {spec!r}")


@dataclass(frozen=True)
class GardingReport:
    """Everything behind the bound -M sum(lambda) prod(1+lambda) with
    lambda_j = 81 pi h S_eps eps_j^2."""

    eps_desc: str
    h: float
    s_eps: float
    lam: tuple
    sum_lambda: float
    prod_one_plus_lambda: float
    M: float
    bound: float
    measured_min_eig: float | None = None
    margin: float | None = None
    quad_meta: dict = field(compare=False, default=None)

    def as_dict(self) -> dict:
        out = {
            "epsilon": self.eps_desc,
            "h": self.h,
            "S_eps": self.s_eps,
            "terms": len(self.lam),
            "lambda_head": list(self.lam[:32]),
            "sum_lambda": self.sum_lambda,
            "prod_one_plus_lambda": self.prod_one_plus_lambda,
            "M": self.M,
            "bound": self.bound,
        }
        if self.measured_min_eig is not None:
            out["measured_min_eig"] = self.measured_min_eig
            out["margin"] = self.margin
        return out


def garding_bound(eps_spec, h: float, M: float) -> GardingReport:
    """Accumulate lambda_j = 81 pi h S_eps eps_j^2 until the remaining tail
    is below 3e-14 relative, then form bound = -M sum(lambda) prod(1+lambda).

    Built-in specs ("j^-2", "2^-j", "zero") carry closed tail estimates;
    callables stop once terms stay below 1e-16 of the running sum, and a
    sequence that never gets there is rejected as not square-summable.
    """
    if not h > 0:
        raise ValueError("h must be > 0")
    if M < 0:
        raise ValueError("M must be >= 0")
    eps_fn, desc, tail_sq = _eps_resolver(eps_spec)
    e2s: list[float] = []
    total = 0.0
    quiet = 0
    j = 0
    while True:
        j += 1
        e = float(eps_fn(j))
        e2 = e * e
        e2s.append(e2)
        total += e2
        if tail_sq is not None:
            if tail_sq(j) <= _TAIL_REL * max(total, 1e-300):
                break
        else:
            quiet = quiet + 1 if e2 <= 1e-16 * max(total, 1e-300) else 0
            if quiet >= 25:
                break
        if j >= 10**6:
            raise ValueError("epsilon sequence does not appear square-summable")
    s_eps = max(1.0, max(e2s, default=0.0))
    factor = 81.0 * math.pi * h * s_eps
    lam = tuple(factor * e2 for e2 in e2s)
    sum_lambda = math.fsum(lam)
    prod = 1.0
    for lv in lam:
        prod *= 1.0 + lv
    bound = -M * sum_lambda * prod + 0.0
    return GardingReport(
        eps_desc=desc,
        h=h,
        s_eps=s_eps,
        lam=lam,
        sum_lambda=sum_lambda,
        prod_one_plus_lambda=prod,
        M=M,
        bound=bound,
    )


def _assert_nonneg(sym, ctx: CalcContext) -> None:
    if sym.family == "constant":
        if sym.c < 0:
            raise ValueError("symbol is negative")
        return
    if sym.family == "gaussian":
        return
    if sym.family in ("radial", "tensor_radial"):
        parts = sym.parts if sym.family == "tensor_radial" else ((sym.phi, sym.d),)
        t = np.linspace(0.0, 80.0, 4001)
        for phi, _ in parts:
            if np.min(phi.value(t)) < -1e-12:
                raise ValueError("radial profile takes negative values")
        return
    # mixture/custom: seeded point-cloud check
    rng = np.random.Generator(np.random.Philox(key=[11, 11]))
    pts = rng.normal(0.0, math.sqrt(3.0 * ctx.h), size=(2000, 2 * sym.d))
    vals = np.asarray(eval_ddot(sym, pts[:, : sym.d], pts[:, sym.d :], ctx))
    scale = max(1.0, float(np.max(np.abs(vals))))
    if float(np.min(np.real(vals))) < -1e-10 * scale:
        raise ValueError("symbol takes negative values on the test cloud")


def garding_verify(sym, truncation: TruncationSet, ctx: CalcContext, m: int = 2) -> GardingReport:
    """Measure the least eigenvalue of the operator section and compare with
    the Garding bound computed from the symbol-class norm (depth m, built-in
    eps_j = j^{-2}).

    The class norm from cv_class_params can only overestimate, which loosens
    (never tightens) the bound, so a passing margin is meaningful.
    """
    _assert_nonneg(sym, ctx)
    params = cv_class_params(sym, m)
    rep = garding_bound("j^-2", ctx.h, params.M)
    om = assemble_matrix(sym, truncation, ctx)
    min_eig = float(eig_hermitian(om)[0])
    return replace(
        rep, measured_min_eig=min_eig, margin=min_eig - rep.bound, quad_meta=dict(om.meta)
    )


# ---------------------------------------------------------------------------
# Flandrin search.
# ---------------------------------------------------------------------------


def flandrin_domain_radius(N: int) -> float:
    """Radius beyond which every W_cl(phi_j, phi_k), j,k <= N, is negligible
    (past the Laguerre turning point with a wide margin)."""
    return math.sqrt((4.0 * N + 6.0 * math.sqrt(2.0 * N + 1.0) + 25.0) / (4.0 * math.pi)) + 1.0


def _axis_points(L: float, N: int) -> int:
    # ~4.8 points per oscillation: zero spacing of the table entries is
    # ~0.44/sqrt(N) in the radius, uniformly over the support.
    return max(48, int(math.ceil(4.8 * L * math.sqrt(N + 1.0))) + 32)


def _grid(rule_x, rule_y):
    x = np.repeat(rule_x.nodes, rule_y.nodes.size)
    y = np.tile(rule_y.nodes, rule_x.nodes.size)
    w = np.multiply.outer(rule_x.weights, rule_y.weights).ravel()
    return x, y, w


def flandrin_matrix(a: float, N: int, points: int | None = None, nodes: int = 16, bridge_ctx: CalcContext | None = None) -> np.ndarray:
    """M_jk(a) = int_{[0,a)^2} W_cl(phi_j, phi_k) dx deta, 0 <= j,k <= N.

    Gauss-Legendre panels on [0, min(a, R(N))]; the region beyond R(N)
    contributes below double precision.  With bridge_ctx the entries are
    rebuilt through the h-dependent Gaussian bridge instead of the h-free
    table (the h-cancellation self-check)."""
    L = flandrin_domain_radius(N) if math.isinf(a) else min(a, flandrin_domain_radius(N))
    pts = points or _axis_points(L, N)
    rule = gl_panel_rule(0.0, L, max(3, math.ceil(pts / nodes)), nodes)
    x, y, w = _grid(rule, rule)
    w = w.astype(complex)
    M = np.zeros((N + 1, N + 1), dtype=complex)
    if bridge_ctx is None:
        for j, k, vals in classical_wigner_diagonals(N, x, y):
            s = complex(np.dot(vals, w))
            M[j, k] = s
            M[k, j] = np.conjugate(s)
    else:
        for j in range(N + 1):
            for k in range(j, N + 1):
                s = complex(np.dot(classical_wigner_bridge(j, k, x, y, bridge_ctx), w))
                M[j, k] = s
                M[k, j] = np.conjugate(s)
    return M


@dataclass(frozen=True)
class FlandrinReport:
    a: float
    h: float
    N: int
    quad: str
    top_eigenvalue: float
    excess: float
    convergence: tuple
    panel_agreement: float
    h_invariance_dev: float
    bridge_vs_table: float
    domain_radius: float

    def as_dict(self) -> dict:
        return {
            "a": "inf" if math.isinf(self.a) else self.a,
            "h": self.h,
            "N": self.N,
            "quadrature": self.quad,
            "top_eigenvalue": self.top_eigenvalue,
            "excess": self.excess,
            "convergence": [[int(n), float(v)] for n, v in self.convergence],
            "panel_agreement": self.panel_agreement,
            "h_invariance_dev": self.h_invariance_dev,
            "bridge_vs_table": self.bridge_vs_table,
            "domain_radius": self.domain_radius,
        }


def flandrin_search(a: float, ctx: CalcContext, N: int, quad: dict | None = None) -> FlandrinReport:
    """Top eigenvalue of the box-localization matrix M(a) on the Hermite
    section of degree N, with panel-doubling quadrature control, an
    N-convergence table from nested sections, and the two-h bridge check.

    An eigenvalue above 1 exhibits a state whose classical Wigner mass on
    [0,a)^2 exceeds its norm; the report carries the measured excess and its
    convergence rather than asserting a margin.
    """
    if not a > 0:
        raise ValueError(f"a must be > 0 (or inf), got {a!r}")
    if not 0 <= N <= MAX_FLANDRIN_N:
        raise ValueError(f"N must lie in [0, {MAX_FLANDRIN_N}]")
    opts = dict(quad or {})
    nodes = int(opts.pop("nodes", 16))
    pts = opts.pop("points_per_axis", None)
    max_doublings = int(opts.pop("max_doublings", 2))
    if opts:
        raise ValueError(f"unknown quadrature options {sorted(opts)}")
    L = flandrin_domain_radius(N) if math.isinf(a) else min(a, flandrin_domain_radius(N))
    pts = int(pts) if pts else _axis_points(L, N)

    M = flandrin_matrix(a, N, pts, nodes)
    agreement = math.inf
    for _ in range(max_doublings):
        pts *= 2
        M2 = flandrin_matrix(a, N, pts, nodes)
        agreement = float(np.max(np.abs(M2 - M)))
        M = M2
        if agreement <= 1e-9:
            break
    else:
        raise QuadratureConvergenceError(
            f"panel doubling stalled at {agreement:.3e} > 1e-9 ({pts} pts/axis)"
        )

    sections = sorted({n for n in (2, 4, 8, 16, 32, 64, 128) if n <= N} | {N})
    convergence = tuple(
        (n, float(np.max(np.linalg.eigvalsh(M[: n + 1, : n + 1])))) for n in sections
    )
    top = convergence[-1][1]

    # h-cancellation: rebuild a small section through the Gaussian bridge at
    # two different h values and compare (with the table as a third route).
    nh = min(N, 8)
    mb1 = flandrin_matrix(a, nh, None, nodes, bridge_ctx=CalcContext(h=0.5))
    mb2 = flandrin_matrix(a, nh, None, nodes, bridge_ctx=CalcContext(h=2.0))
    mt = flandrin_matrix(a, nh, None, nodes)
    h_dev = float(np.max(np.abs(mb1 - mb2)))
    bridge_dev = float(max(np.max(np.abs(mb1 - mt)), np.max(np.abs(mb2 - mt))))

    quad_desc = f"GL panels on [0,{L:.6g}]^2, {pts} pts/axis, {nodes} nodes/panel"
    return FlandrinReport(
        a=a,
        h=ctx.h,
        N=N,
        quad=quad_desc,
        top_eigenvalue=top,
        excess=top - 1.0,
        convergence=convergence,
        panel_agreement=agreement,
        h_invariance_dev=h_dev,
        bridge_vs_table=bridge_dev,
        domain_radius=L,
    )


def _classical_rect_integral(j: int, k: int, lx: float, ly: float) -> complex:
    """int_{[0,lx) x [0,ly)} W_cl(phi_j, phi_k) dx deta with panel doubling."""
    deg = max(j, k)
    R = flandrin_domain_radius(deg)
    lx = min(lx, R)
    ly = min(ly, R)
    if lx <= 0.0 or ly <= 0.0:
        return 0.0j

    def shot(scale: int) -> complex:
        rx = gl_panel_rule(0.0, lx, max(3, math.ceil(_axis_points(lx, deg) * scale / 16)), 16)
        ry = gl_panel_rule(0.0, ly, max(3, math.ceil(_axis_points(ly, deg) * scale / 16)), 16)
        x, y, w = _grid(rx, ry)
        return complex(np.dot(classical_wigner_closed(j, k, x, y), w))

    prev = shot(1)
    for scale in (2, 4):
        cur = shot(scale)
        if abs(cur - prev) <= 1e-10:
            return cur
        prev = cur
    return prev


def flandrin_reduction_check(a: float, ctx: CalcContext, f: HermiteExpansion):
    """Check the change of variables tying the Gaussian box form to the
    classical rectangle integral:

        Q(box(a))(f, f) = sum c_j conj(c_k) int_{[0, s a) x [0, a/s)}
                            W_cl(phi_j, phi_k) du dv,   s = sqrt(2 pi h).

    Returns (lhs, rhs, residual); at a = inf both sides are the quarter-plane
    mass (1/4 for the ground state).
    """
    if any(idx.max_coordinate() > 1 for idx, _ in f.items()):
        raise ValueError("the reduction check needs a one-dimensional expansion")
    lhs = quadratic_form(box_symbol(a), f, f, ctx)
    lam = math.sqrt(2.0 * math.pi * ctx.h)
    cache: dict[tuple[int, int], complex] = {}
    rhs = 0.0j
    for aidx, ca in f.items():
        for bidx, cb in f.items():
            key = (aidx.degree(1), bidx.degree(1))
            if key not in cache:
                cache[key] = _classical_rect_integral(key[0], key[1], lam * a, a / lam)
            rhs += ca * np.conjugate(cb) * cache[key]
    lhs = lhs.real if abs(lhs.imag) < 1e-10 else lhs
    rhs = rhs.real if abs(rhs.imag) < 1e-10 else rhs
    return lhs, rhs, float(abs(lhs - rhs))


def write_convergence_csv(path, rows, header) -> None:
    """Plot-ready long-format CSV with repr-exact floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(header))
        for row in rows:
            w.writerow([v if isinstance(v, (int, str)) else repr(float(v)) for v in row])
