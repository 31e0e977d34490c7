"""Gaussian Wigner functions for Hermite pairs and Bargman kernels, plus the
classical (Lebesgue-normalized) Wigner transform they reduce to.

Closed form for the Gaussian-normalized transform, with r^2 = x^2 + xi^2 and
m = |j - k|, lo = min(j, k):

    W(psi_j, psi_k)(x, xi)
        = sqrt(lo!/hi!) (-1)^lo (2/h)^{m/2} w^m L_lo^{(m)}((2/h) r^2),

where w = x + i xi when k >= j and its conjugate otherwise.  The classical
transform is W_cl(u, v)(x, eta) = int e^{-2 i pi z eta} u(x + z/2)
conj(v(x - z/2)) dz; the two are linked by

    e^{-(x^2+xi^2)/h} W_{h,R}(u, v)(x, xi)
        = 1/2 W_cl(gamma u, gamma v)(x, xi / (2 pi h)).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, roots_legendre

from .basis import CalcContext, MultiIndex, hermite_eval, laguerre_eval
from .gaussian import gh_rule, integrate_tensor, ladder

# e^{-z/2} is below double precision past this; points there are masked to 0
# before any power/Laguerre evaluation so no overflow can occur.
Z_CUT = 1380.0


def wigner_closed(j: int, k: int, x, xi, ctx: CalcContext):
    """Closed-form W_{h,R}(psi_j, psi_k)(x, xi); vectorized over x, xi."""
    if j < 0 or k < 0:
        raise ValueError("degrees must be nonnegative")
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    lo, hi = min(j, k), max(j, k)
    m = hi - lo
    r2 = x * x + xi * xi
    lag = laguerre_eval(lo, m, 2.0 / ctx.h * r2)
    pref = (
        math.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)))
        * (-1.0) ** lo
        * (2.0 / ctx.h) ** (m / 2.0)
    )
    w = x + 1j * xi if k >= j else x - 1j * xi
    val = pref * lag * w**m
    return val if np.shape(val) else complex(val)


def wigner_quadrature(fhat, ghat, z: float, zeta: float, ctx: CalcContext, rule=None):
    """W_{h,R}(fhat, ghat)(z, zeta) by quadrature of the defining integral

        e^{zeta^2/h} int e^{-2 i zeta t / h} fhat(z+t) conj(ghat(z-t)) dmu_{R,h/2}(t).

    With rule=None the order is raised on the standard ladder until two
    successive orders agree.
    """
    h = ctx.h

    def value_at(n: int) -> complex:
        r = gh_rule(n, h / 2.0)
        t = r.nodes
        vals = (
            np.exp(-2j * zeta * t / h)
            * np.asarray(fhat(z + t))
            * np.conjugate(np.asarray(ghat(z - t)))
        )
        return complex(np.sum(vals * r.weights)) * math.exp(zeta * zeta / h)

    if rule is not None:
        t = rule.nodes
        vals = (
            np.exp(-2j * zeta * t / h)
            * np.asarray(fhat(z + t))
            * np.conjugate(np.asarray(ghat(z - t)))
        )
        return complex(np.sum(vals * rule.weights)) * math.exp(zeta * zeta / h)
    val, _ = ladder(value_at)
    return val


def wigner_hermite_quadrature(j: int, k: int, z: float, zeta: float, ctx: CalcContext):
    """wigner_quadrature specialized to a Hermite pair (psi_j, psi_k)."""
    return wigner_quadrature(
        lambda t: hermite_eval(j, t, ctx), lambda t: hermite_eval(k, t, ctx), z, zeta, ctx
    )


def wigner_tensor(alpha: MultiIndex, beta: MultiIndex, X, ctx: CalcContext) -> complex:
    """Product over coordinates of 1-D closed forms, at X = (x_1..x_d, xi_1..xi_d)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 1 or X.size % 2 != 0:
        raise ValueError("X must be a flat vector (x_1..x_d, xi_1..xi_d)")
    d = X.size // 2
    if alpha.max_coordinate() > d or beta.max_coordinate() > d:
        raise ValueError(f"multi-index support exceeds dimension {d}")
    val = 1.0 + 0.0j
    for i in sorted(set(alpha.support()) | set(beta.support())):
        val *= wigner_closed(alpha.degree(i), beta.degree(i), X[i - 1], X[d + i - 1], ctx)
    return val


def wigner_bargman(u: complex, v: complex, x: float, xi: float, ctx: CalcContext) -> complex:
    """Wigner function of a Bargman-kernel pair:
    exp(-u v + sqrt(2/h) x (u + v) + i sqrt(2/h) xi (v - u))."""
    c = math.sqrt(2.0 / ctx.h)
    return complex(np.exp(-u * v + c * x * (u + v) + 1j * c * xi * (v - u)))


def overlap(j: int, k: int, ctx: CalcContext, rule=None) -> float:
    """int W(psi_j, psi_k) dmu_{R^2,h/2}; equals delta_{jk}."""

    def value_at(n: int) -> complex:
        r = gh_rule(n, ctx.h / 2.0)
        return integrate_tensor(
            lambda pts: wigner_closed(j, k, pts[:, 0], pts[:, 1], ctx), r, 2
        )

    if rule is not None:
        val = integrate_tensor(
            lambda pts: wigner_closed(j, k, pts[:, 0], pts[:, 1], ctx), rule, 2
        )
    else:
        val, _ = ladder(value_at, start=max(48, j + k + 16))
    return val.real if abs(val.imag) < 1e-12 else val


# ---------------------------------------------------------------------------
# Classical side: 2pi-adapted Hermite functions and the classical transform.
# ---------------------------------------------------------------------------


def classical_hermite(j: int, x):
    """phi_j(x) = 2^{1/4} e^{-pi x^2} He_j(2 sqrt(pi) x)/sqrt(j!): the Hermite
    basis adapted to the e^{-2 i pi z eta} transform (gamma psi_j at h = 1/(2 pi))."""
    h0 = 1.0 / (2.0 * math.pi)
    x = np.asarray(x, dtype=float)
    return (
        (math.pi * h0) ** (-0.25)
        * np.exp(-math.pi * x * x)
        * hermite_eval(j, x, CalcContext(h=h0))
    )


def classical_wigner_closed(j: int, k: int, x, eta):
    """W_cl(phi_j, phi_k)(x, eta) in closed form: the h-free classical table.

    Equal to 2 e^{-2 pi r^2} sqrt(lo!/hi!) (-1)^lo (4 pi)^{m/2} w^m
    L_lo^{(m)}(4 pi r^2); independent of any semiclassical parameter.
    """
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    lo, hi = min(j, k), max(j, k)
    m = hi - lo
    r2 = x * x + eta * eta
    lag = laguerre_eval(lo, m, 4.0 * math.pi * r2)
    pref = (
        2.0
        * math.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)))
        * (-1.0) ** lo
        * (4.0 * math.pi) ** (m / 2.0)
    )
    w = x + 1j * eta if k >= j else x - 1j * eta
    val = pref * np.exp(-2.0 * math.pi * r2) * lag * w**m
    return val if np.shape(val) else complex(val)


def classical_wigner_bridge(j: int, k: int, x, eta, ctx: CalcContext):
    """Same table evaluated through the Gaussian closed form at the supplied h:

        W_cl(phi_j, phi_k)(x, eta)
            = 2 e^{-2 pi (x^2+eta^2)} W_{h,R}(psi_j, psi_k)(c x, c eta),

    with c = sqrt(2 pi h).  The h-dependence cancels identically; evaluating at
    two different h values is the standard self-check.
    """
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    c = math.sqrt(2.0 * math.pi * ctx.h)
    val = 2.0 * np.exp(-2.0 * math.pi * (x * x + eta * eta)) * wigner_closed(
        j, k, c * x, c * eta, ctx
    )
    return val if np.shape(val) else complex(val)


def classical_wigner_gamma_pair(j: int, k: int, x, eta, ctx: CalcContext):
    """W_cl(gamma psi_j, gamma psi_k)(x, eta) at the context h.

    gamma psi_j is the sqrt(2 pi h)-dilation of phi_j, so this is the fixed
    classical table evaluated at symplectically rescaled arguments."""
    lam = math.sqrt(2.0 * math.pi * ctx.h)
    return classical_wigner_closed(j, k, np.asarray(x, dtype=float) / lam, lam * np.asarray(eta, dtype=float))


def classical_wigner_direct(u, v, x: float, eta: float, half_width: float = 30.0, n: int = 400) -> complex:
    """W_cl(u, v)(x, eta) by direct Gauss-Legendre quadrature in z (reference/
    cross-check path; u, v vectorized callables on R)."""
    t, w = roots_legendre(n)
    z = half_width * t
    wz = half_width * w
    vals = (
        np.exp(-2j * math.pi * z * eta)
        * np.asarray(u(x + z / 2.0))
        * np.conjugate(np.asarray(v(x - z / 2.0)))
    )
    return complex(np.sum(vals * wz))


def classical_wigner_diagonals(N: int, x, eta):
    """Stream the whole classical Wigner table W_cl(phi_j, phi_k), 0<=j<=k<=N,
    evaluated on a flat point set.

    Yields (j, k, values).  Runs one scaled-Laguerre recurrence per diagonal
    m = k - j directly on G_j = e^{-z/2} L_j^{(m)}(z), z = 4 pi r^2, so nothing
    overflows; points with z > Z_CUT contribute exactly 0 in double precision
    and are masked.
    """
    x = np.asarray(x, dtype=float).ravel()
    eta = np.asarray(eta, dtype=float).ravel()
    z = 4.0 * math.pi * (x * x + eta * eta)
    mask = z <= Z_CUT
    e_half = np.where(mask, np.exp(-np.minimum(z, Z_CUT) / 2.0), 0.0)
    zeta = np.where(mask, 2.0 * math.sqrt(math.pi) * (x + 1j * eta), 0.0)
    zm = z.copy()
    for m in range(N + 1):
        pw = zeta**m
        g_prev = np.zeros_like(e_half)
        g = e_half.copy()  # j = 0: L_0^{(m)} = 1
        for jj in range(0, N - m + 1):
            if jj > 0:
                g_prev, g = g, (
                    (2.0 * (jj - 1) + m + 1.0 - zm) * g - (jj - 1 + m) * g_prev
                ) / jj
            scale = math.exp(0.5 * (gammaln(jj + 1) - gammaln(jj + m + 1)))
            yield jj, jj + m, (2.0 * scale * (-1.0) ** jj) * g * pw
