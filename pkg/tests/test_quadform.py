"""Operator matrix elements: closed diagonal law, structural zeros, dual
quadrature routes, rotation integration-by-parts, and deterministic export."""

import csv
import math

import numpy as np
import pytest

from gaussweyl.basis import CalcContext, MultiIndex, TruncationSet
from gaussweyl.quadform import (
    HermiteExpansion,
    Poly2,
    assemble_matrix,
    eig_hermitian,
    export_matrix_csv,
    ipp_check,
    matrix_element,
    matrix_metadata,
    poly_symbol,
    quadratic_form,
    rotation_reduction,
)
from gaussweyl.symbols import PhiSpec, box_symbol, const_symbol, gaussian_symbol, radial_symbol


def diag_law(j: int, nu: float, h: float) -> float:
    """I_jj(e^{-nu r^2}) = (1 - nu h)^j / (1 + nu h)^{j+1}."""
    return (1.0 - nu * h) ** j / (1.0 + nu * h) ** (j + 1)


# (j, nu, h, value) with value from the closed law, cross-checked against
# adaptive 2-D quadrature when frozen.
FROZEN_DIAG = [
    (0, 1.0, 1.0, 0.5),
    (1, 2.0, 1.0, -1.0 / 9.0),
    (2, 2.0, 1.0, 1.0 / 27.0),
    (3, 0.5, 2.0, 0.0),
    (4, 0.7, 0.5, 0.03980930394210513),
]


@pytest.mark.parametrize("j,nu,h,want", FROZEN_DIAG)
def test_gaussian_diagonal_frozen(j, nu, h, want):
    ctx = CalcContext(h=h)
    sym = gaussian_symbol(nu, 1.0)
    got = matrix_element(sym, MultiIndex({1: j}), MultiIndex({1: j}), ctx)
    assert abs(got - want) <= 1e-11
    assert abs(diag_law(j, nu, h) - want) <= 1e-15
    assert abs(got.imag) <= 1e-13


def test_gaussian_offdiagonal_vanishes():
    ctx = CalcContext(h=1.0)
    sym = gaussian_symbol(1.0, 1.0)
    for a, b in [((0,), (1,)), ((0,), (2,)), ((1,), (3,))]:
        got = matrix_element(sym, MultiIndex.from_tuple(a), MultiIndex.from_tuple(b), ctx)
        assert abs(got) <= 1e-12


def test_anorm_enters_through_norm_only():
    # direction norm |a| rescales nu: I(e^{-nu |a|^2 r^2}) at anorm=1
    ctx = CalcContext(h=1.0)
    got = matrix_element(gaussian_symbol(0.5, 2.0), MultiIndex({1: 1}), MultiIndex({1: 1}), ctx)
    assert abs(got - diag_law(1, 0.5 * 4.0, 1.0)) <= 1e-11


def test_coordinates_beyond_symbol_dimension():
    """Pairs the symbol does not see integrate to delta factors."""
    ctx = CalcContext(h=1.0)
    sym = gaussian_symbol(2.0, 1.0)  # d = 1
    a = MultiIndex({1: 1, 3: 2})
    same = matrix_element(sym, a, a, ctx)
    assert abs(same - diag_law(1, 2.0, 1.0)) <= 1e-11
    crossed = matrix_element(sym, MultiIndex({1: 1, 3: 2}), MultiIndex({1: 1, 3: 1}), ctx)
    assert crossed == 0.0j  # exact structural zero, no quadrature


def test_radial_matrix_is_diagonal_with_laplace_means():
    """For radial Phi(sum r_j^2) in d=2 the diagonal is a 2-fold product of
    per-pair means; checked against the separable exp closed form."""
    ctx = CalcContext(h=0.5)
    phi = PhiSpec(kind="exp", nu=1.5)
    sym = radial_symbol(phi, 2)
    trunc = TruncationSet(2, 1)
    om = assemble_matrix(sym, trunc, ctx)
    assert om.meta["pairwise_radial"]
    idxs = trunc.indices()
    for p, alpha in enumerate(idxs):
        for q, beta in enumerate(idxs):
            if p != q:
                assert om.entries[p, q] == 0.0j
            else:
                want = np.prod([diag_law(alpha.degree(i), 1.5, 0.5) for i in (1, 2)])
                assert abs(om.entries[p, p] - want) <= 1e-10


def test_assemble_matrix_matches_cli_example():
    ctx = CalcContext(h=1.0)
    om = assemble_matrix(gaussian_symbol(2.0, 1.0), TruncationSet(1, 2), ctx)
    want = np.diag([1.0 / 3.0, -1.0 / 9.0, 1.0 / 27.0])
    assert np.max(np.abs(om.entries - want)) <= 1e-11
    assert om.meta["structural_zeros"] == 3  # upper-triangle pairs only
    md = matrix_metadata(om)
    assert md["symbol"] == "gaussian:nu=2.0,anorm=1.0"
    assert md["basis_size"] == 3 and md["N"] == 2 and md["d"] == 1
    assert md["wigner_route"] == "closed"


def test_matrix_size_cap():
    with pytest.raises(ValueError):
        assemble_matrix(
            gaussian_symbol(1.0, 1.0), TruncationSet(1, 4096), CalcContext(h=1.0)
        )


def test_dual_wigner_routes_agree():
    """The closed Laguerre route and the defining-integral route must build
    the same matrix; the slow route is kept as an independent witness."""
    ctx = CalcContext(h=1.0)
    sym = gaussian_symbol(2.0, 1.0)
    trunc = TruncationSet(1, 2)
    fast = assemble_matrix(sym, trunc, ctx)
    slow = assemble_matrix(sym, trunc, ctx, wigner_route="quadrature")
    assert slow.meta["wigner_route"] == "quadrature"
    assert np.max(np.abs(fast.entries - slow.entries)) <= 1e-8


def test_box_element_matches_classical_square():
    """At h = 1/(2 pi) the box element I_00 is the unit-square mass of the
    classical ground-state Wigner function."""
    ctx = CalcContext(h=1.0 / (2.0 * math.pi))
    got = matrix_element(box_symbol(1.0), MultiIndex(), MultiIndex(), ctx)
    assert abs(got - 0.24980366326911302) <= 1e-9
    with pytest.raises(ValueError):
        matrix_element(box_symbol(1.0), MultiIndex(), MultiIndex(), ctx, wigner_route="quadrature")


def test_box_respects_h_side_coupling():
    # integrating W_00 over [0, 2 pi h a) x [0, a) directly
    ctx = CalcContext(h=0.5)
    a = 1.2
    got = matrix_element(box_symbol(a), MultiIndex(), MultiIndex(), ctx)
    from scipy import integrate

    want, _ = integrate.dblquad(
        lambda xi, x: math.exp(-(x * x + xi * xi) / ctx.h) / (math.pi * ctx.h),
        0.0,
        2.0 * math.pi * ctx.h * a,
        0.0,
        a,
        epsabs=1e-12,
    )
    assert abs(got - want) <= 1e-9


def test_hermite_expansion_bookkeeping():
    f = HermiteExpansion.from_pairs([((0,), 1.0), ((1,), 2.0), ((0,), 1.0)])
    assert f.norm_sq() == pytest.approx(8.0)  # (1+1)^2 + 2^2
    assert f.dims() == 1
    assert len(f.coeffs) == 2
    g = HermiteExpansion.single((), 1.0)
    assert g.dims() == 0 and g.norm_sq() == 1.0


def test_quadratic_form_diagonal_mix():
    ctx = CalcContext(h=1.0)
    sym = gaussian_symbol(2.0, 1.0)
    r = 1.0 / math.sqrt(2.0)
    f = HermiteExpansion.from_pairs([((0,), r), ((1,), r)])
    got = quadratic_form(sym, f, f, ctx)
    want = 0.5 * (diag_law(0, 2.0, 1.0) + diag_law(1, 2.0, 1.0))
    assert abs(got - want) <= 1e-11
    # <Op(1) f, f> = |f|^2
    got1 = quadratic_form(const_symbol(1.0), f, f, ctx)
    assert abs(got1 - 1.0) <= 1e-10


def test_eig_hermitian():
    evs = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(evs, [-1.0, 1.0])
    with pytest.raises(ValueError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eig_hermitian(np.zeros((2, 3)))
    om = assemble_matrix(
        gaussian_symbol(2.0, 1.0), TruncationSet(1, 2), CalcContext(h=1.0)
    )
    evs = eig_hermitian(om)
    assert np.allclose(evs, sorted([1.0 / 3.0, -1.0 / 9.0, 1.0 / 27.0]), atol=1e-11)


def test_poly2_rotation_algebra():
    x = Poly2.from_dict({(1, 0): 1.0})
    assert x.rot().terms == Poly2.from_dict({(0, 1): -1.0}).terms
    x2 = Poly2.from_dict({(2, 0): 1.0})
    assert x2.rot_power(2).terms == Poly2.from_dict({(2, 0): -2.0, (0, 2): 2.0}).terms
    r2 = Poly2.from_dict({(2, 0): 1.0, (0, 2): 1.0})
    assert r2.rot().terms == ()  # radial polynomials rotate to zero
    assert x2.degree() == 2 and Poly2.from_dict({}).degree() == 0


def test_ipp_frozen_values():
    ctx = CalcContext(h=1.0)
    res = ipp_check(Poly2.from_dict({(1, 0): 1.0}), 1, 1, 1, None, ctx)
    assert res.method == "analytic"
    assert abs(res.lhs - (-1j * math.pi / 2.0)) <= 1e-10
    assert res.residual <= 1e-10
    res2 = ipp_check(Poly2.from_dict({(2, 0): 1.0}), 2, 2, 1, None, ctx)
    assert abs(res2.lhs - (-2.0 * math.pi)) <= 1e-9
    assert res2.residual <= 1e-9
    lhs, rhs, residual = res2  # tuple protocol
    assert (lhs, rhs, residual) == (res2.lhs, res2.rhs, res2.residual)


def test_ipp_with_weight_polynomial_and_eps():
    ctx = CalcContext(h=0.5)
    F = Poly2.from_dict({(2, 1): 1.0})  # x^2 xi
    for eps in (1, -1):
        res = ipp_check(F, 2, 2, eps, (0.0, 1.0), ctx)  # P(t) = t
        assert res.residual <= 1e-9
    res = ipp_check(F, 1, 3, 1, (1.0, 0.5), ctx)
    assert res.residual <= 1e-9


def test_ipp_callable_route_and_guards():
    ctx = CalcContext(h=1.0)
    res = ipp_check(lambda x, xi: x, 1, 1, 1, None, ctx)
    assert res.method == "finite-difference"
    assert not res.fd_warning
    assert abs(res.lhs - (-1j * math.pi / 2.0)) <= 1e-8
    assert res.residual <= 1e-8
    for bad in [dict(n=0, s=1, eps=1), dict(n=1, s=-1, eps=1), dict(n=1, s=1, eps=2)]:
        with pytest.raises(ValueError):
            ipp_check(Poly2.from_dict({(1, 0): 1.0}), bad["n"], bad["s"], bad["eps"], None, ctx)


def test_rotation_reduction_matches_direct():
    ctx = CalcContext(h=1.0)
    sym = poly_symbol(Poly2.from_dict({(1, 0): 1.0}))
    a, b = MultiIndex(), MultiIndex({1: 1})
    direct = matrix_element(sym, a, b, ctx)
    assert abs(direct - math.sqrt(0.5)) <= 1e-9
    reduced = rotation_reduction(sym, a, b, 1, 1, ctx)
    assert abs(direct - reduced) <= 1e-8
    # n = 2 transported derivative on a degree-2 symbol, (j,k) = (0,2)
    sym2 = poly_symbol(Poly2.from_dict({(2, 0): 1.0}))
    b2 = MultiIndex({1: 2})
    direct2 = matrix_element(sym2, MultiIndex(), b2, ctx)
    reduced2 = rotation_reduction(sym2, MultiIndex(), b2, 1, 2, ctx)
    assert abs(direct2 - reduced2) <= 1e-8


def test_rotation_reduction_structural_cases():
    ctx = CalcContext(h=1.0)
    sym = gaussian_symbol(1.0, 1.0)
    assert rotation_reduction(sym, MultiIndex(), MultiIndex({1: 1}), 1, 1, ctx) == 0.0j
    psym = poly_symbol(Poly2.from_dict({(1, 0): 1.0}))
    assert rotation_reduction(psym, MultiIndex({2: 0}), MultiIndex({2: 1}), 2, 1, ctx) == 0.0j
    with pytest.raises(ValueError):
        rotation_reduction(psym, MultiIndex({1: 1}), MultiIndex({1: 1}), 1, 1, ctx)
    with pytest.raises(ValueError):
        rotation_reduction(box_symbol(1.0), MultiIndex(), MultiIndex({1: 1}), 1, 1, ctx)


def test_export_matrix_csv(tmp_path):
    om = assemble_matrix(
        gaussian_symbol(2.0, 1.0), TruncationSet(1, 1), CalcContext(h=1.0)
    )
    path = tmp_path / "matrix.csv"
    export_matrix_csv(om, path)
    raw = path.read_bytes()
    assert b"\r\n" in raw  # RFC-4180 line endings
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["row_index", "col_index", "re", "im"]
    assert len(rows) == 1 + 4
    assert float(rows[1][2]) == pytest.approx(1.0 / 3.0, abs=1e-11)
    assert float(rows[2][2]) == 0.0  # structural zero, exactly
