"""Tests for algebra tables, bracket extension, axiom checks, conformal maps."""

from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lambrack.conformal import (
    Basis,
    CMap,
    ConformalAlgebra,
    ModElem,
    Report,
    ReportItem,
    ScalarCMap,
    apply_cmap,
    check_anti_derivation,
    check_derivation,
    check_leibniz,
    check_lie,
    check_skew,
    extend_bracket,
    format_modelem,
    inner_anti_derivation,
    inner_derivation,
    jacobiator,
    parse_modelem,
)
from lambrack.poly import D, LAM, MU, ParseError, Poly, parse_poly

import sympy_oracle as oracle


def algebra(names, entries, params=()):
    basis = Basis(names, params)
    table = {
        pair: parse_modelem(text, basis) for pair, text in entries.items()
    }
    return ConformalAlgebra(basis, table)


def virasoro():
    return algebra(["x"], {("x", "x"): "(d+2*l)*x"})


def ex1_lw():
    return algebra(
        ["L", "W"],
        {("L", "L"): "(d+2*l)*L", ("L", "W"): "(d+2*l)*W"},
    )


def rank1(coeff_text):
    return algebra(["x"], {("x", "x"): f"({coeff_text})*x"})


def unit(name):
    return ModElem.unit(name)


# -- basis and table validation ---------------------------------------------

def test_basis_rejects_reserved_and_duplicate_names():
    with pytest.raises(ValueError):
        Basis(["l"])
    with pytest.raises(ValueError):
        Basis(["x", "x"])
    with pytest.raises(ValueError):
        Basis(["x"], params=["x"])


def test_table_rejects_unknown_pair_and_bad_variables():
    basis = Basis(["x"])
    with pytest.raises(ValueError):
        ConformalAlgebra(basis, {("x", "y"): unit("x")})
    with pytest.raises(ValueError):
        ConformalAlgebra(basis, {("x", "x"): ModElem({"x": Poly.var("m")})})
    with pytest.raises(ValueError):
        ConformalAlgebra(basis, {("x", "x"): ModElem({"y": Poly.const(1)})})


def test_empty_basis_is_the_zero_algebra():
    A = ConformalAlgebra(Basis([]), {})
    assert check_lie(A).passed


# -- extend_bracket ----------------------------------------------------------

def test_virasoro_bracket_on_generators():
    A = virasoro()
    got = extend_bracket(A, unit("x"), unit("x"), "l")
    assert got == parse_modelem("(d+2*l)*x", A.basis)


def test_bracket_left_sesquilinearity_on_translation_multiple():
    A = virasoro()
    da = ModElem({"x": Poly.var("d")})
    got = extend_bracket(A, da, unit("x"), "l")
    assert got == parse_modelem("-l*(d+2*l)*x", A.basis)


def test_ex1_annihilator_side():
    A = ex1_lw()
    assert extend_bracket(A, unit("W"), unit("L"), "l").is_zero()
    assert extend_bracket(A, unit("W"), unit("W"), "l").is_zero()


def test_extend_bracket_rejects_bad_inputs():
    A = virasoro()
    with pytest.raises(ValueError):
        extend_bracket(A, unit("y"), unit("x"), "l")
    with pytest.raises(ValueError):
        extend_bracket(A, unit("x"), unit("x"), "d")
    with pytest.raises(ValueError):
        extend_bracket(A, unit("x"), unit("x"), "z")


d_polys = st.builds(
    lambda coeffs: sum(
        (Poly.const(c) * Poly.var("d") ** k for k, c in enumerate(coeffs)),
        Poly.zero(),
    ),
    st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), max_size=4),
)


@settings(deadline=None)
@given(d_polys, d_polys)
def test_sesquilinearity_on_translation_polynomials(f, g):
    """extend_bracket(f(d)a, g(d)b) = f(-l) g(l+d) extend_bracket(a, b)."""
    for A in (virasoro(), ex1_lw()):
        for i in A.basis.names:
            for j in A.basis.names:
                lhs = extend_bracket(
                    A, ModElem({i: f}), ModElem({j: g}), "l"
                )
                scale = f.substitute({"d": -LAM}) * g.substitute({"d": LAM + D})
                rhs = extend_bracket(A, unit(i), unit(j), "l").scale(scale)
                assert lhs == rhs


@settings(deadline=None)
@given(d_polys, d_polys)
def test_extend_bracket_matches_sympy_route(f, g):
    """Whole-element brackets agree with the independent sympy expansion."""
    A = ex1_lw()
    a = ModElem({"L": f})
    b = ModElem({"W": g})
    got = extend_bracket(A, a, b, "l")
    d = sympy.Symbol("d")
    expected = oracle.bracket(
        oracle.EX1_LW,
        {"L": oracle.to_sympy(f)},
        {"W": oracle.to_sympy(g)},
        sympy.Symbol("l"),
    )
    assert oracle.same_elem(got, expected)


# -- jacobiator and axiom checks --------------------------------------------

def test_virasoro_jacobiator_vanishes():
    A = virasoro()
    assert jacobiator(A, unit("x"), unit("x"), unit("x")).is_zero()


def test_abelian_jacobiator_vanishes():
    A = algebra(["x", "y"], {})
    for i in ("x", "y"):
        for j in ("x", "y"):
            for k in ("x", "y"):
                assert jacobiator(A, unit(i), unit(j), unit(k)).is_zero()


def test_deformed_virasoro_jacobiator_residual():
    A = rank1("d+3*l")
    got = jacobiator(A, unit("x"), unit("x"), unit("x"))
    expected = (
        parse_poly("(l+d+3*m)*(d+3*l)")
        - parse_poly("(2*l-m)*(d+3*l+3*m)")
        - parse_poly("(m+d+3*l)*(d+3*m)")
    )
    assert got == ModElem({"x": expected})
    assert not got.is_zero()
    assert oracle.same_elem(got, oracle.jacobiator({("x", "x"): {"x": oracle.D + 3 * oracle.L}}, "x", "x", "x"))


def test_virasoro_is_lie():
    report = check_lie(virasoro())
    assert report.passed
    assert report.verdict == "pass"


def test_ex1_is_leibniz_but_not_skew():
    A = ex1_lw()
    assert check_leibniz(A).passed
    skew = check_skew(A)
    assert not skew.passed
    failure = skew.item("skew", ("W", "L"))
    assert not failure.passed
    assert failure.residual == parse_modelem("-(d+2*l)*W", A.basis)
    assert failure.residual_text() == "-(d + 2*l)*W"


def test_deformed_virasoro_fails_leibniz():
    assert not check_leibniz(rank1("d+3*l")).passed


def test_lie_pass_implies_leibniz_pass():
    for A in (virasoro(), algebra(["x", "y"], {})):
        if check_lie(A).passed:
            assert check_leibniz(A).passed


@st.composite
def rank2_tables(draw):
    names = ("x", "y")
    table = {}
    for i in names:
        for j in names:
            entry = {}
            for k in names:
                if draw(st.booleans()):
                    coeffs = draw(
                        st.lists(
                            st.integers(min_value=-3, max_value=3),
                            min_size=1,
                            max_size=3,
                        )
                    )
                    p = Poly.zero()
                    for t, c in enumerate(coeffs):
                        p = p + Poly.const(c) * Poly.var("l") ** t
                    if draw(st.booleans()):
                        p = p + Poly.var("d") * Poly.const(draw(st.integers(-2, 2)))
                    entry[k] = p
            if entry:
                table[(i, j)] = ModElem(entry)
    return table


@settings(deadline=None, max_examples=40)
@given(rank2_tables())
def test_jacobiator_matches_sympy_route_on_random_tables(table):
    """The Jacobi residual agrees with the independent sympy route."""
    basis = Basis(["x", "y"])
    A = ConformalAlgebra(basis, table)
    sym_table = {
        pair: {k: oracle.to_sympy(p) for k, p in elem.components.items()}
        for pair, elem in table.items()
    }
    for i in basis.names:
        for j in basis.names:
            for k in basis.names:
                got = jacobiator(A, unit(i), unit(j), unit(k))
                assert oracle.same_elem(got, oracle.jacobiator(sym_table, i, j, k))


def test_jacobiator_trilinearity():
    """Translation multiples scale the residual by the forced factors."""
    for A in (virasoro(), rank1("d+3*l")):
        a = b = c = unit("x")
        base = jacobiator(A, a, b, c)
        da = ModElem({"x": Poly.var("d")})
        assert jacobiator(A, da, b, c) == base.scale(-Poly.var("l"))
        assert jacobiator(A, a, b, da) == base.scale(
            Poly.var("l") + Poly.var("m") + Poly.var("d")
        )


# -- conformal maps ----------------------------------------------------------

def test_inner_derivation_reads_the_table():
    A = virasoro()
    ad = inner_derivation(A, unit("x"))
    assert ad.chirality == "right"
    assert ad.image("x") == parse_modelem("(d+2*l)*x", A.basis)


def test_inner_derivation_on_ex1_annihilator():
    A = ex1_lw()
    assert inner_derivation(A, unit("W")).table == {}


def test_left_map_chirality_rule():
    basis = Basis(["L", "W"], params=["a"])
    g1 = parse_poly("l^2 + a*d", params=("a",))
    Dmap = CMap("left", basis, basis, {"L": ModElem({"W": g1})})
    dL = ModElem({"L": Poly.var("d")})
    got = apply_cmap(Dmap, dL, "l")
    assert got == ModElem({"W": -Poly.var("l") * g1})


def test_scalar_map_composite_slot():
    basis = Basis(["L"])
    h = ScalarCMap("left", basis, {"L": parse_poly("d + l")})
    got = apply_cmap(h, unit("L"), -LAM - D)
    assert got == parse_poly("-l")


def test_right_map_chirality_rule():
    A = virasoro()
    ad = inner_derivation(A, unit("x"))
    dx = ModElem({"x": Poly.var("d")})
    got = apply_cmap(ad, dx, "l")
    expected = extend_bracket(A, unit("x"), unit("x"), "l").scale(
        (LAM + D).to_poly()
    )
    assert got == expected


def test_apply_cmap_rejects_unknown_names():
    A = virasoro()
    ad = inner_derivation(A, unit("x"))
    with pytest.raises(ValueError):
        apply_cmap(ad, unit("y"), "l")


def test_cmap_validation():
    basis = Basis(["x"])
    with pytest.raises(ValueError):
        CMap("sideways", basis, basis, {})
    with pytest.raises(ValueError):
        CMap("left", basis, basis, {"y": unit("x")})
    with pytest.raises(ValueError):
        CMap("left", basis, basis, {"x": unit("z")})


def test_inner_maps_require_translation_only_elements():
    A = virasoro()
    with pytest.raises(ValueError):
        inner_derivation(A, ModElem({"x": Poly.var("l")}))


def test_zero_map_is_derivation_and_anti_derivation():
    A = ex1_lw()
    zero = CMap("right", A.basis, A.basis, {})
    assert check_derivation(A, zero).passed
    zero_left = CMap("left", A.basis, A.basis, {})
    assert check_anti_derivation(A, zero_left).passed


def test_inner_derivations_pass_on_valid_algebras():
    """ad_a is a derivation and Ad_a an anti-derivation, for any element a."""
    picks = {
        "virasoro": (virasoro(), ["x"]),
        "ex1": (ex1_lw(), ["L", "W"]),
    }
    for A, names in picks.values():
        elems = [unit(n) for n in names]
        elems.append(
            ModElem({names[0]: Poly.var("d") ** 2 + Poly.const(3)})
        )
        for a in elems:
            assert check_derivation(A, inner_derivation(A, a)).passed
            assert check_anti_derivation(A, inner_anti_derivation(A, a)).passed


def test_non_derivation_fails():
    A = virasoro()
    bad = CMap("right", A.basis, A.basis, {"x": ModElem({"x": Poly.var("l") ** 2})})
    assert not check_derivation(A, bad).passed


# -- reports -----------------------------------------------------------------

def test_report_items_are_sorted_naturally():
    items = [
        ReportItem("L10", ("a",), Poly.zero()),
        ReportItem("L2", ("a",), Poly.zero()),
        ReportItem("L2", ("a", "b"), Poly.const(1)),
        ReportItem("L1", ("b",), Poly.zero()),
    ]
    report = Report(items)
    assert [it.condition for it in report.items] == ["L1", "L2", "L2", "L10"]
    assert report.first_failure().args == ("a", "b")
    assert report.failures() == [report.items[2]]
    assert report.verdict == "fail"


def test_report_combine():
    a = Report([ReportItem("jacobi", ("x",), Poly.zero())])
    b = Report([ReportItem("skew", ("x",), Poly.zero())])
    assert Report.combine(a, b).passed


# -- module element parsing and formatting -----------------------------------

def test_parse_modelem_examples():
    basis = Basis(["L", "W"])
    e = parse_modelem("(d+2*l)*L + 3*W", basis)
    assert e.component("L") == parse_poly("d + 2*l")
    assert e.component("W") == Poly.const(3)
    assert parse_modelem("0", basis).is_zero()
    assert parse_modelem("-(d+2*l)*W", basis) == ModElem({"W": -parse_poly("d+2*l")})
    assert parse_modelem("L*(d - 1)", basis) == ModElem({"L": parse_poly("d - 1")})


def test_parse_modelem_rejects_bad_terms():
    basis = Basis(["L", "W"])
    for text in ("L*W", "L^2", "2 + W", "(d+2*l)*L + 1", "unknown"):
        with pytest.raises(ParseError):
            parse_modelem(text, basis)


def test_format_modelem_examples():
    basis = Basis(["L", "W"])
    cases = {
        "0": ModElem.zero(),
        "W": unit("W"),
        "-W": -unit("W"),
        "3*W": unit("W").scale(3),
        "(d + 2*l)*L + 3*W": parse_modelem("(d+2*l)*L + 3*W", basis),
        "-(d + 2*l)*W": parse_modelem("-(d+2*l)*W", basis),
        "L - W": parse_modelem("L - W", basis),
    }
    for expected, elem in cases.items():
        assert format_modelem(elem, basis.names) == expected


@st.composite
def modelems(draw):
    components = {}
    for name in ("L", "W"):
        coeffs = draw(
            st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=3), max_size=3)
        )
        p = Poly.zero()
        for k, c in enumerate(coeffs):
            p = p + Poly.const(c) * Poly.var("d") ** k
        if draw(st.booleans()):
            p = p * Poly.var("l")
        if not p.is_zero():
            components[name] = p
    return ModElem(components)


@settings(max_examples=200)
@given(modelems())
def test_format_parse_modelem_round_trip(e):
    """Parsing canonical output reproduces the element exactly."""
    basis = Basis(["L", "W"])
    assert parse_modelem(format_modelem(e, basis.names), basis) == e
