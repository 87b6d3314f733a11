from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qforms.errors import DegreeMismatch, InfiniteBasis, MismatchedAlgebra
from qforms.gca import Element, GeneratorTable, basis, degree_components, substitute

from strategies import MIXED, elements, homogeneous

T = GeneratorTable([("x", 0), ("y", 0), ("t1", 1), ("t2", 1), ("w", 2)])
x, y, t1, t2, w = T.gens()


def test_table_parities_follow_degrees():
    assert T.parities == (0, 0, 1, 1, 0)
    assert MIXED.parities == (0, 1, 1, 0, 1)


def test_table_rejects_duplicate_names():
    with pytest.raises(ValueError):
        GeneratorTable([("x", 0), ("x", 1)])


def test_addition_examples():
    assert x + T.zero() == x
    assert (t1 + (-t1)).is_zero()
    assert (x + t1) + x == 2 * x + t1


def test_sign_rule():
    assert t1 * t2 == Element(T, {((2, 1), (3, 1)): 1})
    assert t2 * t1 == -(t1 * t2)
    assert (t1 * t1).is_zero()
    assert w * t1 == t1 * w


def test_canonical_form_drops_zero_coefficients():
    a = Element(T, {((0, 1),): 0, ((1, 1),): Fraction(1, 2)})
    assert a.terms == {((1, 1),): Fraction(1, 2)}


def test_mismatched_tables():
    other = GeneratorTable([("x", 0)])
    with pytest.raises(MismatchedAlgebra):
        x + other.gen("x")
    with pytest.raises(MismatchedAlgebra):
        x * other.gen("x")


def test_degree_components():
    comps = degree_components(x + t1 + t1 * t2)
    assert comps == {0: x, 1: t1, 2: t1 * t2}
    assert degree_components(T.zero()) == {}
    assert degree_components(3 * w) == {2: 3 * w}


def test_inhomogeneous_degree_raises():
    with pytest.raises(DegreeMismatch):
        (x + t1).degree()
    assert T.zero().degree() is None


def test_string_form():
    assert str(2 * x * y + x**2 - t1 * t2) == "2*x*y + x^2 - t1*t2"


def test_weil_basis_in_degree_three():
    W = GeneratorTable([("th", 1), ("th'", 2)])
    assert basis(W, 3) == [((0, 1), (1, 1))]
    assert basis(W, 0) == [()]


def test_weighted_basis():
    M = GeneratorTable([("x", 0), ("x'", 1)])
    assert basis(M, 1, ({"x": 1, "x'": 1}, 2)) == [((0, 1), (1, 1))]


def test_basis_refuses_nonpositive_degrees_without_weights():
    with pytest.raises(InfiniteBasis):
        basis(T, 1)
    with pytest.raises(InfiniteBasis):
        basis(T, 1, ({"x": 1}, 1))


def test_substitute_examples():
    assert substitute(x**2, {"x": x + y}) == x**2 + 2 * x * y + y**2
    assert substitute(t1 * t2, {"t1": t2, "t2": t1}) == -(t1 * t2)
    assert substitute(x**2, {"x": T.zero()}).is_zero()


def test_substitute_checks_degrees():
    with pytest.raises(DegreeMismatch):
        substitute(x, {"x": t1})


def _series_counts(degrees, top):
    """Coefficients of prod_odd (1 + t^d) prod_even 1/(1 - t^d) up to t^top."""
    t = sympy.symbols("t")
    f = sympy.Integer(1)
    for d in degrees:
        f *= (1 + t**d) if d % 2 else 1 / (1 - t**d)
    s = sympy.series(f, t, 0, top + 1).removeO()
    return [int(s.coeff(t, k)) for k in range(top + 1)]


@pytest.mark.parametrize("degrees", [(1, 2), (1, 1, 1, 2, 2, 2), (1, 3, 2, 4), (2, 2, 1)])
def test_basis_sizes_match_generating_function(degrees):
    table = GeneratorTable((f"g{k}", d) for k, d in enumerate(degrees))
    top = 8
    assert [len(basis(table, n)) for n in range(top + 1)] == _series_counts(degrees, top)


@settings(max_examples=60, deadline=None)
@given(homogeneous(), homogeneous())
def test_graded_commutativity(a, b):
    sign = -1 if (a.degree() * b.degree()) % 2 else 1
    assert a * b == b * a * sign


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_associativity_and_distributivity(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@settings(max_examples=40, deadline=None)
@given(homogeneous())
def test_odd_elements_square_to_zero(a):
    if a.degree() % 2:
        assert (a * a).is_zero()


def _image_pool():
    g = {n: MIXED.gen(n) for n in MIXED.names}
    x_, t1_, t2_, w_, u_ = (g[n] for n in MIXED.names)
    return {
        0: [MIXED.zero(), x_, x_ + 1, u_ * t1_, 2 * x_**2],
        1: [MIXED.zero(), t1_, t2_, t1_ + x_ * t2_],
        2: [MIXED.zero(), w_, t1_ * t2_, w_ + t1_ * t2_],
        -1: [MIXED.zero(), u_, x_ * u_],
    }


@settings(max_examples=40, deadline=None)
@given(elements(max_length=2), st.data())
def test_substitution_composes(a, data):
    pool = _image_pool()
    first = {n: data.draw(st.sampled_from(pool[d])) for n, d in MIXED}
    second = {n: data.draw(st.sampled_from(pool[d])) for n, d in MIXED}
    composed = {n: substitute(img, second, MIXED) for n, img in first.items()}
    assert substitute(substitute(a, first, MIXED), second, MIXED) == substitute(a, composed, MIXED)


@settings(max_examples=40, deadline=None)
@given(elements())
def test_degree_components_recombine(a):
    total = MIXED.zero()
    for d, comp in degree_components(a).items():
        assert comp.degree() == d
        total = total + comp
    assert total == a
