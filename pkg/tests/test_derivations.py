from fractions import Fraction

import pytest
from hypothesis import given, settings

from qforms.algebroids import StructureData, build_differential
from qforms.cartan import contraction, odd_tangent
from qforms.derivations import (
    Derivation,
    bracket,
    compose,
    conjugate,
    exp_nilpotent,
    is_homological,
    square_witness,
)
from qforms.errors import DegreeMismatch, MismatchedAlgebra, NotNilpotent
from qforms.gca import GeneratorTable

from conftest import so3
from strategies import derivations, homogeneous

R = GeneratorTable([("x", 0), ("x'", 1)])
x, dx = R.gens()
d_R = Derivation(R, {"x": dx}, 1)


def _sign(k):
    return -1 if k % 2 else 1


def test_de_rham_on_a_square():
    assert d_R(x**2) == 2 * x * dx


def test_koszul_differential_on_a_mixed_product():
    W = GeneratorTable([("th1", 1), ("th2", 1), ("th1'", 2), ("th2'", 2)])
    th1, th2, v1, v2 = W.gens()
    d_K = Derivation(W, {"th1": v1, "th2": v2}, 1)
    assert d_K(th1 * v2) == v1 * v2


def test_derivations_kill_constants():
    assert d_R(R.one()).is_zero()
    assert d_R(R.scalar(7)).is_zero()


def test_degree_inference_and_mismatch():
    assert Derivation(R, {"x": dx}).degree == 1
    with pytest.raises(Exception):
        Derivation(R, {"x": dx, "x'": x}, None)


def test_bracket_of_coordinate_fields():
    P = GeneratorTable([("x", 0)])
    dx_ = Derivation.partial(P, "x")
    euler = P.gen("x") * dx_
    assert bracket(dx_, euler) == dx_


def test_de_rham_squares_to_zero():
    T = odd_tangent(GeneratorTable([("x", 0), ("t", 1)]))
    assert bracket(T.d, T.d).is_zero()
    assert is_homological(T.d)
    assert is_homological(d_R)


def test_so3_differential_is_homological(so3_data):
    assert is_homological(build_differential(so3_data))


def test_rescaled_so3_is_still_a_lie_algebra():
    # [e1, e2] = 2 e3 with the other brackets cyclic is a rescaling of so(3)
    S = StructureData.lie_algebra({(0, 1): {2: 2}, (1, 2): {0: 1}, (2, 0): {1: 1}}, 3)
    assert is_homological(build_differential(S))


def test_perturbed_so3_is_not_homological():
    S = StructureData.lie_algebra({(0, 1): {2: 1, 0: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, 3)
    D = build_differential(S)
    assert not is_homological(D)
    name, value = square_witness(D)
    assert name in S.fibre and value


def test_mismatched_tables_are_rejected():
    other = GeneratorTable([("y", 0)])
    with pytest.raises(MismatchedAlgebra):
        d_R(other.gen("y"))
    with pytest.raises(MismatchedAlgebra):
        bracket(d_R, Derivation.partial(other, "y"))


def test_exponential_of_zero_is_identity():
    a = x**3 + dx
    assert exp_nilpotent(Derivation.zero(R, 1), a) == a


def test_exponential_of_a_nilpotent_field():
    P = GeneratorTable([("x", 0), ("v", 0)])
    px, v = P.gens()
    N = Derivation(P, {"x": v}, 0)
    assert exp_nilpotent(N, px) == px + v
    # exp(N) is the automorphism x -> x + v
    assert exp_nilpotent(N, px**2) == (px + v) ** 2


def test_exponential_needs_an_even_field():
    with pytest.raises(DegreeMismatch):
        exp_nilpotent(d_R, x)


def test_exponential_of_iota_of_zero_differential_is_identity():
    g = StructureData.lie_algebra({}, 2)
    T = odd_tangent(g.table)
    iota = contraction(build_differential(g), T)
    a = T.table.gen("th1") * T.table.gen("th2'")
    assert iota.is_zero() and exp_nilpotent(iota, a) == a


def test_non_nilpotent_exponential_raises():
    P = GeneratorTable([("x", 0)])
    euler = P.gen("x") * Derivation.partial(P, "x")
    with pytest.raises(NotNilpotent):
        exp_nilpotent(euler, P.gen("x"), cap=10)


def test_conjugate_by_zero():
    assert conjugate(d_R, Derivation.zero(R, 0)) == d_R


def test_conjugation_matches_adjoint_series():
    # exp(ad N) D = D + [N, D] + 1/2 [N, [N, D]] + ...
    T = odd_tangent(so3().table)
    N = contraction(build_differential(so3()), T)
    D = T.d
    series = D + bracket(N, D) + bracket(N, bracket(N, D)) * Fraction(1, 2)
    assert bracket(N, bracket(N, bracket(N, D))).is_zero()
    assert conjugate(D, N) == series


@settings(max_examples=60, deadline=None)
@given(derivations(), homogeneous(max_length=2), homogeneous(max_length=2))
def test_leibniz_rule(D, a, b):
    lhs = D(a * b)
    rhs = D(a) * b + a * D(b) * _sign(D.degree * a.degree())
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(derivations(), derivations())
def test_bracket_graded_antisymmetry(D1, D2):
    assert bracket(D1, D2) == -bracket(D2, D1) * _sign(D1.degree * D2.degree)


@settings(max_examples=40, deadline=None)
@given(derivations(), derivations(), derivations())
def test_graded_jacobi(D1, D2, D3):
    p1, p2, p3 = D1.degree, D2.degree, D3.degree
    total = (
        bracket(D1, bracket(D2, D3)) * _sign(p1 * p3)
        + bracket(D2, bracket(D3, D1)) * _sign(p2 * p1)
        + bracket(D3, bracket(D1, D2)) * _sign(p3 * p2)
    )
    assert total.is_zero()


@settings(max_examples=40, deadline=None)
@given(derivations(), derivations(), homogeneous(max_length=2))
def test_bracket_is_the_graded_commutator(D1, D2, a):
    lhs = bracket(D1, D2)(a)
    rhs = compose(D1, D2, a) - compose(D2, D1, a) * _sign(D1.degree * D2.degree)
    assert lhs == rhs
