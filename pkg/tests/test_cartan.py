import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qforms.cartan import (
    RELATIONS,
    cartan_suite,
    contraction,
    lie_derivative,
    odd_tangent,
    pullback_commutes,
    random_vector_field,
)
from qforms.derivations import Derivation, is_homological
from qforms.gca import GeneratorTable

LINE = GeneratorTable([("x", 0)])
MIXED = GeneratorTable([("x", 0), ("y", 0), ("t", 1), ("w", 2)])


def test_odd_tangent_of_a_polynomial_ring():
    T = odd_tangent(LINE)
    assert list(T.table) == [("x", 0), ("x'", 1)]
    assert T.d.image("x") == T.table.gen("x'")
    assert T.d.image("x'").is_zero()
    assert is_homological(T.d)


def test_odd_tangent_of_an_exterior_algebra():
    T = odd_tangent(GeneratorTable([("th", 1)]))
    assert list(T.table) == [("th", 1), ("th'", 2)]
    # the dotted generator is even, so it has nonzero powers
    assert T.table.gen("th'") ** 3


def test_iterated_odd_tangent_names():
    T2 = odd_tangent(odd_tangent(LINE).table)
    assert T2.table.names == ("x", "x'", "x''", "x'''")
    assert T2.d(T2.table.gen("x")) == T2.table.gen("x''")
    assert T2.table.degrees == (0, 1, 1, 2)
    assert is_homological(T2.d)


def test_contraction_examples():
    T = odd_tangent(LINE)
    x, dx = T.table.gens()
    d_x = Derivation.partial(LINE, "x")
    i = contraction(d_x, T)
    assert i(dx) == T.table.one() and i(x).is_zero()
    euler = LINE.gen("x") * d_x
    assert contraction(euler, T)(dx) == x


def test_lie_derivative_of_a_coordinate_field():
    T = odd_tangent(LINE)
    x, dx = T.table.gens()
    L = lie_derivative(Derivation.partial(LINE, "x"), T)
    assert L(x) == T.table.one()
    assert L(dx).is_zero()


def test_suite_on_the_line():
    d_x = Derivation.partial(LINE, "x")
    results = cartan_suite(d_x, LINE.gen("x") * d_x)
    assert [r.relation for r in results] == list(RELATIONS)
    assert all(r.passed for r in results)


def test_suite_with_an_odd_field():
    t = MIXED.gen("t")
    X = t * Derivation.partial(MIXED, "x")
    Y = MIXED.gen("y") * Derivation.partial(MIXED, "t")
    assert X.degree == 1
    assert all(r.passed for r in cartan_suite(X, Y))


def test_suite_catches_a_corrupted_contraction():
    def bad_iota(X, T):
        good = contraction(X, T)
        # flip the sign on the first dotted generator only
        first = T.dotted[0]
        images = {n: (-img if n == first else img) for n, img in zip(T.table.names, good.images)}
        return Derivation(T.table, images, good.degree)

    X = Derivation.partial(MIXED, "x")
    Y = MIXED.gen("x") * Derivation.partial(MIXED, "x") + MIXED.gen("y") * Derivation.partial(MIXED, "y")
    results = {r.relation: r for r in cartan_suite(X, Y, iota=bad_iota)}
    failed = results["[L_X,i_Y]=i_[X,Y]"]
    assert not failed.passed and failed.witness


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_all_relations_hold_for_random_fields(seed):
    rng = random.Random(seed)
    X, Y = random_vector_field(MIXED, rng), random_vector_field(MIXED, rng)
    for r in cartan_suite(X, Y):
        assert r.passed, (r.relation, r.witness)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_lie_derivative_of_a_product_with_a_function(seed):
    rng = random.Random(seed)
    T = odd_tangent(MIXED)
    X = random_vector_field(MIXED, rng)
    f = random_vector_field(MIXED, rng, degree=0).image("t")  # a random degree-1 coefficient
    f = f if rng.random() < 0.5 else MIXED.gen("x") ** 2 + MIXED.gen("y")
    fd = f.degree() or 0
    lhs = lie_derivative(f * X, T)
    sign = -1 if (fd + X.degree) % 2 else 1
    rhs = T.lift(f) * lie_derivative(X, T) + (T.d(T.lift(f)) * contraction(X, T)) * sign
    assert lhs == rhs


def test_random_fields_are_homogeneous_of_mixed_parity():
    rng = random.Random(3)
    degrees = {random_vector_field(MIXED, rng).degree for _ in range(40)}
    assert {d % 2 for d in degrees} == {0, 1}


def test_pullback_along_a_morphism_commutes_with_d():
    src = GeneratorTable([("u", 0), ("s", 1)])
    dst = GeneratorTable([("x", 0), ("y", 0), ("t", 1)])
    Ts, Td = odd_tangent(src), odd_tangent(dst)
    x, y, t = dst.gens()
    images = {"u": x * y + x**2, "s": y * t}
    assert pullback_commutes(images, Ts, Td)


@pytest.mark.parametrize("seed", range(5))
def test_pullback_commutes_on_random_polynomial_maps(seed):
    rng = random.Random(seed)
    src = GeneratorTable([("u", 0), ("v", 0)])
    dst = GeneratorTable([("x", 0), ("y", 0)])
    x, y = dst.gens()
    mons = [dst.one(), x, y, x * y, x**2, y**2]
    images = {n: sum((m * rng.randint(-3, 3) for m in mons), dst.zero()) for n in src.names}
    assert pullback_commutes(images, odd_tangent(src), odd_tangent(dst))
