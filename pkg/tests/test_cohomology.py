from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HEIS, SO3, abelian, heisenberg, so3
from oracles import ce_betti, sympy_rank
from qforms.algebroids import StructureData, build_differential
from qforms.cohomology import (
    ComplexSpec,
    basic_betti,
    basic_spec,
    betti,
    differential_matrix,
    representatives,
)
from qforms.derivations import Derivation
from qforms.errors import InfiniteBasis, NotClosed, ValidationError, WeightNotPreserved
from qforms.gca import GeneratorTable
from qforms.models import brst, weil


def ce(g, window=None):
    window = window or (0, g.rank)
    return ComplexSpec(g.table, build_differential(g), window)


def consts(brackets):
    out = {}
    for (i, j), img in brackets.items():
        for k, c in img.items():
            out[(i, j, k)] = c
            out[(j, i, k)] = -c
    return out


def direct_sum(a: dict, n: int, b: dict) -> dict:
    out = dict(a)
    for (i, j), img in b.items():
        out[(i + n, j + n)] = {k + n: c for k, c in img.items()}
    return out


def test_ce_so3_matches_oracle():
    assert betti(ce(so3())).dims() == (1, 0, 0, 1)
    assert ce_betti(3, consts(SO3)) == [1, 0, 0, 1]


def test_ce_heisenberg_matches_oracle():
    assert betti(ce(heisenberg())).dims() == tuple(ce_betti(3, consts(HEIS))) == (1, 2, 2, 1)


def test_weil_matrix_degree_one():
    W = weil(abelian(1))
    assert differential_matrix(W.spec((0, 2)), 1) == [[1]]


def test_ce_so3_matrix_degree_one():
    g = so3()
    spec = ce(g)
    th1, th2, th3 = g.table.gens()
    expected = [-th2 * th3, th1 * th3, -th1 * th2]
    M = differential_matrix(spec, 1)
    cols = [[M[r][c] for r in range(len(M))] for c in range(3)]
    assert cols == [spec.to_vector(e, 2) for e in expected]


def test_zero_differential():
    T = GeneratorTable([("t", 1)])
    spec = ComplexSpec(T, Derivation.zero(T, 1), (0, 1))
    assert differential_matrix(spec, 0) == [[0]]
    assert betti(spec).dims() == (1, 1)


def test_betti_records_are_consistent():
    table = betti(ce(heisenberg()))
    for r in table.rows:
        assert r.kernel == r.dim - r.rank
        assert min(r.dim, r.rank, r.kernel, r.h) >= 0
    assert table.to_records()[3] == {"degree": 3, "dim": 1, "rank": 0, "kernel": 1, "h": 1}
    text = table.to_text().splitlines()
    assert text[0].split() == ["degree", "dim", "rank", "kernel", "h"]
    assert len(text) == 5


@pytest.mark.parametrize("make", [so3, heisenberg, lambda: abelian(2)])
def test_consecutive_matrices_compose_to_zero(make):
    g = make()
    spec = ce(g)
    for n in range(g.rank):
        A, B = differential_matrix(spec, n), differential_matrix(spec, n + 1)
        prod = [[sum(B[i][k] * A[k][j] for k in range(len(A))) for j in range(len(A[0]))] for i in range(len(B))]
        assert all(x == 0 for row in prod for x in row)


def test_weil_consecutive_matrices_compose_to_zero():
    spec = weil(so3()).spec((0, 4))
    for n in range(4):
        A, B = differential_matrix(spec, n), differential_matrix(spec, n + 1)
        prod = [[sum(B[i][k] * A[k][j] for k in range(len(A))) for j in range(len(A[0]))] for i in range(len(B))]
        assert all(x == 0 for row in prod for x in row)


def test_ranks_agree_with_sympy():
    spec = weil(so3()).spec((0, 4))
    for n in range(5):
        M = differential_matrix(spec, n)
        assert betti(ComplexSpec(spec.table, spec.differential, (n, n)))[n].rank == sympy_rank(M)


def test_betti_independent_of_generator_order():
    perm = (2, 0, 1)
    permuted = {(perm[i], perm[j]): {perm[k]: c for k, c in img.items()} for (i, j), img in HEIS.items()}
    a = betti(ce(StructureData.lie_algebra(HEIS, 3)))
    b = betti(ce(StructureData.lie_algebra(permuted, 3)))
    assert a.dims() == b.dims()


def test_direct_sum_of_algebras_multiplies_poincare_polynomials():
    # CE of g + h is the tensor product of the two complexes
    g = StructureData.lie_algebra(direct_sum(SO3, 3, HEIS), 6)
    dims = betti(ce(g)).dims()
    left, right = (1, 0, 0, 1), (1, 2, 2, 1)
    conv = tuple(sum(left[i] * right[n - i] for i in range(4) if 0 <= n - i < 4) for n in range(7))
    assert dims == conv == (1, 2, 2, 2, 2, 2, 1)
    assert list(dims) == ce_betti(6, consts(direct_sum(SO3, 3, HEIS)))


def test_adjoining_acyclic_pair_keeps_cohomology():
    g = heisenberg()
    T = g.table.extend([("u", 1), ("w", 2)])
    D = build_differential(g).extend(T) + Derivation(T, {"u": T.gen("w")}, 1)
    spec = ComplexSpec(T, D, (0, 3))
    assert betti(spec).dims() == (1, 2, 2, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_two_dimensional_algebras_match_oracle(a, b):
    br = {(0, 1): {k: c for k, c in ((0, a), (1, b)) if c}}
    g = StructureData.lie_algebra(br, 2)
    assert list(betti(ce(g)).dims()) == ce_betti(2, consts(br))


def test_weil_acyclic():
    assert betti(weil(so3()).spec((0, 6))).dims() == (1, 0, 0, 0, 0, 0, 0)


def test_basic_weil_so3():
    W = weil(so3())
    assert basic_betti(W.spec((0, 8)), W.contractions).dims() == (1, 0, 0, 0, 1, 0, 0, 0, 1)


def test_basic_weil_line():
    W = weil(abelian(1))
    assert basic_betti(W.spec((0, 8)), W.contractions).dims() == (1, 0, 1, 0, 1, 0, 1, 0, 1)


def test_basic_with_no_contractions_is_betti():
    spec = ce(heisenberg())
    assert basic_betti(spec, []).dims() == betti(spec).dims()


def test_representatives():
    g = so3()
    th1, th2, th3 = g.table.gens()
    assert representatives(ce(g), 3) == [th1 * th2 * th3]
    assert representatives(ce(heisenberg()), 0) == [g.table.one().embed(heisenberg().table)]
    W = weil(abelian(1))
    reps = representatives(basic_spec(W.spec((0, 4)), W.contractions), 2)
    assert reps == [W.table.gen("th1'")]


def test_representatives_are_cocycles_and_independent():
    spec = ce(heisenberg())
    for n in range(4):
        reps = representatives(spec, n)
        assert len(reps) == betti(spec)[n].h
        for r in reps:
            assert not spec.differential(r)
            assert next(iter(r.terms.values())) == 1


def test_not_closed():
    W = weil(abelian(1))
    bad = Derivation.partial(W.table, "th1'")
    spec = ComplexSpec(W.table, W.d_W, (0, 2), None, [bad])
    with pytest.raises(NotClosed):
        betti(spec)


def test_non_homological_differential_rejected():
    T = GeneratorTable([("a", 1), ("c", 2)])
    a, c = T.gens()
    with pytest.raises(ValidationError):
        ComplexSpec(T, Derivation(T, {"a": c, "c": a * c}, 1), (0, 2))


def test_infinite_basis_without_weight():
    base = GeneratorTable([("x", 0), ("y", 0)])
    x, y = base.gens()
    b = brst(abelian(1), base, [Derivation(base, {"x": -y, "y": x}, 0)])
    with pytest.raises(InfiniteBasis):
        betti(b.spec((0, 2)))


def test_weight_not_preserved():
    base = GeneratorTable([("x", 0)])
    x = base.gen("x")
    b = brst(abelian(1), base, [Derivation(base, {"x": x * x}, 0)])
    with pytest.raises(WeightNotPreserved):
        b.spec((0, 2), weight=1)


def test_window_order():
    with pytest.raises(ValueError):
        ComplexSpec(so3().table, build_differential(so3()), (3, 0))


def test_fraction_entries_stay_exact():
    g = StructureData.lie_algebra({(0, 1): {1: Fraction(1, 3)}}, 2)
    M = differential_matrix(ce(g), 1)
    assert all(isinstance(x, (int, Fraction)) for row in M for x in row)
    assert betti(ce(g)).dims() == tuple(ce_betti(2, consts({(0, 1): {1: Fraction(1, 3)}})))
