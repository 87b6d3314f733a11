import pytest

from qforms.algebroids import StructureData
from qforms.derivations import Derivation
from qforms.gca import GeneratorTable
from qforms.simplicial import PolyActionGroupoid, slot_name

SO3 = {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}
HEIS = {(0, 1): {2: 1}}


def so3():
    return StructureData.lie_algebra(SO3, 3)


def heisenberg():
    return StructureData.lie_algebra(HEIS, 3)


def abelian(n=1):
    return StructureData.lie_algebra({}, n)


def plane():
    return GeneratorTable([("x", 0), ("y", 0)])


def rotation(base=None):
    base = base or plane()
    x, y = base.gen("x"), base.gen("y")
    return Derivation(base, {"x": -y, "y": x}, 0)


def additive_group(base=(), action=None):
    law = GeneratorTable([("g_1", 0), ("g_2", 0)])
    return PolyActionGroupoid(list(base), ["g"], {"g": law.gen("g_1") + law.gen("g_2")}, action)


def heisenberg_group():
    law = GeneratorTable((slot_name(a, k), 0) for k in (1, 2) for a in "abc")
    a1, b1, c1, a2, b2, c2 = (law.gen(n) for n in law.names)
    return PolyActionGroupoid([], "abc", {"a": a1 + a2, "b": b1 + b2, "c": c1 + c2 + a1 * b2})


def translation_groupoid():
    """``R`` acting on ``R`` by ``x . g = x + g``."""
    T = GeneratorTable([("x", 0), ("g_1", 0)])
    return additive_group(["x"], {"x": T.gen("x") + T.gen("g_1")})


def heisenberg_on_line():
    """Heisenberg group acting on ``R`` through its first coordinate."""
    law = GeneratorTable((slot_name(a, k), 0) for k in (1, 2) for a in "abc")
    a1, b1, c1, a2, b2, c2 = (law.gen(n) for n in law.names)
    T = GeneratorTable([("x", 0)] + [(slot_name(a, 1), 0) for a in "abc"])
    return PolyActionGroupoid(
        ["x"], "abc", {"a": a1 + a2, "b": b1 + b2, "c": c1 + c2 + a1 * b2}, {"x": T.gen("x") + T.gen("a_1")}
    )


@pytest.fixture
def so3_data():
    return so3()


def random_semidirect(rng):
    """``R x| R^2`` for a random integer 2x2 matrix: Jacobi holds for every choice."""
    M = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]
    brackets = {
        (0, 1): {e: M[e - 1][0] for e in (1, 2) if M[e - 1][0]},
        (0, 2): {e: M[e - 1][1] for e in (1, 2) if M[e - 1][1]},
    }
    return StructureData.lie_algebra(brackets, 3)


def random_line_action(rng):
    """The line acting on itself by a random quadratic vector field."""
    L = GeneratorTable([("x", 0)])
    x = L.gen("x")
    f = sum((x**i * rng.randint(-2, 2) for i in range(3)), L.zero())
    return StructureData.action(abelian(1), L, [Derivation(L, {"x": f}, 0)])


def random_homological(rng):
    """Algebroid data with at most three fibre generators, alternating between shapes."""
    return random_semidirect(rng) if rng.random() < 0.5 else random_line_action(rng)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
