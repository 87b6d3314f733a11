"""Independent reference computations used to cross-check the engine.

Nothing here imports the engine's algebra or linear algebra: exterior
algebras are bitmask based and ranks come from sympy.
"""
from itertools import combinations, product

import sympy


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``e_A ^ e_B`` for bitmasks A, B (0 when they overlap)."""
    if a & b:
        return 0
    swaps = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            swaps += bin(a >> (i + 1)).count("1")
    return -1 if swaps % 2 else 1


def ce_betti(n: int, consts: dict) -> list[int]:
    """Chevalley-Eilenberg Betti numbers by dense matrices over Q.

    ``consts[(i, j, k)]`` is ``c_ij^k`` for all ordered pairs.  The
    differential on generators is ``d e^k = -1/2 c_ij^k e^i e^j``.
    """
    d_gen = {}
    for k in range(n):
        img = {}
        for i, j in combinations(range(n), 2):
            c = consts.get((i, j, k), 0)
            if c:
                img[(1 << i) | (1 << j)] = img.get((1 << i) | (1 << j), 0) - sympy.Rational(c)
        d_gen[k] = img

    def d(mask: int) -> dict:
        out = {}
        bits = [i for i in range(n) if mask >> i & 1]
        for pos, k in enumerate(bits):
            before = sum(1 << b for b in bits[:pos])
            after = mask & ~before & ~(1 << k)
            # moving d past pos odd generators
            sign = -1 if pos % 2 else 1
            for m, c in d_gen[k].items():
                s = wedge_sign(before, m) * wedge_sign(before | m, after)
                if s:
                    key = before | m | after
                    out[key] = out.get(key, 0) + sign * s * c
        return out

    bases = [[m for m in range(1 << n) if bin(m).count("1") == q] for q in range(n + 2)]
    ranks = []
    for q in range(n + 1):
        rows, cols = bases[q + 1], bases[q]
        if not rows or not cols:
            ranks.append(0)
            continue
        idx = {m: r for r, m in enumerate(rows)}
        M = sympy.zeros(len(rows), len(cols))
        for c, m in enumerate(cols):
            for key, v in d(m).items():
                M[idx[key], c] += v
        ranks.append(M.rank())
    out = []
    for q in range(n + 1):
        prev = ranks[q - 1] if q else 0
        out.append(len(bases[q]) - ranks[q] - prev)
    return out


def group_cochain_betti(elements, mult, unit, top: int) -> list[int]:
    """Betti numbers of the full (unnormalized) cochain complex of a finite group."""

    def faces(tup):
        q = len(tup)
        out = [tup[1:]]
        for i in range(1, q):
            out.append(tup[: i - 1] + (mult(tup[i - 1], tup[i]),) + tup[i + 1 :])
        out.append(tup[:-1])
        return out

    levels = [list(product(elements, repeat=q)) for q in range(top + 2)]
    ranks = []
    for q in range(top + 1):
        src, dst = levels[q], levels[q + 1]
        idx = {t: k for k, t in enumerate(src)}
        M = sympy.zeros(len(dst), len(src))
        for r, t in enumerate(dst):
            for i, f in enumerate(faces(t)):
                M[r, idx[f]] += (-1) ** i
        ranks.append(M.rank())
    return [len(levels[q]) - ranks[q] - (ranks[q - 1] if q else 0) for q in range(top + 1)]


def sympy_rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows]).rank()


def rotation_cartan_betti(weight: int, top: int) -> list[int]:
    """Cartan model of the rotation of the plane, written out by hand.

    A basis element ``(a, b, e1, e2, k)`` stands for
    ``x^a y^b (dx)^e1 (dy)^e2 u^k`` with ``u`` the degree-2 generator of
    S(g*).  The rotation field is ``-y d/dx + x d/dy``; the complex is the
    kernel of its Lie derivative with ``d_C = d - u * contraction``.
    Returns ``(invariant dimensions, Betti numbers)`` over degrees 0..top.
    """

    def basis(n):
        out = []
        for e1, e2 in product((0, 1), repeat=2):
            rest = n - e1 - e2
            if rest < 0 or rest % 2:
                continue
            k = rest // 2
            p = weight - e1 - e2
            for a in range(p + 1) if p >= 0 else ():
                out.append((a, p - a, e1, e2, k))
        return out

    def add(out, key, c):
        if c:
            out[key] = out.get(key, 0) + c

    def d_C(m):
        a, b, e1, e2, k = m
        out = {}
        # d(x^a y^b) = a x^(a-1) y^b dx + b x^a y^(b-1) dy, wedged on the left
        if a and not e1:
            add(out, (a - 1, b, 1, e2, k), a)
        if b and not e2:
            add(out, (a, b - 1, e1, 1, k), b * (-1 if e1 else 1))
        # - u * contraction: dx -> -y, dy -> x
        if e1:
            add(out, (a, b + 1, 0, e2, k + 1), 1)
        if e2:
            add(out, (a + 1, b, e1, 0, k + 1), -(-1 if e1 else 1))
        return out

    def lie(m):
        a, b, e1, e2, k = m
        out = {}
        # x -> -y, y -> x, dx -> -dy, dy -> dx (even derivation)
        if a:
            add(out, (a - 1, b + 1, e1, e2, k), -a)
        if b:
            add(out, (a + 1, b - 1, e1, e2, k), b)
        if e1 and not e2:
            add(out, (a, b, 0, 1, k), -1)
        if e2 and not e1:
            add(out, (a, b, 1, 0, k), 1)
        return out

    def matrix(op, src, dst):
        idx = {m: r for r, m in enumerate(dst)}
        M = sympy.zeros(len(dst), len(src))
        for c, m in enumerate(src):
            for key, v in op(m).items():
                M[idx[key], c] += v
        return M

    def invariants(n):
        src = basis(n)
        if not src:
            return src, sympy.zeros(0, 0)
        null = matrix(lie, src, src).nullspace()
        return src, (sympy.Matrix.hstack(*null) if null else sympy.zeros(len(src), 0))

    ranks = {}
    for n in range(-1, top + 1):
        src, N = invariants(n)
        dst = basis(n + 1)
        if N.cols == 0 or not dst:
            ranks[n] = 0
        else:
            ranks[n] = (matrix(d_C, src, dst) * N).rank()
    dims = [invariants(n)[1].cols for n in range(top + 1)]
    return dims, [dims[n] - ranks[n] - ranks[n - 1] for n in range(top + 1)]
