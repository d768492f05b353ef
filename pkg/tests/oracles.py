"""Independent reference computations used to pin expected values in tests.

Nothing here imports equihom.  Values produced by these routines are either
frozen into test files as literals or recomputed at test time and compared
against the package, so the code under test never certifies itself.
"""

from __future__ import annotations

import itertools
from math import gcd

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form


# ---------------------------------------------------------------------------
# integer linear algebra


def invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nontrivial invariant factors (>= 2) of an integer matrix, via sympy."""
    if not rows or not rows[0]:
        return []
    D = smith_normal_form(Matrix(rows))
    diag = [abs(D[i, i]) for i in range(min(D.rows, D.cols))]
    return [d for d in diag if d > 1]


def matrix_rank(rows: list[list[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    return Matrix(rows).rank()


def free_homology(out_rows, in_rows, n: int) -> tuple[int, list[int]]:
    """(rank, torsion) of ker(out)/im(inc) for a complex of free groups.

    out_rows is the matrix of C_n -> C_{n-1} (rows indexed by C_{n-1}),
    in_rows the matrix of C_{n+1} -> C_n; both may be [].  Requires
    out*inc = 0.  Uses the classical formula: the Betti number is
    n - rank(out) - rank(inc) and the torsion is the set of invariant
    factors of inc that exceed 1.
    """
    r_out = matrix_rank(out_rows)
    r_in = matrix_rank(in_rows)
    rank = n - r_out - r_in
    assert rank >= 0
    return rank, invariant_factors(in_rows)


# ---------------------------------------------------------------------------
# classical cell structures, hand-entered

# boundary matrices are lists ordered by degree: boundaries[k] maps degree k
# to degree k-1, rows indexed by (k-1)-cells
CLASSICAL_COMPLEXES = {
    # one vertex, one edge
    "circle": {"cells": [1, 1], "boundaries": [None, [[0]]]},
    # two vertices, two edges (equator decomposition)
    "circle2": {"cells": [2, 2], "boundaries": [None, [[1, 1], [-1, -1]]]},
    # minimal CW sphere: one vertex, one 2-cell
    "sphere2": {"cells": [1, 0, 1], "boundaries": [None, None, None]},
    # torus: one vertex, two edges, one face, all boundaries zero
    "torus": {"cells": [1, 2, 1], "boundaries": [None, [[0, 0]], [[0], [0]]]},
    # projective plane: attaching map doubles the edge
    "rp2": {"cells": [1, 1, 1], "boundaries": [None, [[0]], [[2]]]},
    # klein bottle: aba^{-1}b
    "klein": {"cells": [1, 2, 1], "boundaries": [None, [[0, 0]], [[0], [2]]]},
}


def classical_homology(name: str) -> dict[int, tuple[int, list[int]]]:
    data = CLASSICAL_COMPLEXES[name]
    cells = data["cells"]
    bnd = data["boundaries"]
    out: dict[int, tuple[int, list[int]]] = {}
    for k, nk in enumerate(cells):
        if nk == 0:
            continue
        d_out = bnd[k] if k >= 1 and bnd[k] else []
        d_in = bnd[k + 1] if k + 1 < len(bnd) and bnd[k + 1] else []
        out[k] = free_homology(d_out, d_in, nk)
    return out


# ---------------------------------------------------------------------------
# finite abelian groups by element counting

# a finite abelian group is described by its list of cyclic moduli (>= 1);
# two such groups are isomorphic iff their kill-counts agree for every d


def kill_count(moduli: list[int], d: int) -> int:
    """Number of elements x with d*x = 0."""
    total = 1
    for m in moduli:
        total *= gcd(d, m)
    return total


def census(moduli: list[int]) -> dict[int, int]:
    exponent = 1
    for m in moduli:
        exponent = exponent * m // gcd(exponent, m)
    return {d: kill_count(moduli, d) for d in range(1, exponent + 1) if exponent % d == 0}


def hom_moduli(mod_a: list[int], mod_b: list[int]) -> list[int]:
    """Cyclic decomposition of Hom(A, B); modulus 0 denotes a free factor."""
    out = []
    for a in mod_a:
        for b in mod_b:
            if a == 0 and b == 0:
                out.append(0)
            elif a == 0:
                out.append(b)
            elif b == 0:
                continue  # Hom(Z/a, Z) = 0
            else:
                out.append(gcd(a, b))
    return [m for m in out if m != 1]


def tensor_moduli(mod_a: list[int], mod_b: list[int]) -> list[int]:
    out = []
    for a in mod_a:
        for b in mod_b:
            if a == 0 and b == 0:
                out.append(0)
            elif a == 0:
                out.append(b)
            elif b == 0:
                out.append(a)
            else:
                out.append(gcd(a, b))
    return [m for m in out if m != 1]


def canonical_from_moduli(moduli: list[int]) -> tuple[int, tuple[int, ...]]:
    """(free rank, invariant factors) of a direct sum of cyclic groups."""
    rank = sum(1 for m in moduli if m == 0)
    finite = [m for m in moduli if m > 1]
    if not finite:
        return rank, ()
    diag = [[finite[i] if i == j else 0 for j in range(len(finite))] for i in range(len(finite))]
    return rank, tuple(invariant_factors(diag))


def hom_element_census(mod_a: list[int], mod_b: list[int]) -> dict[int, int]:
    """Brute-force census of Hom(A, B) for finite A, B (small orders only)."""
    assert all(m >= 1 for m in mod_a) and all(m >= 1 for m in mod_b)
    carriers = []
    for a in mod_a:
        # image of a generator of Z/a must be killed by a
        opts = [
            tuple(x)
            for x in itertools.product(*[range(m) for m in mod_b])
            if all((a * xi) % m == 0 for xi, m in zip(x, mod_b))
        ]
        carriers.append(opts)
    elements = list(itertools.product(*carriers))
    exponent = 1
    for m in mod_b:
        exponent = exponent * m // gcd(exponent, m)
    counts: dict[int, int] = {}
    for d in range(1, exponent + 1):
        if exponent % d:
            continue
        counts[d] = sum(
            1
            for el in elements
            if all((d * xi) % mi == 0 for comp in el for xi, mi in zip(comp, mod_b))
        )
    return counts


# ---------------------------------------------------------------------------
# finite groups from multiplication tables


def closure(mul: list[list[int]], seed: tuple[int, ...]) -> frozenset[int]:
    got = set(seed) | {0}
    frontier = list(got)
    while frontier:
        x = frontier.pop()
        for y in list(got):
            for z in (mul[x][y], mul[y][x]):
                if z not in got:
                    got.add(z)
                    frontier.append(z)
    return frozenset(got)


def all_subgroups_brute(mul: list[list[int]]) -> set[frozenset[int]]:
    """Every subgroup, as closures of all subsets.  Exhaustive; |G| <= 12."""
    n = len(mul)
    assert n <= 12
    out = {closure(mul, ())}
    elems = list(range(1, n))
    for r in range(1, min(n, 4)):
        for combo in itertools.combinations(elems, r):
            out.add(closure(mul, combo))
    # subsets of size < 4 generate every subgroup of a group of order <= 12,
    # but keep the guarantee airtight by closing over unions until stable
    changed = True
    while changed:
        changed = False
        pairs = list(out)
        for a in pairs:
            for b in pairs:
                u = closure(mul, tuple(a | b))
                if u not in out:
                    out.add(u)
                    changed = True
    return out


def inverse_of(mul: list[list[int]], x: int) -> int:
    for y in range(len(mul)):
        if mul[x][y] == 0:
            return y
    raise ValueError("not a group table")


def conjugate_set(mul, inv, c: int, S) -> frozenset[int]:
    return frozenset(mul[mul[c][s]][inv[c]] for s in S)


def span_orbits_brute(mul: list[list[int]], H, K) -> list[tuple[tuple[int, ...], int]]:
    """Canonical reps of H-orbits of pairs (J, gK), J <= H, g^-1 J g <= K.

    The H-action is h.(J, gK) = (h J h^-1, h g K); canonical rep is lex-min
    on (sorted J, min of coset).  Returns a sorted list.
    """
    n = len(mul)
    inv = [inverse_of(mul, x) for x in range(n)]
    H = frozenset(H)
    K = frozenset(K)
    subs_h = {S for S in all_subgroups_brute(mul) if S <= H}
    cosets = {frozenset(mul[g][k] for k in K) for g in range(n)}
    pairs = []
    for J in subs_h:
        for C in cosets:
            g = min(C)
            if all(mul[mul[inv[g]][j]][g] in K for j in J):
                pairs.append((J, C))
    seen = set()
    reps = []
    for J, C in pairs:
        key = (tuple(sorted(J)), tuple(sorted(C)))
        if key in seen:
            continue
        orbit = set()
        for h in H:
            Jh = conjugate_set(mul, inv, h, J)
            Ch = frozenset(mul[h][c] for c in C)
            orbit.add((tuple(sorted(Jh)), tuple(sorted(Ch))))
        seen.update(orbit)
        reps.append(min((j, min(c)) for j, c in orbit))
    return sorted(reps)


def burnside_product_double_cosets(mul, J, L) -> dict[tuple[int, ...], int]:
    """[G/J]*[G/L] in the Burnside ring by the double coset formula.

    Returns a multiset keyed by sorted tuples of the subgroups J n gLg^-1,
    one per double coset JgL.
    """
    n = len(mul)
    inv = [inverse_of(mul, x) for x in range(n)]
    J = frozenset(J)
    L = frozenset(L)
    seen: set[int] = set()
    out: dict[tuple[int, ...], int] = {}
    for g in range(n):
        if g in seen:
            continue
        dc = {mul[mul[j][g]][l] for j in J for l in L}
        seen.update(dc)
        inter = tuple(sorted(x for x in J if mul[mul[inv[g]][x]][g] in L))
        out[inter] = out.get(inter, 0) + 1
    return out


def mark(mul, L, J) -> int:
    """Number of L-fixed points of G/J: #{xJ : LxJ = xJ}."""
    n = len(mul)
    J = frozenset(J)
    L = frozenset(L)
    count = 0
    seen = set()
    for x in range(n):
        coset = frozenset(mul[x][j] for j in J)
        if coset in seen:
            continue
        seen.add(coset)
        if all(frozenset(mul[l][c] for c in coset) == coset for l in L):
            count += 1
    return count
