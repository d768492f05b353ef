"""Finite groups as multiplication tables, their subgroup lattices, and
finite G-sets with orbit decomposition.

Elements are integers 0..order-1 with 0 the identity, always.  Subgroups
are sorted tuples of elements containing 0.  Everything downstream keys
on these tuples, so the enumeration and ordering here fix the canonical
labels used across the whole package.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

Subgroup = tuple[int, ...]


class FiniteGroup:
    """An immutable finite group given by its multiplication table."""

    def __init__(self, mul: Sequence[Sequence[int]], label: str = "G"):
        self.mul = tuple(tuple(row) for row in mul)
        self.order = len(self.mul)
        self.label = label
        n = self.order
        assert n >= 1
        assert all(len(row) == n for row in self.mul)
        assert all(self.mul[0][x] == x and self.mul[x][0] == x for x in range(n)), \
            "element 0 must be the identity"
        inv = [None] * n
        for x in range(n):
            for y in range(n):
                if self.mul[x][y] == 0:
                    assert self.mul[y][x] == 0
                    inv[x] = y
                    break
            assert inv[x] is not None, "not a group: missing inverse"
        self.inv = tuple(inv)
        for x in range(n):
            assert sorted(self.mul[x]) == list(range(n)), "rows must be permutations"
        # spot-check associativity only for tiny groups; table constructors
        # below are associative by construction
        if n <= 8:
            for x in range(n):
                for y in range(n):
                    for z in range(n):
                        assert self.mul[self.mul[x][y]][z] == self.mul[x][self.mul[y][z]]

    def op(self, x: int, y: int) -> int:
        return self.mul[x][y]

    def conj(self, c: int, x: int) -> int:
        """c x c^-1."""
        return self.mul[self.mul[c][x]][self.inv[c]]

    def conj_subgroup(self, c: int, S: Iterable[int]) -> Subgroup:
        return tuple(sorted(self.conj(c, s) for s in S))

    def generators(self) -> tuple[int, ...]:
        """A small generating set, grown greedily by least element."""
        got = getattr(self, "_gens", None)
        if got is not None:
            return got
        gens: list[int] = []
        closure = {0}
        while len(closure) < self.order:
            gens.append(min(g for g in range(self.order) if g not in closure))
            closure = {0}
            stack = [0]
            while stack:
                y = stack.pop()
                for z in gens:
                    w = self.mul[y][z]
                    if w not in closure:
                        closure.add(w)
                        stack.append(w)
        self._gens = tuple(gens)
        return self._gens

    def __repr__(self):
        return f"FiniteGroup({self.label}, order={self.order})"


# ---------------------------------------------------------------------------
# constructors


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], f"Z/{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n.  Index i is r^i, n+i is r^i s."""
    assert n >= 2
    size = 2 * n

    def mul(a, b):
        ra, sa = a % n, a // n
        rb, sb = b % n, b // n
        if sa == 0:
            return ((ra + rb) % n) + n * sb
        # (r^a s)(r^b) = r^{a-b} s ;  (r^a s)(r^b s) = r^{a-b}
        return ((ra - rb) % n) + n * (1 - sb)

    return FiniteGroup([[mul(a, b) for b in range(size)] for a in range(size)], f"D{n}")


_QUAT = {  # basis products in {1, i, j, k}, with sign
    ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
    ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
    ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
}


def quaternion() -> FiniteGroup:
    """The quaternion group of order 8: 1, -1, i, -i, j, -j, k, -k."""
    names = [(1, "1"), (-1, "1"), (1, "i"), (-1, "i"), (1, "j"), (-1, "j"), (1, "k"), (-1, "k")]
    index = {nm: t for t, nm in enumerate(names)}

    def mul(a, b):
        sa, ba = names[a]
        sb, bb = names[b]
        if ba == "1":
            s, bc = sb, bb
        elif bb == "1":
            s, bc = sa, ba
        else:
            s, bc = _QUAT[(ba, bb)]
        sign = sa * sb * (s if ba != "1" and bb != "1" else 1)
        return index[(sign, bc)]

    return FiniteGroup([[mul(a, b) for b in range(8)] for a in range(8)], "Q8")


def symmetric(n: int) -> FiniteGroup:
    """S_n on lexicographically ordered permutations (identity first)."""
    perms = sorted(itertools.permutations(range(n)))
    index = {p: t for t, p in enumerate(perms)}
    # composition p o q acts as "q then p"
    table = [
        [index[tuple(p[q[x]] for x in range(n))] for q in perms]
        for p in perms
    ]
    return FiniteGroup(table, f"S{n}")


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], "1")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """G x H with pair (a, b) at index a * |H| + b."""
    nh = H.order
    size = G.order * nh
    table = [
        [G.mul[a // nh][b // nh] * nh + H.mul[a % nh][b % nh] for b in range(size)]
        for a in range(size)
    ]
    return FiniteGroup(table, f"{G.label}x{H.label}")


def from_generators(perms: Sequence[Sequence[int]], label: str = "G") -> FiniteGroup:
    """Group generated by permutations of 0..d-1, indexed in BFS order.

    The identity gets index 0; elements are discovered breadth-first,
    applying the generators in the order given, so indices are stable.
    """
    assert perms
    d = len(perms[0])
    gens = [tuple(p) for p in perms]
    assert all(sorted(p) == list(range(d)) for p in gens)
    ident = tuple(range(d))
    elems = [ident]
    index = {ident: 0}
    queue = [ident]
    while queue:
        cur = queue.pop(0)
        for g in gens:
            nxt = tuple(g[cur[x]] for x in range(d))
            if nxt not in index:
                index[nxt] = len(elems)
                elems.append(nxt)
                queue.append(nxt)
    n = len(elems)
    table = [
        [index[tuple(p[q[x]] for x in range(d))] for q in elems]
        for p in elems
    ]
    return FiniteGroup(table, label)


BUILTIN_GROUPS = {
    "trivial": trivial_group,
    "z2": lambda: cyclic(2),
    "z3": lambda: cyclic(3),
    "z4": lambda: cyclic(4),
    "z5": lambda: cyclic(5),
    "z6": lambda: cyclic(6),
    "z12": lambda: cyclic(12),
    "klein": lambda: direct_product(cyclic(2), cyclic(2)),
    "s3": lambda: symmetric(3),
    "d4": lambda: dihedral(4),
    "q8": quaternion,
}


def builtin_group(name: str) -> FiniteGroup:
    try:
        return BUILTIN_GROUPS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin group {name!r}; have {sorted(BUILTIN_GROUPS)}")


# ---------------------------------------------------------------------------
# subgroup lattice


class SubgroupLattice:
    """All subgroups of G, conjugacy classes, and canonical class labels.

    Class representatives are the lex-least sorted element tuples in each
    conjugacy class, listed by (order, tuple); their list index is the
    canonical object id used in serialization.
    """

    def __init__(self, G: FiniteGroup):
        self.G = G
        self._cosets: dict[Subgroup, tuple[list[int], list[int]]] = {}
        self.all_subgroups = self._enumerate()
        self._index = {S: i for i, S in enumerate(self.all_subgroups)}
        reps: list[Subgroup] = []
        conj: dict[Subgroup, tuple[int, int]] = {}
        for S in self.all_subgroups:
            if S in conj:
                continue
            orbit = {}
            for c in range(G.order):
                T = G.conj_subgroup(c, S)
                if T not in orbit:
                    orbit[T] = c
            rep = min(orbit)
            cls = len(reps)
            reps.append(rep)
            # store a conjugator c with c T c^-1 = rep for every member
            c_rep = orbit[rep]
            for T, c in orbit.items():
                # rep = c_rep S c_rep^-1 and T = c S c^-1, so rep = (c_rep c^-1) T (...)
                conj[T] = (cls, G.mul[c_rep][G.inv[c]])
        order = sorted(range(len(reps)), key=lambda i: (len(reps[i]), reps[i]))
        remap = {old: new for new, old in enumerate(order)}
        self.class_reps: list[Subgroup] = [reps[i] for i in order]
        self.conj_map: dict[Subgroup, tuple[int, int]] = {
            S: (remap[cls], c) for S, (cls, c) in conj.items()
        }
        for S, (cls, c) in self.conj_map.items():
            assert G.conj_subgroup(c, S) == self.class_reps[cls]

    def _enumerate(self) -> list[Subgroup]:
        # grow each known subgroup by one cyclic generator at a time; every
        # subgroup is reachable that way, and each closure is a cheap BFS
        G = self.G
        n = G.order
        cyclic_gens: dict[Subgroup, int] = {}
        for x in range(n):
            S = {0}
            y = x
            while y not in S:
                S.add(y)
                y = G.mul[y][x]
            cyclic_gens.setdefault(tuple(sorted(S)), x)

        def close(gens: Sequence[int]) -> Subgroup:
            seen = {0}
            frontier = [0]
            while frontier:
                y = frontier.pop()
                for x in gens:
                    z = G.mul[y][x]
                    if z not in seen:
                        seen.add(z)
                        frontier.append(z)
            return tuple(sorted(seen))

        found: dict[Subgroup, tuple[int, ...]] = {S: (g,) for S, g in cyclic_gens.items()}
        found.setdefault((0,), ())
        work = list(found.items())
        while work:
            S, gens = work.pop()
            Sset = set(S)
            for x in cyclic_gens.values():
                if x in Sset:
                    continue
                T = close(gens + (x,))
                if T not in found:
                    found[T] = gens + (x,)
                    work.append((T, gens + (x,)))
        return sorted(found, key=lambda S: (len(S), S))

    def class_of(self, S: Iterable[int]) -> tuple[int, int]:
        """(class index, conjugator c) with c S c^-1 = class_reps[index]."""
        return self.conj_map[tuple(sorted(S))]

    def rep(self, S: Iterable[int]) -> Subgroup:
        return self.class_reps[self.conj_map[tuple(sorted(S))][0]]

    def subgroups_of(self, H: Subgroup) -> list[Subgroup]:
        Hset = set(H)
        return [S for S in self.all_subgroups if set(S) <= Hset]

    def is_normal(self, S: Subgroup) -> bool:
        G = self.G
        return all(G.conj_subgroup(c, S) == tuple(S) for c in range(G.order))

    def normalizer(self, S: Subgroup) -> Subgroup:
        G = self.G
        T = tuple(sorted(S))
        return tuple(c for c in range(G.order) if G.conj_subgroup(c, T) == T)

    def weyl_order(self, S: Subgroup) -> int:
        return len(self.normalizer(S)) // len(S)

    def coset_table(self, H: Subgroup) -> tuple[list[int], list[int]]:
        """(sorted min-element coset reps, element -> coset index)."""
        key = tuple(H)
        got = self._cosets.get(key)
        if got is not None:
            return got
        G = self.G
        assert all(G.mul[a][b] in set(H) for a in H for b in H), "not a subgroup"
        belongs = [None] * G.order
        reps = []
        for g in range(G.order):
            if belongs[g] is None:
                idx = len(reps)
                reps.append(g)
                for h in H:
                    belongs[G.mul[g][h]] = idx
        self._cosets[key] = (reps, belongs)
        return reps, belongs

    def double_cosets(self, H: Subgroup, K: Subgroup) -> list[int]:
        """Min-element representatives of H\\G/K, in increasing order."""
        G = self.G
        seen = [False] * G.order
        reps = []
        for g in range(G.order):
            if seen[g]:
                continue
            reps.append(g)
            for h in H:
                hg = G.mul[h][g]
                for k in K:
                    seen[G.mul[hg][k]] = True
        return reps


def subgroup_as_group(G: FiniteGroup, H: Subgroup) -> tuple[FiniteGroup, list[int]]:
    """(H as a standalone group, embedding index -> element of G).

    Elements keep their increasing order in G, so the identity lands at 0.
    """
    emb = sorted(H)
    assert emb[0] == 0
    pos = {g: i for i, g in enumerate(emb)}
    table = [[pos[G.mul[a][b]] for b in emb] for a in emb]
    return FiniteGroup(table, f"{G.label}|{len(emb)}"), emb


def quotient_group(G: FiniteGroup, K: Subgroup) -> tuple[FiniteGroup, list[int]]:
    """(G/K for normal K, projection element -> coset index).

    Cosets are ordered by their least element; the identity coset is 0.
    """
    assert all(G.conj_subgroup(c, K) == tuple(sorted(K)) for c in range(G.order)), "K must be normal"
    belongs = [None] * G.order
    reps = []
    for g in range(G.order):
        if belongs[g] is None:
            idx = len(reps)
            reps.append(g)
            for k in K:
                belongs[G.mul[g][k]] = idx
    table = [[belongs[G.mul[a][b]] for b in reps] for a in reps]
    return FiniteGroup(table, f"{G.label}/{len(K)}"), belongs


# ---------------------------------------------------------------------------
# G-sets


class GSet:
    """A finite left G-set: act[g][x] is g . x."""

    def __init__(self, G: FiniteGroup, act: Sequence[Sequence[int]], labels=None):
        self.G = G
        self.act = tuple(tuple(row) for row in act)
        assert len(self.act) == G.order
        self.size = len(self.act[0]) if self.act else 0
        assert all(len(row) == self.size for row in self.act)
        assert self.act[0] == tuple(range(self.size)), "identity must act trivially"
        for g in range(G.order):
            for h in range(G.order):
                gh = G.mul[g][h]
                if any(self.act[gh][x] != self.act[g][self.act[h][x]] for x in range(self.size)):
                    raise AssertionError("not an action")
        self.labels = list(labels) if labels is not None else list(range(self.size))

    def stabilizer(self, x: int) -> Subgroup:
        return tuple(g for g in range(self.G.order) if self.act[g][x] == x)

    def orbit(self, x: int) -> list[int]:
        return sorted({self.act[g][x] for g in range(self.G.order)})


def coset_gset(G: FiniteGroup, lattice: SubgroupLattice, H: Subgroup) -> GSet:
    """G/H as a G-set on coset indices (cosets ordered by least element)."""
    reps, belongs = lattice.coset_table(H)
    act = [[belongs[G.mul[g][r]] for r in reps] for g in range(G.order)]
    return GSet(G, act, labels=reps)


def product_gset(X: GSet, Y: GSet) -> GSet:
    """X x Y with the diagonal action; point (x, y) at index x * |Y| + y."""
    G = X.G
    assert Y.G is G or Y.G.mul == G.mul
    ny = Y.size
    act = [
        [X.act[g][p // ny] * ny + Y.act[g][p % ny] for p in range(X.size * ny)]
        for g in range(G.order)
    ]
    return GSet(G, act, labels=[(xl, yl) for xl in X.labels for yl in Y.labels])


class Orbit:
    """One orbit of a G-set with its canonical identification G/R -> orbit.

    ``rep_class``/``conjugator`` name the stabilizer's conjugacy class:
    conjugator c satisfies c . stab(base) . c^-1 = class rep R, and then
    ``anchor`` = c . base has stabilizer exactly R, so g R -> g . anchor
    is the explicit isomorphism recorded by ``point_of_coset``.
    """

    def __init__(self, gset: GSet, lattice: SubgroupLattice, base: int):
        G = gset.G
        self.base = base
        self.points = gset.orbit(base)
        stab = gset.stabilizer(base)
        self.stabilizer = stab
        cls, c = lattice.class_of(stab)
        self.rep_class = cls
        self.conjugator = c
        R = lattice.class_reps[cls]
        self.anchor = gset.act[c][base]
        assert gset.stabilizer(self.anchor) == R
        reps, belongs = lattice.coset_table(R)
        self.point_of_coset = [gset.act[r][self.anchor] for r in reps]
        assert sorted(self.point_of_coset) == self.points


def decompose_orbits(gset: GSet, lattice: SubgroupLattice) -> list[Orbit]:
    """Orbits by increasing least point, each with its explicit G/R iso."""
    seen = set()
    out = []
    for x in range(gset.size):
        if x in seen:
            continue
        orb = Orbit(gset, lattice, x)
        seen.update(orb.points)
        out.append(orb)
    return out
