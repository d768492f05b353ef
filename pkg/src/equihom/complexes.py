"""Finite G-CW complexes with orbit cells and span-valued boundaries.

A complex stores, per integer degree, a list of cell orbits (classes in
the subgroup lattice) and boundary matrices whose entries are formal
Z-combinations of basis spans.  Homology against a coefficient functor
collapses each level through the Yoneda identification, so the chain
groups are plain presented abelian groups and all the equivariance
lives in the boundary entries.

Degrees are geometric.  Structures built from a dual decomposition of a
manifold keep that convention; the twisting of their non-trivially
oriented cells is absorbed into the boundary entries, which is why a
validator pass and the homology of the underlying complex are the
arbiters of correctness here, not the raw incidence geometry.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence

from .abelian import AbMap, FgAbGroup, direct_sum, homology_pair, zeros
from .groups import Orbit, builtin_group, coset_gset
from .spans import (
    OrbitCategory,
    Span,
    compose_lin,
    gset_span,
    induce_span,
    map_span,
    transfer_span,
)
from .mackey import (
    MackeyFunctor,
    NotNormal,
    _product_span,
    fixed_quotient,
    pair_class,
    product_category,
    product_orbit_data,
    quotient_category,
    restrict_group,
    subgroup_category,
    times_orbit_matrix,
    unit_class,
)

Lin = dict[Span, int]


class NotAComplex(Exception):
    """The boundary data fails a shape or d-squared check."""


class UnsupportedGroup(Exception):
    """A builder was asked for a group it is not defined over."""


class InvalidSubgroup(Exception):
    """A subgroup argument does not satisfy the operation's hypothesis."""


class UnknownExample(Exception):
    """No library structure under the requested name."""


def lin_add(a: Lin, b: Lin, scale: int = 1) -> Lin:
    out = dict(a)
    for sp, c in b.items():
        v = out.get(sp, 0) + scale * c
        if v:
            out[sp] = v
        else:
            out.pop(sp, None)
    return out


# ---------------------------------------------------------------------------
# the complex itself


class CellComplex:
    """Cells per degree and span-valued boundary matrices.

    cells[n] lists the class of each cell orbit in degree n; diffs[n] is
    a len(cells[n]) x len(cells[n-1]) matrix of span combinations, the
    entry at (i, j) being the component of the boundary of cell i on
    cell j.  Spans in that entry run from cells[n][i] to cells[n-1][j].
    """

    def __init__(self, cat: OrbitCategory, cells: dict[int, Sequence[int]],
                 diffs: dict[int, Sequence[Sequence[Lin]]] | None = None,
                 name: str = ""):
        self.cat = cat
        self.cells = {n: list(cs) for n, cs in cells.items() if cs}
        self.diffs = {}
        for n, M in (diffs or {}).items():
            self.diffs[n] = [[dict(e) for e in row] for row in M]
        self.name = name

    def degrees(self) -> list[int]:
        return sorted(self.cells)

    def top_degree(self) -> int:
        return max(self.cells, default=-1)

    def entry(self, n: int, i: int, j: int) -> Lin:
        M = self.diffs.get(n)
        return M[i][j] if M else {}

    def cell_counts(self) -> dict[int, int]:
        return {n: len(cs) for n, cs in sorted(self.cells.items())}

    def __repr__(self):
        counts = ", ".join(f"{n}:{len(cs)}" for n, cs in sorted(self.cells.items()))
        label = self.name or "complex"
        return f"CellComplex<{label} over {self.cat.G.label}; {counts}>"


def _subconjugate(cat: OrbitCategory, small: int, big: int) -> bool:
    cache = cat.__dict__.setdefault("_subconj", {})
    got = cache.get((small, big))
    if got is None:
        K = cat.rep(small)
        A = set(cat.rep(big))
        G = cat.G
        got = any(set(G.conj_subgroup(g, K)) <= A for g in range(G.order))
        cache[(small, big)] = got
    return got


def dimension_function(X: CellComplex) -> dict[int, int]:
    """Largest degree of a cell fixed by each class, -1 for empty."""
    dims = {}
    for k in X.cat.objects:
        best = -1
        for n, cs in X.cells.items():
            if n > best and any(_subconjugate(X.cat, k, a) for a in cs):
                best = n
        dims[k] = best
    return dims


def _fixed_coset_count(cat: OrbitCategory, k: int, a: int) -> int:
    # cosets rA fixed by rep(k), i.e. with K contained in rAr^-1
    K = set(cat.rep(k))
    A = cat.rep(a)
    reps, _ = cat.lat.coset_table(A)
    G = cat.G
    return sum(1 for r in reps if K <= set(G.conj_subgroup(r, A)))


def euler_characteristics(X: CellComplex) -> dict[int, int]:
    """Euler characteristic of each fixed subcomplex, by class."""
    out = {}
    for k in X.cat.objects:
        chi = 0
        for n, cs in X.cells.items():
            for a in cs:
                chi += (-1) ** n * _fixed_coset_count(X.cat, k, a)
        out[k] = chi
    return out


def validate_complex(X: CellComplex) -> dict:
    """Shape and d-squared checks; raises NotAComplex with a witness."""
    cat = X.cat
    for n, M in X.diffs.items():
        src = X.cells.get(n, [])
        tgt = X.cells.get(n - 1, [])
        if len(M) != len(src) or any(len(row) != len(tgt) for row in M):
            raise NotAComplex(f"boundary matrix at degree {n} has the wrong shape")
        for i, row in enumerate(M):
            for j, e in enumerate(row):
                for sp in e:
                    if sp.src != src[i] or sp.tgt != tgt[j]:
                        raise NotAComplex(
                            f"entry ({n},{i},{j}) holds a span "
                            f"{sp.src}->{sp.tgt}, expected {src[i]}->{tgt[j]}")
    for n in sorted(X.diffs):
        upper = X.diffs.get(n)
        lower = X.diffs.get(n - 1)
        if not upper or not lower:
            continue
        for i in range(len(upper)):
            for k in range(len(lower[0]) if lower else 0):
                total: Lin = {}
                for j in range(len(lower)):
                    if upper[i][j] and lower[j][k]:
                        total = lin_add(
                            total, compose_lin(cat, lower[j][k], upper[i][j]))
                if total:
                    raise NotAComplex(
                        f"d.d is nonzero at degree {n}, cells ({i},{k}): {total}")
    return {
        "group": cat.G.label,
        "cells": X.cell_counts(),
        "dims": dimension_function(X),
        "top_degree": X.top_degree(),
    }


# ---------------------------------------------------------------------------
# homology and cohomology


class GradedAbGroups:
    """Groups indexed by integer degree, zero off support."""

    def __init__(self, groups: dict[int, FgAbGroup]):
        self._groups = dict(groups)

    def __getitem__(self, n: int) -> FgAbGroup:
        return self._groups.get(n, FgAbGroup(0))

    def degrees(self) -> list[int]:
        return sorted(self._groups)

    def canonical(self) -> dict[int, tuple]:
        out = {}
        for n in sorted(self._groups):
            form = self._groups[n].canonical_form()
            if form != (0, ()):
                out[n] = form
        return out

    def same_as(self, other: "GradedAbGroups") -> bool:
        return self.canonical() == other.canonical()

    def __repr__(self):
        body = ", ".join(f"{n}: {g!r}" for n, g in sorted(self._groups.items())
                         if g.canonical_form() != (0, ()))
        return "GradedAbGroups{" + body + "}"


def _chain_group(X: CellComplex, F: MackeyFunctor, n: int):
    return direct_sum([F.value(c) for c in X.cells.get(n, [])])


def _boundary_map(X: CellComplex, S: MackeyFunctor, n: int,
                  Dn, off_n, Dm, off_m) -> AbMap:
    """d_n as an AbMap, covariant coefficients."""
    M = zeros(Dm.ngens, Dn.ngens)
    for i in range(len(X.cells.get(n, []))):
        for j in range(len(X.cells.get(n - 1, []))):
            lin = X.entry(n, i, j)
            if not lin:
                continue
            blk = S.act_lin(lin)
            for r in range(len(blk)):
                for c in range(len(blk[0]) if blk else 0):
                    if blk[r][c]:
                        M[off_m[j] + r][off_n[i] + c] = blk[r][c]
    return AbMap(Dn, Dm, M)


def homology(X: CellComplex, S: MackeyFunctor) -> GradedAbGroups:
    """Graded homology with covariant coefficients.

    The chain group in degree n is the sum of S at the cell classes; a
    boundary entry acts through S, the span direction matching the
    covariant action, so no transposition happens anywhere.
    """
    assert S.variance == "covariant", "homology takes a covariant functor"
    if not X.cells:
        return GradedAbGroups({})
    lo, hi = min(X.cells), max(X.cells)
    D = {n: _chain_group(X, S, n) for n in range(lo - 1, hi + 2)}
    maps = {}
    for n in range(lo, hi + 2):
        (Dn, off_n), (Dm, off_m) = D[n], D[n - 1]
        maps[n] = _boundary_map(X, S, n, Dn, off_n, Dm, off_m)
    return GradedAbGroups(
        {n: homology_pair(maps[n], maps[n + 1]) for n in range(lo, hi + 1)})


def cohomology(X: CellComplex, T: MackeyFunctor) -> GradedAbGroups:
    """Graded cohomology with contravariant coefficients."""
    assert T.variance == "contravariant", "cohomology takes a contravariant functor"
    if not X.cells:
        return GradedAbGroups({})
    lo, hi = min(X.cells), max(X.cells)
    C = {n: _chain_group(X, T, n) for n in range(lo - 1, hi + 2)}
    maps = {}
    for n in range(lo, hi + 2):
        # the delta into degree n lays the boundary matrix out
        # transposed; blocks still act by the spans themselves
        (Cn, off_n), (Cm, off_m) = C[n], C[n - 1]
        M = zeros(Cn.ngens, Cm.ngens)
        for i in range(len(X.cells.get(n, []))):
            for j in range(len(X.cells.get(n - 1, []))):
                lin = X.entry(n, i, j)
                if not lin:
                    continue
                blk = T.act_lin(lin)
                for r in range(len(blk)):
                    for c in range(len(blk[0]) if blk else 0):
                        if blk[r][c]:
                            M[off_n[i] + r][off_m[j] + c] = blk[r][c]
        maps[n] = AbMap(Cm, Cn, M)
    return GradedAbGroups(
        {n: homology_pair(maps[n + 1], maps[n]) for n in range(lo, hi + 1)})


# ---------------------------------------------------------------------------
# builders


def orbit_complex(cat: OrbitCategory, cls: int, name: str = "") -> CellComplex:
    if not 0 <= cls < len(cat.objects):
        raise InvalidSubgroup(f"no class {cls} in {cat.G.label}")
    return CellComplex(cat, {0: [cls]}, name=name or f"orbit({cls})")


def _is_cyclic(G) -> bool:
    if G.order == 1:
        return True
    for g in range(1, G.order):
        x, k = g, 1
        while x != 0:
            x = G.mul[x][g]
            k += 1
        if k == G.order:
            return True
    return False


def sphere_char(cat: OrbitCategory, k: int) -> CellComplex:
    """Unit sphere of the character g -> exp(2 pi i g k / n) of a cyclic group.

    Real-valued characters give a 0-sphere (two fixed points for the
    trivial one, one swapped pair of points for a sign); the rest give
    the circle of the kernel's cosets, the boundary of the edge orbit
    being one step of the deck rotation minus the identity.
    """
    G = cat.G
    n = G.order
    if not _is_cyclic(G):
        raise UnsupportedGroup(f"{G.label} is not cyclic")
    k %= n
    u = unit_class(cat)
    if k == 0:
        return CellComplex(cat, {0: [u, u]}, name="sphere_char(0)")
    ker = tuple(sorted(g for g in range(n) if (g * k) % n == 0))
    kcls, _ = cat.lat.class_of(ker)
    if (2 * k) % n == 0:
        return CellComplex(cat, {0: [kcls]}, name=f"sphere_char({k})")
    d = gcd(n, k)
    step = next(g for g in range(1, n) if (g * k) % n == d)
    rot = map_span(cat, ker, ker, step)
    ident = cat.identity(kcls)
    return CellComplex(
        cat,
        {0: [kcls], 1: [kcls]},
        {1: [[{rot: 1, ident: -1}]]},
        name=f"sphere_char({k})",
    )


def trivial_sphere(cat: OrbitCategory, n: int) -> CellComplex:
    if n < 0:
        raise ValueError("trivial_sphere wants n >= 0")
    u = unit_class(cat)
    X = CellComplex(cat, {0: [u, u]}, name="trivial_sphere(0)")
    for i in range(n):
        X = suspension(X)
        X.name = f"trivial_sphere({i + 1})"
    return X


def _collapse_span(cat: OrbitCategory, cls: int) -> Span:
    return map_span(cat, cat.rep(cls), cat.rep(unit_class(cat)), 0)


def suspension(X: CellComplex) -> CellComplex:
    """Two cone points and every cell shifted up a degree.

    A suspended 0-cell runs from the south pole to the north one, so its
    boundary is the difference of the two collapse maps; higher cells
    keep their old boundary.  The construction needs the old boundary to
    be augmented (coefficient sums vanish on 0-cells), which holds for
    every structure built here and is what d-squared checks downstream.
    """
    cat = X.cat
    if X.cells and min(X.cells) < 0:
        raise NotAComplex("suspension wants a non-negatively graded complex")
    u = unit_class(cat)
    cells: dict[int, list[int]] = {0: [u, u]}
    for n, cs in X.cells.items():
        cells[n + 1] = list(cs)
    diffs: dict[int, list[list[Lin]]] = {}
    if 0 in X.cells:
        diffs[1] = [
            [{_collapse_span(cat, a): -1}, {_collapse_span(cat, a): 1}]
            for a in X.cells[0]
        ]
    for n, M in X.diffs.items():
        diffs[n + 1] = [[dict(e) for e in row] for row in M]
    return CellComplex(cat, cells, diffs,
                       name=f"suspension({X.name})" if X.name else "")


def _factor_projection(cat: OrbitCategory, a: int, b: int, oi: int,
                       side: str) -> Span:
    """Collapse of one orbit of G/rep(a) x G/rep(b) onto a factor.

    The target orbit is anchored at the trivial coset so the span lands
    in the tautological presentation a bare cell of that class carries.
    """
    X, orbs, _ = product_orbit_data(cat, a, b)
    nb = len(cat.lat.coset_table(cat.rep(b))[0])
    lam = list(range(X.size))
    if side == "second":
        Yg = coset_gset(cat.G, cat.lat, cat.rep(b))
        rho = [p % nb for p in range(X.size)]
    else:
        Yg = coset_gset(cat.G, cat.lat, cat.rep(a))
        rho = [p // nb for p in range(X.size)]
    y_orbit = Orbit(Yg, cat.lat, 0)
    return gset_span(cat, X, X, Yg, lam, rho, orbs[oi], orbs[oi], y_orbit)


def join(X: CellComplex, Y: CellComplex) -> CellComplex:
    """The join, with one product cell per orbit of each pair of cells.

    Boundaries follow the augmented Leibniz rule: crossing a boundary
    span with the fixed other cell spreads it over the product orbits,
    and the two ends of a piece with a 0-cell factor collapse onto the
    bare cells of the other side.
    """
    assert X.cat is Y.cat, "join needs complexes over one group"
    cat = X.cat

    cells: dict[int, list] = {}

    def slot(r):
        return cells.setdefault(r, [])

    for n, cs in X.cells.items():
        slot(n).extend(("x", n, i) for i in range(len(cs)))
    for n, cs in Y.cells.items():
        slot(n).extend(("y", n, j) for j in range(len(cs)))
    for p in sorted(X.cells):
        for q in sorted(Y.cells):
            for i, a in enumerate(X.cells[p]):
                for j, b in enumerate(Y.cells[q]):
                    _, orbs, _ = product_orbit_data(cat, a, b)
                    slot(p + q + 1).extend(
                        ("xy", p, i, q, j, oi) for oi in range(len(orbs)))

    index = {n: {tag: pos for pos, tag in enumerate(tags)}
             for n, tags in cells.items()}

    def cls_of(tag) -> int:
        if tag[0] == "x":
            return X.cells[tag[1]][tag[2]]
        if tag[0] == "y":
            return Y.cells[tag[1]][tag[2]]
        _, p, i, q, j, oi = tag
        _, orbs, _ = product_orbit_data(cat, X.cells[p][i], Y.cells[q][j])
        return orbs[oi].rep_class

    diffs: dict[int, list[list[Lin]]] = {}
    for r, tags in cells.items():
        below = cells.get(r - 1)
        if not below:
            continue
        M = [[{} for _ in below] for _ in tags]

        def put(row, tag, lin, scale=1):
            col = index[r - 1][tag]
            M[row][col] = lin_add(M[row][col], lin, scale)

        for row, tag in enumerate(tags):
            if tag[0] == "x":
                _, p, i = tag
                for j2 in range(len(X.cells.get(p - 1, []))):
                    e = X.entry(p, i, j2)
                    if e:
                        put(row, ("x", p - 1, j2), e)
            elif tag[0] == "y":
                _, q, j = tag
                for j2 in range(len(Y.cells.get(q - 1, []))):
                    e = Y.entry(q, j, j2)
                    if e:
                        put(row, ("y", q - 1, j2), e)
            else:
                _, p, i, q, j, oi = tag
                a, b = X.cells[p][i], Y.cells[q][j]
                sign = -1 if p % 2 == 0 else 1  # (-1)^(p+1)
                if p >= 1:
                    for i2 in range(len(X.cells.get(p - 1, []))):
                        for sp, c in X.entry(p, i, i2).items():
                            for (xi, yi), lin in times_orbit_matrix(
                                    cat, sp, b, "left").items():
                                if xi == oi:
                                    put(row, ("xy", p - 1, i2, q, j, yi), lin, c)
                else:
                    put(row, ("y", q, j),
                        {_factor_projection(cat, a, b, oi, "second"): 1})
                if q >= 1:
                    for j2 in range(len(Y.cells.get(q - 1, []))):
                        for sp, c in Y.entry(q, j, j2).items():
                            for (xi, yi), lin in times_orbit_matrix(
                                    cat, sp, a, "right").items():
                                if xi == oi:
                                    put(row, ("xy", p, i, q - 1, j2, yi),
                                        lin, sign * c)
                else:
                    put(row, ("x", p, i),
                        {_factor_projection(cat, a, b, oi, "first"): sign})
        diffs[r] = M

    out = CellComplex(
        cat, {n: [cls_of(t) for t in tags] for n, tags in cells.items()}, diffs)
    out.name = f"join({X.name},{Y.name})" if X.name and Y.name else ""
    return out


def external_product(X: CellComplex, Y: CellComplex) -> CellComplex:
    """X x Y over the product group, Leibniz boundary."""
    pcat = product_category(X.cat, Y.cat)
    cells: dict[int, list] = {}
    for p in sorted(X.cells):
        for q in sorted(Y.cells):
            cells.setdefault(p + q, []).extend(
                (p, i, q, j)
                for i in range(len(X.cells[p]))
                for j in range(len(Y.cells[q])))
    index = {n: {tag: pos for pos, tag in enumerate(tags)}
             for n, tags in cells.items()}

    def cls_of(tag):
        p, i, q, j = tag
        return pair_class(pcat, X.cells[p][i], Y.cells[q][j])

    diffs: dict[int, list[list[Lin]]] = {}
    for r, tags in cells.items():
        below = cells.get(r - 1)
        if not below:
            continue
        M = [[{} for _ in below] for _ in tags]
        for row, (p, i, q, j) in enumerate(tags):
            sign = 1 if p % 2 == 0 else -1
            for i2 in range(len(X.cells.get(p - 1, []))):
                for sp, c in X.entry(p, i, i2).items():
                    psp = _product_span(pcat, sp, Y.cells[q][j], "left")
                    col = index[r - 1][(p - 1, i2, q, j)]
                    M[row][col] = lin_add(M[row][col], {psp: c})
            for j2 in range(len(Y.cells.get(q - 1, []))):
                for sp, c in Y.entry(q, j, j2).items():
                    psp = _product_span(pcat, sp, X.cells[p][i], "right")
                    col = index[r - 1][(p, i, q - 1, j2)]
                    M[row][col] = lin_add(M[row][col], {psp: sign * c})
        diffs[r] = M

    out = CellComplex(
        pcat, {n: [cls_of(t) for t in tags] for n, tags in cells.items()}, diffs)
    out.name = f"external({X.name},{Y.name})" if X.name and Y.name else ""
    return out


def induced_complex(X: CellComplex) -> CellComplex:
    """G x_K X for a complex over a subgroup category."""
    small = X.cat
    parent = getattr(small, "parent", None)
    if parent is None:
        raise InvalidSubgroup("complex does not live over a subgroup category")
    big, emb = parent

    def up(cls: int) -> int:
        lit = tuple(sorted(emb[x] for x in small.rep(cls)))
        return big.lat.class_of(lit)[0]

    cells = {n: [up(c) for c in cs] for n, cs in X.cells.items()}
    diffs = {}
    for n, M in X.diffs.items():
        out = []
        for row in M:
            orow = []
            for e in row:
                lin: Lin = {}
                for sp, c in e.items():
                    bsp = induce_span(big, emb, small, sp)
                    lin[bsp] = lin.get(bsp, 0) + c
                orow.append({k: v for k, v in lin.items() if v})
            out.append(orow)
        diffs[n] = out
    out = CellComplex(big, cells, diffs)
    out.name = f"induced({X.name})" if X.name else ""
    return out


def wedge(X: CellComplex, Y: CellComplex) -> CellComplex:
    """One-point union at the first fixed 0-cell of each side."""
    assert X.cat is Y.cat
    u = unit_class(X.cat)

    def base(Z):
        for i, c in enumerate(Z.cells.get(0, [])):
            if c == u:
                return i
        raise NotAComplex("wedge needs a fixed 0-cell on each side")

    bx, by = base(X), base(Y)
    cells: dict[int, list[int]] = {}
    for n in sorted(set(X.cells) | set(Y.cells)):
        xs = list(X.cells.get(n, []))
        ys = list(Y.cells.get(n, []))
        if n == 0:
            ys = [c for j, c in enumerate(ys) if j != by]
        cells[n] = xs + ys

    def ycol(j: int) -> int:
        # column of Y-cell j of degree 0 after dropping the basepoint
        if j == by:
            return bx
        shift = len(X.cells.get(0, []))
        return shift + (j if j < by else j - 1)

    diffs: dict[int, list[list[Lin]]] = {}
    for n in sorted(set(X.diffs) | set(Y.diffs)):
        nx = len(X.cells.get(n, []))
        rows = len(cells.get(n, []))
        cols = len(cells.get(n - 1, []))
        if not rows or not cols:
            continue
        M = [[{} for _ in range(cols)] for _ in range(rows)]
        for i, row in enumerate(X.diffs.get(n, [])):
            for j, e in enumerate(row):
                if e:
                    M[i][j] = dict(e)
        for i, row in enumerate(Y.diffs.get(n, [])):
            for j, e in enumerate(row):
                if not e:
                    continue
                col = ycol(j) if n - 1 == 0 else len(X.cells.get(n - 1, [])) + j
                M[nx + i][col] = lin_add(M[nx + i][col], e)
        diffs[n] = M
    out = CellComplex(X.cat, cells, diffs)
    out.name = f"wedge({X.name},{Y.name})" if X.name and Y.name else ""
    return out


def disjoint_union(X: CellComplex, Y: CellComplex) -> CellComplex:
    assert X.cat is Y.cat
    cells = {}
    for n in sorted(set(X.cells) | set(Y.cells)):
        cells[n] = list(X.cells.get(n, [])) + list(Y.cells.get(n, []))
    diffs = {}
    for n in sorted(set(X.diffs) | set(Y.diffs)):
        rows = len(cells.get(n, []))
        cols = len(cells.get(n - 1, []))
        if not rows or not cols:
            continue
        M = [[{} for _ in range(cols)] for _ in range(rows)]
        for i, row in enumerate(X.diffs.get(n, [])):
            for j, e in enumerate(row):
                if e:
                    M[i][j] = dict(e)
        ox, oy = len(X.cells.get(n, [])), len(X.cells.get(n - 1, []))
        for i, row in enumerate(Y.diffs.get(n, [])):
            for j, e in enumerate(row):
                if e:
                    M[ox + i][oy + j] = dict(e)
        diffs[n] = M
    out = CellComplex(X.cat, cells, diffs)
    out.name = f"disjoint({X.name},{Y.name})" if X.name and Y.name else ""
    return out


# ---------------------------------------------------------------------------
# change of group and fixed points


def wirthmuller_check(X: CellComplex, F: MackeyFunctor) -> dict:
    """Induction against restriction, degree by degree.

    X lives over a subgroup category of F's group; the homology of the
    induced complex with F matches the homology of X with F restricted.
    Works for either variance; the report records both sides.
    """
    small = X.cat
    parent = getattr(small, "parent", None)
    if parent is None:
        raise InvalidSubgroup("complex does not live over a subgroup category")
    big, emb = parent
    assert F.category is big
    K_lit = tuple(sorted(emb))
    Z = induced_complex(X)
    R = restrict_group(F, K_lit, check=False)
    if F.variance == "covariant":
        HG = homology(Z, F)
        HK = homology(X, R)
    else:
        HG = cohomology(Z, F)
        HK = cohomology(X, R)
    return {
        "group": big.G.label,
        "subgroup_order": len(K_lit),
        "big": HG.canonical(),
        "small": HK.canonical(),
        "ok": HG.same_as(HK),
    }


def _quotient_span(cat: OrbitCategory, qcat: OrbitCategory, sp: Span) -> Span:
    _, _, belongs = qcat.inflation_parent

    def down(M):
        return tuple(sorted({belongs[g] for g in M}))

    return qcat.span_from_raw(
        down(cat.rep(sp.src)), down(cat.rep(sp.tgt)), down(sp.sub),
        belongs[sp.elt])


def fixed_point_complex(X: CellComplex, K) -> CellComplex:
    """The K-fixed subcomplex over the quotient group, K normal.

    Cells whose class does not contain K disappear; a boundary span
    survives exactly when its middle subgroup contains K, in which case
    it descends to the quotient category.  Composites through dropped
    cells have small middles, so d-squared survives the passage.
    """
    cat = X.cat
    K_lit = tuple(sorted(cat.rep(K) if isinstance(K, int) else K))
    if not cat.lat.is_normal(K_lit):
        raise NotNormal(f"subgroup of order {len(K_lit)} is not normal")
    qcat = quotient_category(cat, K_lit)
    Kset = set(K_lit)

    keep = {n: [i for i, c in enumerate(cs) if Kset <= set(cat.rep(c))]
            for n, cs in X.cells.items()}
    cells = {n: [qcat.class_of_big[X.cells[n][i]] for i in ks]
             for n, ks in keep.items() if ks}
    diffs = {}
    for n, M in X.diffs.items():
        rows, cols = keep.get(n, []), keep.get(n - 1, [])
        if not rows or not cols:
            continue
        out = []
        for i in rows:
            orow = []
            for j in cols:
                lin: Lin = {}
                for sp, c in M[i][j].items():
                    if Kset <= set(sp.sub):
                        qsp = _quotient_span(cat, qcat, sp)
                        lin[qsp] = lin.get(qsp, 0) + c
                orow.append({k: v for k, v in lin.items() if v})
            out.append(orow)
        diffs[n] = out
    Z = CellComplex(qcat, cells, diffs)
    Z.name = f"fixed({X.name})" if X.name else ""
    Z.kept_cells = keep
    Z.parent_complex = X
    return Z


def fixed_restriction_check(X: CellComplex, K, S: MackeyFunctor) -> dict:
    """Chain-level naturality of the fixed-point passage.

    The levelwise quotient of a covariant S by its below-K part is a
    chain map from the chains of X to the chains of the fixed complex;
    this verifies the squares commute in every degree and reports the
    two homologies.
    """
    assert S.variance == "covariant"
    cat = X.cat
    K_lit = tuple(sorted(cat.rep(K) if isinstance(K, int) else K))
    Z = fixed_point_complex(X, K_lit)
    fq = fixed_quotient(S, K_lit, check=False)
    SK = fq.functor
    comp = fq.projection.components

    def proj_map(n):
        DX, offX = _chain_group(X, S, n)
        DZ, offZ = _chain_group(Z, SK, n)
        P = zeros(DZ.ngens, DX.ngens)
        for zi, i in enumerate(Z.kept_cells.get(n, [])):
            blk = comp[X.cells[n][i]]
            for r in range(len(blk)):
                for c in range(len(blk[0]) if blk else 0):
                    P[offZ[zi] + r][offX[i] + c] = blk[r][c]
        return AbMap(DX, DZ, P), (DX, offX), (DZ, offZ)

    degrees = sorted(set(X.cells) | set(Z.cells))
    ok = True
    if degrees:
        lo, hi = degrees[0], degrees[-1]
        prev = proj_map(lo - 1)
        for n in range(lo, hi + 1):
            cur = proj_map(n)
            dX = _boundary_map(X, S, n, cur[1][0], cur[1][1],
                               prev[1][0], prev[1][1])
            dZ = _boundary_map(Z, SK, n, cur[2][0], cur[2][1],
                               prev[2][0], prev[2][1])
            if not prev[0].compose(dX).equals(dZ.compose(cur[0])):
                ok = False
            prev = cur
    HX = homology(X, S)
    HZ = homology(Z, SK)
    return {
        "commutes": ok,
        "ambient": HX.canonical(),
        "fixed": HZ.canonical(),
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# the underlying nonequivariant complex


_TRIVIAL_CAT: OrbitCategory | None = None


def _trivial_category() -> OrbitCategory:
    global _TRIVIAL_CAT
    if _TRIVIAL_CAT is None:
        _TRIVIAL_CAT = OrbitCategory(builtin_group("trivial"))
    return _TRIVIAL_CAT


def _span_coset_matrix(cat: OrbitCategory, sp: Span) -> list[list[int]]:
    """Integer matrix of a span on cosets: sum over the middle's fibers."""
    cache = cat.__dict__.setdefault("_coset_mats", {})
    got = cache.get(sp)
    if got is None:
        G = cat.G
        reps_j, _ = cat.lat.coset_table(sp.sub)
        reps_a, bel_a = cat.lat.coset_table(cat.rep(sp.src))
        reps_b, bel_b = cat.lat.coset_table(cat.rep(sp.tgt))
        M = zeros(len(reps_b), len(reps_a))
        for y in reps_j:
            M[bel_b[G.mul[y][sp.elt]]][bel_a[y]] += 1
        got = M
        cache[sp] = got
    return got


def underlying_complex(X: CellComplex) -> CellComplex:
    """Forget the action: one cell per coset, boundaries by counting.

    The result lives over the trivial group, so the classical chain
    homology of the space drops out of the same homology routine.
    """
    cat = X.cat
    tcat = _trivial_category()
    idsp = tcat.identity(0)
    sizes = {n: [len(cat.lat.coset_table(cat.rep(c))[0]) for c in cs]
             for n, cs in X.cells.items()}
    offs = {}
    for n, szs in sizes.items():
        offs[n] = []
        at = 0
        for s in szs:
            offs[n].append(at)
            at += s
        offs[n].append(at)
    cells = {n: [0] * offs[n][-1] for n in sizes}
    diffs = {}
    for n, M in X.diffs.items():
        rows = offs.get(n, [0])[-1]
        cols = offs.get(n - 1, [0])[-1]
        if not rows or not cols:
            continue
        mat = [[0] * cols for _ in range(rows)]
        for i, row in enumerate(M):
            for j, e in enumerate(row):
                for sp, c in e.items():
                    blk = _span_coset_matrix(cat, sp)
                    # blk maps the source cell's cosets to the target's
                    for r in range(len(blk)):
                        for cc in range(len(blk[0]) if blk else 0):
                            if blk[r][cc]:
                                mat[offs[n][i] + cc][offs[n - 1][j] + r] += (
                                    c * blk[r][cc])
        diffs[n] = [[({idsp: v} if v else {}) for v in row] for row in mat]
    out = CellComplex(tcat, cells, diffs)
    out.name = f"underlying({X.name})" if X.name else ""
    return out


# ---------------------------------------------------------------------------
# expression builder and the library


def build(cat: OrbitCategory, expr: str) -> CellComplex:
    """Build a complex from a prefix expression.

    Grammar: NAME or NAME(arg, ...); arguments are integers or nested
    expressions.  induced(K, E) builds E over the subgroup category of
    class K and pushes it up.  example(NAME) loads a library structure.
    """
    expr = expr.strip()
    name, args = _parse_call(expr)
    if name == "orbit":
        (k,) = _ints(args, 1, expr)
        return orbit_complex(cat, k)
    if name == "sphere_char":
        (k,) = _ints(args, 1, expr)
        return sphere_char(cat, k)
    if name == "trivial_sphere":
        (n,) = _ints(args, 1, expr)
        if n < 0:
            raise ValueError("trivial_sphere wants n >= 0")
        return trivial_sphere(cat, n)
    if name == "suspension":
        _arity(args, 1, expr)
        return suspension(build(cat, args[0]))
    if name == "join":
        _arity(args, 2, expr)
        return join(build(cat, args[0]), build(cat, args[1]))
    if name == "wedge":
        _arity(args, 2, expr)
        return wedge(build(cat, args[0]), build(cat, args[1]))
    if name == "disjoint_union":
        _arity(args, 2, expr)
        return disjoint_union(build(cat, args[0]), build(cat, args[1]))
    if name == "induced":
        _arity(args, 2, expr)
        try:
            k = int(args[0])
        except ValueError:
            raise ValueError(f"induced wants a class index, got {args[0]!r}")
        if not 0 <= k < len(cat.objects):
            raise InvalidSubgroup(f"no class {k} in {cat.G.label}")
        small = subgroup_category(cat, cat.rep(k))
        return induced_complex(build(small, args[1]))
    if name == "example":
        _arity(args, 1, expr)
        X = example_complex(args[0])
        if X.cat.G.label != cat.G.label:
            raise ValueError(
                f"library structure {args[0]!r} lives over {X.cat.G.label}")
        return X
    raise ValueError(f"unknown builder {name!r} in {expr!r}")


def _parse_call(expr: str) -> tuple[str, list[str]]:
    if "(" not in expr:
        if not expr.isidentifier():
            raise ValueError(f"bad expression {expr!r}")
        return expr, []
    if not expr.endswith(")"):
        raise ValueError(f"unbalanced call in {expr!r}")
    name, _, rest = expr.partition("(")
    name = name.strip()
    if not name.isidentifier():
        raise ValueError(f"bad builder name in {expr!r}")
    body = rest[:-1]
    args: list[str] = []
    depth, cur = 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {expr!r}")
        if ch == "," and depth == 0:
            args.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced parentheses in {expr!r}")
    tail = "".join(cur).strip()
    if tail:
        args.append(tail)
    elif args:
        raise ValueError(f"trailing comma in {expr!r}")
    return name, args


def _arity(args: list[str], n: int, expr: str):
    if len(args) != n:
        raise ValueError(f"{expr!r} wants {n} argument(s), got {len(args)}")


def _ints(args: list[str], n: int, expr: str) -> list[int]:
    _arity(args, n, expr)
    try:
        return [int(a) for a in args]
    except ValueError:
        raise ValueError(f"{expr!r} wants integer argument(s)")


# ---------------------------------------------------------------------------
# library structures


def example_complex(name: str) -> CellComplex:
    """Library structures used by the duality checks.

    Each ordinary structure has a partner built on the dual cells of a
    triangulation, graded by geometric dimension; the boundary entries
    of the dual cells absorb the orientation twisting, which is why
    fixed cells there bound differences of transfers.
    """
    maker = _LIBRARY.get(name)
    if maker is None:
        raise UnknownExample(
            f"no structure called {name!r}; have {sorted(_LIBRARY)}")
    X = maker()
    X.name = name
    return X


def _z2_cat() -> OrbitCategory:
    return OrbitCategory(builtin_group("z2"))


def _z3_cat() -> OrbitCategory:
    return OrbitCategory(builtin_group("z3"))


def _lib_s_sigma() -> CellComplex:
    cat = _z2_cat()
    return suspension(sphere_char(cat, 1))


def _lib_s_sigma_dual() -> CellComplex:
    cat = _z2_cat()
    u, f = unit_class(cat), 0
    tau = transfer_span(cat, cat.rep(u), cat.rep(f))
    return CellComplex(cat, {0: [f], 1: [u, u]},
                       {1: [[{tau: -1}], [{tau: 1}]]})


def _lib_s_2sigma() -> CellComplex:
    cat = _z2_cat()
    return suspension(join(sphere_char(cat, 1), sphere_char(cat, 1)))


def _lib_s_2sigma_dual() -> CellComplex:
    cat = _z2_cat()
    u, f = unit_class(cat), 0
    e = cat.rep(f)
    tau = transfer_span(cat, cat.rep(u), e)
    ident = cat.identity(f)
    g = map_span(cat, e, e, 1)
    return CellComplex(
        cat,
        {0: [f, f], 1: [f, f], 2: [u, u]},
        {
            1: [
                [{ident: -1}, {ident: 1}],
                [{ident: 1}, {g: -1}],
            ],
            2: [
                [{tau: 1}, {tau: 1}],
                [{tau: -1}, {tau: -1}],
            ],
        },
    )


def _lib_s_lambda() -> CellComplex:
    cat = _z3_cat()
    return suspension(sphere_char(cat, 1))


def _lib_s_lambda_dual() -> CellComplex:
    cat = _z3_cat()
    u, f = unit_class(cat), 0
    e = cat.rep(f)
    tau = transfer_span(cat, cat.rep(u), e)
    ident = cat.identity(f)
    g2 = map_span(cat, e, e, 2)
    return CellComplex(
        cat,
        {0: [f], 1: [f], 2: [u, u]},
        {
            1: [[{ident: 1, g2: -1}]],
            2: [[{tau: 1}], [{tau: -1}]],
        },
    )


def _lib_torus_z2() -> CellComplex:
    # antipodal rotation on the torus: two fixed vertices, two fixed
    # edges joining them, the other vertex/edge/face orbits free
    cat = _z2_cat()
    u, f = unit_class(cat), 0
    pi = _collapse_span(cat, f)
    return CellComplex(
        cat,
        {0: [u, u], 1: [u, u, f], 2: [f]},
        {
            1: [
                [{}, {}],
                [{}, {}],
                [{pi: -1}, {pi: 1}],
            ],
            2: [[{pi: -1}, {pi: 1}, {}]],
        },
    )


def _lib_torus_z2_dual() -> CellComplex:
    cat = _z2_cat()
    u, f = unit_class(cat), 0
    tau = transfer_span(cat, cat.rep(u), cat.rep(f))
    return CellComplex(
        cat,
        {0: [f], 1: [u, u, f], 2: [u, u]},
        {
            1: [
                [{tau: -1}],
                [{tau: -1}],
                [{}],
            ],
            2: [
                [{}, {}, {tau: 1}],
                [{}, {}, {tau: -1}],
            ],
        },
    )


_LIBRARY = {
    "S_sigma": _lib_s_sigma,
    "S_sigma_dual": _lib_s_sigma_dual,
    "S_2sigma": _lib_s_2sigma,
    "S_2sigma_dual": _lib_s_2sigma_dual,
    "S_lambda": _lib_s_lambda,
    "S_lambda_dual": _lib_s_lambda_dual,
    "torus_z2": _lib_torus_z2,
    "torus_z2_dual": _lib_torus_z2_dual,
}

DUAL_PAIRS = {
    "S_sigma": "S_sigma_dual",
    "S_2sigma": "S_2sigma_dual",
    "S_lambda": "S_lambda_dual",
    "torus_z2": "torus_z2_dual",
}


def library_names() -> list[str]:
    return sorted(_LIBRARY)
