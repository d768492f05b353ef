"""Spans of orbits: the morphism groups of the Burnside category of G.

Objects are conjugacy classes of subgroups of a fixed finite group,
identified with the orbits G/H for H the class representative chosen by
the subgroup lattice.  The morphism group from G/H to G/K is free
abelian on isomorphism classes of spans

    G/H  <--proj--  G/J  --(xJ |-> xgK)-->  G/K

recorded as pairs (J, g) with J <= H and g^-1 J g <= K.  Two pairs
describe isomorphic spans exactly when they lie in one orbit of the
H-action h.(J, gK) = (h J h^-1, h g K); we store the lexicographically
least representative, with g the least element of its coset.

A span acts on a Mackey functor contravariantly: the value map T(K) ->
T(H) restricts along the right leg and then transfers up the left leg.
Under this reading (J=e, g=e) from G/G to G/e is restriction to the
underlying abelian group and its transpose is the transfer.

Composition is computed from the literal pullback of G-sets, decomposed
into diagonal orbits; each orbit contributes its span once.  Linear
combinations of basis spans are plain dicts Span -> int.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import FiniteGroup, GSet, Orbit, SubgroupLattice

Subgroup = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Span:
    src: int
    tgt: int
    sub: Subgroup
    elt: int

    def __repr__(self):
        return f"Span({self.src}->{self.tgt}, J={self.sub}, g={self.elt})"


class OrbitCategory:
    """Basis enumeration, composition and transposition of spans."""

    def __init__(self, G: FiniteGroup, lattice: SubgroupLattice | None = None):
        self.G = G
        self.lat = lattice if lattice is not None else SubgroupLattice(G)
        self._basis: dict[tuple[int, int], tuple[Span, ...]] = {}
        self._compose: dict[tuple[Span, Span], dict[Span, int]] = {}
        self._atomic: tuple[Span, ...] | None = None

    @property
    def objects(self) -> range:
        return range(len(self.lat.class_reps))

    def rep(self, cls: int) -> Subgroup:
        return self.lat.class_reps[cls]

    def canonical(self, src: int, tgt: int, sub, elt: int) -> Span:
        """Least representative of the H-orbit of (sub, elt.K)."""
        G = self.G
        H = self.rep(src)
        K = self.rep(tgt)
        sub = tuple(sorted(sub))
        assert set(sub) <= set(H)
        # validity only depends on the coset elt.K
        Kset = set(K)
        gi = G.inv[elt]
        assert all(G.conj(gi, j) in Kset for j in sub), "right leg not a map"
        best = None
        for h in H:
            J2 = G.conj_subgroup(h, sub)
            hg = G.mul[h][elt]
            g2 = min(G.mul[hg][k] for k in K)
            cand = (J2, g2)
            if best is None or cand < best:
                best = cand
        return Span(src, tgt, best[0], best[1])

    def span_from_raw(self, H_lit, K_lit, sub, elt: int) -> Span:
        """Same span, but the legs land in literal subgroups of G.

        Conjugates everything onto the class representatives first: with
        a H a^-1 and b K b^-1 the representatives, (J, g) becomes
        (a J a^-1, a g b^-1).
        """
        G = self.G
        src, a = self.lat.class_of(H_lit)
        tgt, b = self.lat.class_of(K_lit)
        sub2 = G.conj_subgroup(a, sub)
        elt2 = G.mul[G.mul[a][elt]][G.inv[b]]
        return self.canonical(src, tgt, sub2, elt2)

    def identity(self, cls: int) -> Span:
        H = self.rep(cls)
        return self.canonical(cls, cls, H, 0)

    def basis(self, src: int, tgt: int) -> tuple[Span, ...]:
        key = (src, tgt)
        if key not in self._basis:
            G = self.G
            H, K = self.rep(src), self.rep(tgt)
            Kset = set(K)
            reps, _ = self.lat.coset_table(K)
            found = set()
            for J in self.lat.subgroups_of(H):
                for g in reps:
                    gi = G.inv[g]
                    if all(G.conj(gi, j) in Kset for j in J):
                        found.add(self.canonical(src, tgt, J, g))
            self._basis[key] = tuple(sorted(found))
        return self._basis[key]

    def compose(self, s: Span, t: Span) -> dict[Span, int]:
        """s after t, as a Z-combination of basis spans."""
        key = (s, t)
        cached = self._compose.get(key)
        if cached is not None:
            return dict(cached)
        assert t.tgt == s.src
        G, lat = self.G, self.lat
        K = self.rep(t.tgt)
        Kset = set(K)
        reps1, bel1 = lat.coset_table(t.sub)
        reps2, bel2 = lat.coset_table(s.sub)
        # pullback of xJ1 |-> x.g1.K against the projection of J2-cosets,
        # enumerated through whichever of K and the J2-cosets is smaller
        pts = []
        if len(K) <= len(reps2):
            for i, x in enumerate(reps1):
                xg = G.mul[x][t.elt]
                row = set()
                for k in K:
                    j = bel2[G.mul[xg][k]]
                    if j not in row:
                        row.add(j)
                        pts.append((i, j))
        else:
            for i, x in enumerate(reps1):
                xgi = G.inv[G.mul[x][t.elt]]
                for j, y in enumerate(reps2):
                    if G.mul[xgi][y] in Kset:
                        pts.append((i, j))
        out: dict[Span, int] = {}
        seen: set[tuple[int, int]] = set()
        gens = G.generators()
        for p in pts:
            if p in seen:
                continue
            seen.add(p)
            stack = [p]
            while stack:
                i, j = stack.pop()
                xi, yj = reps1[i], reps2[j]
                for g in gens:
                    q = (bel1[G.mul[g][xi]], bel2[G.mul[g][yj]])
                    if q not in seen:
                        seen.add(q)
                        stack.append(q)
            x0, y0 = reps1[p[0]], reps2[p[1]]
            z = G.mul[G.inv[x0]][y0]
            moved = set(G.conj_subgroup(z, s.sub))
            sub = tuple(j for j in t.sub if j in moved)
            sp = self.canonical(t.src, s.tgt, sub, G.mul[z][s.elt])
            out[sp] = out.get(sp, 0) + 1
        self._compose[key] = dict(out)
        return out

    def transpose(self, sp: Span) -> Span:
        """Reverse the span; at the Mackey level this swaps variance."""
        gi = self.G.inv[sp.elt]
        return self.canonical(sp.tgt, sp.src, self.G.conj_subgroup(gi, sp.sub), gi)


def lin(*pairs) -> dict[Span, int]:
    out: dict[Span, int] = {}
    for sp, c in pairs:
        if c:
            out[sp] = out.get(sp, 0) + c
    return {k: v for k, v in out.items() if v}


def lin_add(a: dict[Span, int], b: dict[Span, int], scale: int = 1) -> dict[Span, int]:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + scale * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def compose_lin(cat: OrbitCategory, a: dict[Span, int], b: dict[Span, int]) -> dict[Span, int]:
    """Bilinear extension of composition, a after b."""
    out: dict[Span, int] = {}
    for s, cs in a.items():
        for t, ct in b.items():
            for u, cu in cat.compose(s, t).items():
                w = out.get(u, 0) + cs * ct * cu
                if w:
                    out[u] = w
                else:
                    del out[u]
    return out


def transpose_lin(cat: OrbitCategory, a: dict[Span, int]) -> dict[Span, int]:
    out: dict[Span, int] = {}
    for sp, c in a.items():
        tp = cat.transpose(sp)
        out[tp] = out.get(tp, 0) + c
    return {k: v for k, v in out.items() if v}


def map_span(cat: OrbitCategory, H_lit, K_lit, g: int) -> Span:
    """Honest G-map G/H -> G/K, xH |-> xgK (needs g^-1 H g <= K)."""
    return cat.span_from_raw(H_lit, K_lit, tuple(H_lit), g)


def transfer_span(cat: OrbitCategory, K_lit, H_lit) -> Span:
    """Pure transfer G/K --> G/H for H <= K (identity right leg)."""
    assert set(H_lit) <= set(K_lit)
    return cat.span_from_raw(K_lit, H_lit, tuple(H_lit), 0)


def induce_span(big: OrbitCategory, emb, small: OrbitCategory, sp: Span) -> Span:
    """Image of a span under induction G x_K (-) along the embedding emb.

    emb lists the elements of the subgroup K inside G in the order used
    by the small group's multiplication table, so K/A goes to G/emb(A).
    """
    def lift(S):
        return tuple(sorted(emb[x] for x in S))

    return big.span_from_raw(
        lift(small.rep(sp.src)),
        lift(small.rep(sp.tgt)),
        lift(sp.sub),
        emb[sp.elt],
    )


def gset_span(cat: OrbitCategory, W: GSet, X: GSet, Y: GSet, lam, rho,
              w_orbit: Orbit, x_orbit: Orbit, y_orbit: Orbit) -> Span:
    """Span carried by one orbit of W under equivariant maps X <- W -> Y.

    lam and rho are point maps (sequences) and must be equivariant; the
    three orbits pick out the component of W and the target orbits of
    its images.  The result is the basis span from the class of
    x_orbit's stabilizer to the class of y_orbit's.
    """
    G = cat.G
    w0 = w_orbit.anchor
    assert lam[w0] in set(x_orbit.points) and rho[w0] in set(y_orbit.points)
    a = _writing_element(cat, x_orbit, lam[w0])
    b = _writing_element(cat, y_orbit, rho[w0])
    # anchors have their class representative as literal stabilizer
    S = cat.lat.class_reps[w_orbit.rep_class]
    ai = G.inv[a]
    return cat.span_from_raw(
        cat.lat.class_reps[x_orbit.rep_class],
        cat.lat.class_reps[y_orbit.rep_class],
        G.conj_subgroup(ai, S),
        G.mul[ai][b],
    )


def _writing_element(cat: OrbitCategory, orbit: Orbit, point: int) -> int:
    """Some g with g . anchor == point."""
    reps, _ = cat.lat.coset_table(cat.lat.class_reps[orbit.rep_class])
    return reps[orbit.point_of_coset.index(point)]


def is_atomic(cat: OrbitCategory, sp: Span) -> bool:
    """True when a leg of the span is an isomorphism.

    Left leg iso: sub is all of rep(src), an honest equivariant map.
    Right leg iso: |sub| = |rep(tgt)|, a pure transfer.
    """
    return len(sp.sub) == len(cat.rep(sp.src)) or len(sp.sub) == len(cat.rep(sp.tgt))


def atomic_spans(cat: OrbitCategory) -> tuple[Span, ...]:
    """All atomic basis spans, in a fixed deterministic order.

    These generate the category: see factor_span.  They are what functor
    checks, naturality constraints and coend relations range over.
    """
    if cat._atomic is None:
        out = []
        for a in cat.objects:
            for b in cat.objects:
                out.extend(sp for sp in cat.basis(a, b) if is_atomic(cat, sp))
        cat._atomic = tuple(out)
    return cat._atomic


def factor_span(cat: OrbitCategory, sp: Span) -> tuple[Span, Span]:
    """(honest, transfer) with compose(honest, transfer) == {sp: 1}.

    Every basis span splits through the class of its middle subgroup as a
    pure transfer followed by an honest map, with no collapse of the
    coefficient: the pullback of the two legs is a single orbit carrying
    the original span data.
    """
    H = cat.rep(sp.src)
    K = cat.rep(sp.tgt)
    transfer = transfer_span(cat, H, sp.sub)
    honest = cat.span_from_raw(sp.sub, K, sp.sub, sp.elt)
    return honest, transfer
