"""Mackey functors on the span category and their tensor algebra.

A functor assigns a finitely generated abelian group to every subgroup
conjugacy class and a matrix to every basis span.  Orientation, fixed
once and used everywhere:

* contravariant T: a span sp from src to tgt acts T(tgt) -> T(src);
* covariant S: the same span acts S(src) -> S(tgt);
* compose(s, t) is "t then s", so a contravariant functor satisfies
  act(compose(s, t)) = act(t) . act(s), a covariant one the mirror.

Only atomic spans carry independent data.  Every basis span factors as
an honest map after a pure transfer with coefficient one (a tested fact
of the category, see spans.factor_span), so actions of the remaining
spans are derived by that factorization, and functoriality checks,
naturality constraints and coend relations range over atomic spans only;
the composite cases telescope.

Values live at class representatives.  Constructions that build values
as big presentations (induction, box and mixed products, fixed-point
quotients) shrink them with presented_group and conjugate all span data
onto class representatives through the lattice's conjugators.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .abelian import (
    AbMap,
    FgAbGroup,
    Subquotient,
    TensorGroup,
    Vec,
    direct_sum,
    hnf_columns,
    identity as identity_matrix,
    kernel_congruence,
    mat_mul,
    mat_vec,
    presented_group,
    reduce_mod_hnf,
    zeros,
)
from .groups import (
    coset_gset,
    decompose_orbits,
    direct_product,
    product_gset,
    quotient_group,
    subgroup_as_group,
)
from .spans import (
    OrbitCategory,
    Span,
    atomic_spans,
    factor_span,
    gset_span,
    induce_span,
    is_atomic,
)

VARIANCES = ("contravariant", "covariant")


class FunctorialityFailure(Exception):
    """A span action table is not a functor; carries the witness spans."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotNormal(ValueError):
    """Raised when a fixed-point construction is fed a non-normal subgroup."""


def _cache(obj, name: str) -> dict:
    d = getattr(obj, name, None)
    if d is None:
        d = {}
        setattr(obj, name, d)
    return d


def _shaped(M, rows: int, cols: int):
    """Fix up degenerate shapes from matrix products through zero groups."""
    if len(M) == rows and (rows == 0 or len(M[0]) == cols):
        return M
    assert all(not any(r) for r in M)
    return zeros(rows, cols)


class MackeyFunctor:
    """Span-category functor with values at class reps, actions as matrices.

    ``action`` needs entries for the identity and atomic spans only; the
    rest are derived on demand by factoring through the middle subgroup.
    """

    def __init__(self, variance: str, category: OrbitCategory, values, action, check: bool = True):
        assert variance in VARIANCES
        self.variance = variance
        self.category = category
        self.values = list(values)
        assert len(self.values) == len(category.lat.class_reps)
        self.action: dict[Span, list[list[int]]] = dict(action)
        if check:
            self.validate()

    def value(self, cls: int) -> FgAbGroup:
        return self.values[cls]

    def shape(self, sp: Span) -> tuple[int, int]:
        """(rows, cols) of the action matrix of sp."""
        a, b = self.value(sp.src).ngens, self.value(sp.tgt).ngens
        return (a, b) if self.variance == "contravariant" else (b, a)

    def act(self, sp: Span):
        M = self.action.get(sp)
        if M is None:
            honest, transfer = factor_span(self.category, sp)
            assert honest != sp and transfer != sp, f"missing atomic action for {sp}"
            if self.variance == "contravariant":
                M = mat_mul(self.act(transfer), self.act(honest))
            else:
                M = mat_mul(self.act(honest), self.act(transfer))
            M = _shaped(M, *self.shape(sp))
            self.action[sp] = M
        return M

    def act_lin(self, lin: dict[Span, int], src: int | None = None, tgt: int | None = None):
        """Action of a Z-combination of parallel basis spans."""
        if not lin:
            assert src is not None and tgt is not None
            fake = Span(src, tgt, (), 0)
            return zeros(*self.shape(fake))
        out = None
        for sp, c in lin.items():
            M = self.act(sp)
            if out is None:
                out = [[c * v for v in row] for row in M]
            else:
                for i, row in enumerate(M):
                    orow = out[i]
                    for j, v in enumerate(row):
                        if v:
                            orow[j] += c * v
        return out

    def act_map(self, sp: Span) -> AbMap:
        if self.variance == "contravariant":
            return AbMap(self.value(sp.tgt), self.value(sp.src), self.act(sp))
        return AbMap(self.value(sp.src), self.value(sp.tgt), self.act(sp))

    def validate(self, deep: bool = False) -> None:
        """Check identities, well-definedness and functoriality.

        The pair check runs over (s basis, t atomic), which suffices: both
        factors of any basis span are atomic, and composites telescope
        through the category's associativity.  ``deep`` widens t to every
        basis span.
        """
        cat = self.category
        for cls in cat.objects:
            ide = cat.identity(cls)
            val = self.value(cls)
            ident = AbMap(val, val, identity_matrix(val.ngens))
            if not AbMap(val, val, self.act(ide)).equals(ident):
                raise FunctorialityFailure(f"identity of class {cls} does not act as identity", (ide,))
        atoms = atomic_spans(cat)
        for sp in atoms:
            if not self.act_map(sp).well_defined():
                raise FunctorialityFailure(f"action of {sp} not well defined", (sp,))
        firsts = atoms if not deep else [
            sp for a in cat.objects for b in cat.objects for sp in cat.basis(a, b)
        ]
        contra = self.variance == "contravariant"
        for t in firsts:
            for c in cat.objects:
                for s in cat.basis(t.tgt, c):
                    comp = cat.compose(s, t)
                    left = self.act_lin(comp, src=t.src, tgt=c)
                    if contra:
                        right = _shaped(mat_mul(self.act(t), self.act(s)), *self.shape(Span(t.src, c, (), 0)))
                        src_val, tgt_val = self.value(c), self.value(t.src)
                    else:
                        right = _shaped(mat_mul(self.act(s), self.act(t)), *self.shape(Span(t.src, c, (), 0)))
                        src_val, tgt_val = self.value(t.src), self.value(c)
                    if not AbMap(src_val, tgt_val, left).equals(AbMap(src_val, tgt_val, right)):
                        raise FunctorialityFailure(
                            f"functoriality fails on {s} after {t}", (s, t))

    def __repr__(self):
        forms = ", ".join(repr(v) for v in self.values)
        return f"MackeyFunctor<{self.variance}; {forms}>"


class NatTransf:
    """Natural transformation between same-variance functors.

    ``components[cls]`` is a matrix from source.value(cls) to
    target.value(cls); naturality is checked on atomic spans, which
    implies it for all spans by the factorization argument.
    """

    def __init__(self, source: MackeyFunctor, target: MackeyFunctor, components, check: bool = True):
        assert source.variance == target.variance
        assert source.category is target.category
        self.source = source
        self.target = target
        self.components = [
            [list(row) for row in M] for M in components
        ]
        if check:
            self.validate()

    def component(self, cls: int) -> AbMap:
        return AbMap(self.source.value(cls), self.target.value(cls), self.components[cls])

    def validate(self) -> None:
        cat = self.source.category
        for cls in cat.objects:
            if not self.component(cls).well_defined():
                raise FunctorialityFailure(f"component at class {cls} not well defined", (cls,))
        contra = self.source.variance == "contravariant"
        for sp in atomic_spans(cat):
            a, b = sp.src, sp.tgt
            if contra:
                left = mat_mul(self.components[a], self.source.act(sp))
                right = mat_mul(self.target.act(sp), self.components[b])
                src_val, tgt_val = self.source.value(b), self.target.value(a)
            else:
                left = mat_mul(self.components[b], self.source.act(sp))
                right = mat_mul(self.target.act(sp), self.components[a])
                src_val, tgt_val = self.source.value(a), self.target.value(b)
            rows = tgt_val.ngens
            cols = src_val.ngens
            left = _shaped(left, rows, cols)
            right = _shaped(right, rows, cols)
            if not AbMap(src_val, tgt_val, left).equals(AbMap(src_val, tgt_val, right)):
                raise FunctorialityFailure(f"naturality fails at {sp}", (sp,))

    def is_isomorphism(self) -> bool:
        from .abelian import is_isomorphism
        return all(is_isomorphism(self.component(c)) for c in self.source.category.objects)


# ---------------------------------------------------------------------------
# builtins


def unit_class(cat: OrbitCategory) -> int:
    """The class of the full subgroup, the unit object G/G."""
    cls = len(cat.lat.class_reps) - 1
    assert len(cat.rep(cls)) == cat.G.order
    return cls


def point_class(cat: OrbitCategory) -> int:
    """The class of the trivial subgroup, the free orbit G/e."""
    assert cat.rep(0) == (0,)
    return 0


def free_functor(cat: OrbitCategory, variance: str, a: int) -> MackeyFunctor:
    """The representable functor at class a.

    Contravariant: value at b is free on basis(b, a), spans act by
    precomposition.  Covariant: free on basis(a, b), postcomposition.
    No functoriality check is run: the actions are literal composition,
    so the check would re-prove the category's associativity.
    """
    key = (variance, a)
    cache = _cache(cat, "_free_functors")
    if key in cache:
        return cache[key]
    contra = variance == "contravariant"
    bases = [cat.basis(b, a) if contra else cat.basis(a, b) for b in cat.objects]
    index = [{sp: i for i, sp in enumerate(bs)} for bs in bases]
    values = [FgAbGroup(len(bs)) for bs in bases]
    action = {}
    for src in cat.objects:
        for tgt in cat.objects:
            for sp in cat.basis(src, tgt):
                if contra:
                    M = zeros(len(bases[src]), len(bases[tgt]))
                    for j, f in enumerate(bases[tgt]):
                        for u, c in cat.compose(f, sp).items():
                            M[index[src][u]][j] += c
                else:
                    M = zeros(len(bases[tgt]), len(bases[src]))
                    for j, f in enumerate(bases[src]):
                        for u, c in cat.compose(sp, f).items():
                            M[index[tgt][u]][j] += c
                action[sp] = M
    F = MackeyFunctor(variance, cat, values, action, check=False)
    F.free_on = a
    F.free_basis = bases
    F.free_index = index
    cache[key] = F
    return F


def zero_functor(cat: OrbitCategory, variance: str) -> MackeyFunctor:
    values = [FgAbGroup(0) for _ in cat.objects]
    action = {}
    for a in cat.objects:
        for b in cat.objects:
            for sp in cat.basis(a, b):
                action[sp] = []
    return MackeyFunctor(variance, cat, values, action, check=False)


def burnside_functor(cat: OrbitCategory, variance: str) -> MackeyFunctor:
    return free_functor(cat, variance, unit_class(cat))


def constant_functor(cat: OrbitCategory, variance: str) -> MackeyFunctor:
    """Z at every level; restrictions are the identity, transfers the index.

    A span acts by the index of its middle subgroup in the rep of the
    level the transfer lands in, so the double coset relation becomes a
    counting identity (checked here like for any other functor).
    """
    values = [FgAbGroup(1) for _ in cat.objects]
    action = {}
    for a in cat.objects:
        for b in cat.objects:
            for sp in cat.basis(a, b):
                level = sp.src if variance == "contravariant" else sp.tgt
                action[sp] = [[len(cat.rep(level)) // len(sp.sub)]]
    return MackeyFunctor(variance, cat, values, action)


def builtin_functor(cat: OrbitCategory, name: str, variance: str) -> MackeyFunctor:
    makers = {
        "burnside": burnside_functor,
        "constant_Z": constant_functor,
        "zero": zero_functor,
    }
    if name not in makers:
        raise ValueError(f"unknown builtin functor {name!r}; have {sorted(makers)}")
    return makers[name](cat, variance)


def transpose_functor(T: MackeyFunctor) -> MackeyFunctor:
    """Same values, spans act through their transposes; flips variance."""
    cat = T.category
    variance = "covariant" if T.variance == "contravariant" else "contravariant"
    action = {}
    for sp in atomic_spans(cat):
        action[sp] = T.act(cat.transpose(sp))
    return MackeyFunctor(variance, cat, list(T.values), action, check=False)


# ---------------------------------------------------------------------------
# compression, sums, quotients


def compress(T: MackeyFunctor, check: bool = True):
    """(functor with canonical values, projections, lifts).

    proj[cls] carries old coordinates to the canonical generators and
    lift[cls] is a section, exact on generators.
    """
    cat = T.category
    values, projs, lifts = [], [], []
    for cls in cat.objects:
        v = T.value(cls)
        canon, proj, lift = presented_group(v.ngens, v.relations)
        values.append(canon)
        projs.append(proj)
        lifts.append(lift)
    action = {}
    for sp in atomic_spans(cat):
        if T.variance == "contravariant":
            s, t = sp.tgt, sp.src
        else:
            s, t = sp.src, sp.tgt
        M = mat_mul(projs[t], mat_mul(T.act(sp), lifts[s]))
        action[sp] = _shaped(M, values[t].ngens, values[s].ngens)
    F = MackeyFunctor(T.variance, cat, values, action, check=check)
    return F, projs, lifts


def direct_sum_functor(parts: Sequence[MackeyFunctor]):
    """(sum functor, offsets per class), block-diagonal actions."""
    assert parts
    cat = parts[0].category
    variance = parts[0].variance
    assert all(p.category is cat and p.variance == variance for p in parts)
    values, offsets = [], []
    for cls in cat.objects:
        g, off = direct_sum([p.value(cls) for p in parts])
        values.append(g)
        offsets.append(off)
    action = {}
    for sp in atomic_spans(cat):
        if variance == "contravariant":
            s, t = sp.tgt, sp.src
        else:
            s, t = sp.src, sp.tgt
        M = zeros(values[t].ngens, values[s].ngens)
        for k, p in enumerate(parts):
            B = p.act(sp)
            ro, co = offsets[t][k], offsets[s][k]
            for i, row in enumerate(B):
                for j, v in enumerate(row):
                    if v:
                        M[ro + i][co + j] = v
        action[sp] = M
    return MackeyFunctor(variance, cat, values, action, check=False), offsets


def span_closure(T: MackeyFunctor, elements: dict[int, list[Sequence[int]]]) -> list[list[Vec]]:
    """Per-class lattice basis of the subfunctor generated by elements.

    Applies atomic span actions until the spanned lattices stabilize.
    """
    cat = T.category
    lat = [hnf_columns([tuple(v) for v in elements.get(cls, [])], T.value(cls).ngens)
           for cls in cat.objects]
    changed = True
    while changed:
        changed = False
        for sp in atomic_spans(cat):
            if T.variance == "contravariant":
                s, t = sp.tgt, sp.src
            else:
                s, t = sp.src, sp.tgt
            if not lat[s]:
                continue
            M = T.act(sp)
            new = [mat_vec(M, v) for v in lat[s]]
            merged = hnf_columns(list(lat[t]) + new, T.value(t).ngens)
            if merged != lat[t]:
                lat[t] = merged
                changed = True
    return lat


def quotient_functor(T: MackeyFunctor, elements: dict[int, list[Sequence[int]]]) -> MackeyFunctor:
    """T modulo the subfunctor generated by the given elements, compressed."""
    cat = T.category
    closure = span_closure(T, elements)
    values = [
        FgAbGroup(T.value(cls).ngens, list(T.value(cls).relations) + [tuple(v) for v in closure[cls]])
        for cls in cat.objects
    ]
    action = {sp: T.act(sp) for sp in atomic_spans(cat)}
    raw = MackeyFunctor(T.variance, cat, values, action, check=False)
    return compress(raw)[0]


def cokernel_functor(phi: NatTransf) -> MackeyFunctor:
    """Cokernel of a natural transformation, with canonical values."""
    T = phi.target
    cat = T.category
    elements = {
        cls: [tuple(phi.components[cls][i][j] for i in range(T.value(cls).ngens))
              for j in range(phi.source.value(cls).ngens)]
        for cls in cat.objects
    }
    # image columns are already span-closed, but closure is cheap and safe
    return quotient_functor(T, elements)


# ---------------------------------------------------------------------------
# hom and tensor


class MackeyHom:
    """Group of natural transformations with explicit generators.

    ``generators[k]`` is the NatTransf lifting the k-th canonical
    generator of ``group``; express() gives canonical coordinates of any
    transformation between the same functors.
    """

    def __init__(self, source: MackeyFunctor, target: MackeyFunctor, sq: Subquotient, layout):
        self.source = source
        self.target = target
        self._sq = sq
        self._layout = layout
        self.group = sq.group
        self.generators = [
            NatTransf(source, target, self._unflatten(vec), check=True)
            for vec in sq.generator_lifts()
        ]

    def _unflatten(self, vec: Sequence[int]):
        off, dims = self._layout
        comps = []
        for cls, (nt, nu) in enumerate(dims):
            M = zeros(nu, nt)
            base = off[cls]
            for i in range(nu):
                for j in range(nt):
                    M[i][j] = vec[base + i * nt + j]
            comps.append(M)
        return comps

    def express(self, nat: NatTransf) -> Vec:
        """Canonical coordinates of a transformation T -> U."""
        off, dims = self._layout
        flat = [0] * self._sq.n
        for cls, (nt, nu) in enumerate(dims):
            base = off[cls]
            for i in range(nu):
                for j in range(nt):
                    flat[base + i * nt + j] = nat.components[cls][i][j]
        return self._sq.express(flat)

    def canonical_form(self):
        return self.group.canonical_form()


def hom_mackey(T: MackeyFunctor, U: MackeyFunctor) -> MackeyHom:
    """All natural transformations T -> U, solved exactly.

    Unknowns are the entries of one matrix per class; constraints are
    well-definedness on source relations plus naturality over atomic
    spans, solved as a kernel with slack in the target relation lattices.
    Two solutions are identified when they agree as maps levelwise.
    """
    assert T.category is U.category and T.variance == U.variance
    cat = T.category
    contra = T.variance == "contravariant"
    dims = [(T.value(c).ngens, U.value(c).ngens) for c in cat.objects]
    off = []
    total = 0
    for nt, nu in dims:
        off.append(total)
        total += nt * nu
    layout = (off, dims)

    def eidx(cls, i, j):
        return off[cls] + i * dims[cls][0] + j

    # each block is a run of equation groups against one target value; a
    # group is tgt.ngens consecutive rows stating that one map-equation
    # column lands in the relation lattice of that value
    blocks = []
    for b in cat.objects:
        nt, nu = dims[b]
        rels = T.value(b).relations
        if nu and rels:
            rows = []
            for r in rels:
                for i in range(nu):
                    row = [0] * total
                    for j in range(nt):
                        if r[j]:
                            row[eidx(b, i, j)] = r[j]
                    rows.append(row)
            blocks.append((rows, U.value(b)))
    for sp in atomic_spans(cat):
        a, b = sp.src, sp.tgt
        P = T.act(sp)
        Q = U.act(sp)
        if contra:
            # M_a . P = Q . M_b as maps T(b) -> U(a)
            ncols, nrows = dims[b][0], dims[a][1]
            rows = []
            for j in range(ncols):
                for i in range(nrows):
                    row = [0] * total
                    for k in range(dims[a][0]):
                        if P[k][j]:
                            row[eidx(a, i, k)] += P[k][j]
                    for l in range(dims[b][1]):
                        if Q[i][l]:
                            row[eidx(b, l, j)] -= Q[i][l]
                    rows.append(row)
            if rows:
                blocks.append((rows, U.value(a)))
        else:
            # M_b . P = Q . M_a as maps T(a) -> U(b)
            ncols, nrows = dims[a][0], dims[b][1]
            rows = []
            for j in range(ncols):
                for i in range(nrows):
                    row = [0] * total
                    for k in range(dims[b][0]):
                        if P[k][j]:
                            row[eidx(b, i, k)] += P[k][j]
                    for l in range(dims[a][1]):
                        if Q[i][l]:
                            row[eidx(a, l, j)] -= Q[i][l]
                    rows.append(row)
            if rows:
                blocks.append((rows, U.value(b)))

    # rewrite each group in the canonical coordinates of its target value:
    # membership in the relation lattice decouples into one congruence per
    # coordinate, which the kernel pass can fold in without slack columns
    all_rows = []
    mods = []
    for rows, tgt in blocks:
        nu = tgt.ngens
        assert nu and len(rows) % nu == 0
        cong = tgt.congruence_rows()
        for g in range(0, len(rows), nu):
            grp = rows[g:g + nu]
            for urow, m in cong:
                row = [0] * total
                for i, u in enumerate(urow):
                    if u:
                        gr = grp[i]
                        for j, x in enumerate(gr):
                            if x:
                                row[j] += u * x
                if any(row):
                    all_rows.append(row)
                    mods.append(m)
    denom = []
    for b in cat.objects:
        nt, nu = dims[b]
        for rel in U.value(b).relations:
            for j in range(nt):
                vec = [0] * total
                for i in range(nu):
                    if rel[i]:
                        vec[eidx(b, i, j)] = rel[i]
                denom.append(vec)
    dh = hnf_columns(denom, total)

    ker = kernel_congruence(all_rows, mods, total)
    # solutions are only needed modulo the zero maps, so shrink them first
    numer = hnf_columns(
        [reduce_mod_hnf(v, dh) for v in ker] + dh, total)
    sq = Subquotient(total, numer, denom)
    return MackeyHom(T, U, sq, layout)


class TensorMackey:
    """Coend of a contravariant against a covariant functor.

    ``project(cls, x, y)`` gives the canonical coordinates of the class
    of the pure tensor x (x) y sitting at the given level.
    """

    def __init__(self, group: FgAbGroup, proj, offsets, tensors, total: int):
        self.group = group
        self._proj = proj
        self._offsets = offsets
        self._tensors = tensors
        self._total = total

    def project(self, cls: int, x: Sequence[int], y: Sequence[int]) -> Vec:
        tg = self._tensors[cls]
        flat = [0] * self._total
        pure = tg.pure(x, y)
        base = self._offsets[cls]
        for i, v in enumerate(pure):
            flat[base + i] = v
        return self.group.reduce(mat_vec(self._proj, flat))

    def canonical_form(self):
        return self.group.canonical_form()


def tensor_mackey(T: MackeyFunctor, S: MackeyFunctor) -> TensorMackey:
    """T (x) S over the category: quotient of the levelwise tensors.

    The relation (a* x) (x) y ~ x (x) (a_* y) is imposed for atomic
    spans only; composite spans follow by functoriality and linearity.
    """
    assert T.variance == "contravariant" and S.variance == "covariant"
    assert T.category is S.category
    cat = T.category
    tensors = [TensorGroup(T.value(c), S.value(c)) for c in cat.objects]
    offsets = []
    total = 0
    for tg in tensors:
        offsets.append(total)
        total += tg.ngens
    rels = []
    for cls, tg in enumerate(tensors):
        base = offsets[cls]
        for r in tg.relations:
            rels.append({base + i: v for i, v in enumerate(r) if v})
    for sp in atomic_spans(cat):
        a, b = sp.src, sp.tgt
        P = T.act(sp)   # T(b) -> T(a)
        Q = S.act(sp)   # S(a) -> S(b)
        nTa, nTb = T.value(a).ngens, T.value(b).ngens
        nSa, nSb = S.value(a).ngens, S.value(b).ngens
        for i in range(nTb):
            for j in range(nSa):
                row = {}
                for k in range(nTa):
                    if P[k][i]:
                        idx = offsets[a] + k * nSa + j
                        row[idx] = row.get(idx, 0) + P[k][i]
                for l in range(nSb):
                    if Q[l][j]:
                        idx = offsets[b] + i * nSb + l
                        row[idx] = row.get(idx, 0) - Q[l][j]
                if any(row.values()):
                    rels.append(row)
    group, proj, _ = presented_group(total, rels)
    return TensorMackey(group, proj, offsets, tensors, total)


# ---------------------------------------------------------------------------
# the Kan engine: functors presented by slots over a category map
#
# Data: a list of abstract objects, each sent to a class of the target
# category and carrying a group of generators, plus moves
# (x, x2, bigspan, P) for the generating morphisms x -> x2, where
# bigspan is the image morphism (a single basis span, coefficient one)
# and P is the value map in the functor's own direction.  Levels are the
# usual coend: slots (obj, f) with f a basis span between the level and
# the object's image, modulo slot-internal relations and the exchange
# relations of the moves.


class _KanLevel:

    def __init__(self, value, proj, lift, offsets, total):
        self.value = value
        self.proj = proj
        self.lift = lift
        self.offsets = offsets
        self.total = total


def _induced_map(levA: _KanLevel, levB: _KanLevel, colmap) -> list[list[int]]:
    """proj_B . colmap . lift_A with sparse columns {src -> {tgt -> c}}."""
    n = levA.value.ngens
    M = zeros(levB.value.ngens, n)
    for k in range(n):
        vec: dict[int, int] = {}
        for s in range(levA.total):
            v = levA.lift[s][k]
            if v:
                col = colmap.get(s)
                if col:
                    for r, c in col.items():
                        vec[r] = vec.get(r, 0) + c * v
        for s, v in vec.items():
            if not v:
                continue
            for r in range(levB.value.ngens):
                p = levB.proj[r][s]
                if p:
                    M[r][k] += p * v
    return M


class _KanFunctor(MackeyFunctor):
    """Lazily evaluated Kan extension; materialize() makes it eager."""

    def __init__(self, variance, category, objs, image, gens, moves):
        assert variance in VARIANCES
        self.variance = variance
        self.category = category
        self._objs = list(objs)
        self._image = dict(image)
        self._gens = dict(gens)
        self._moves = list(moves)
        self._levels: dict[int, _KanLevel] = {}
        self.action = {}

    def level(self, b: int) -> _KanLevel:
        got = self._levels.get(b)
        if got is None:
            got = self._build_level(b)
            self._levels[b] = got
        return got

    def value(self, cls: int) -> FgAbGroup:
        return self.level(cls).value

    def _build_level(self, b: int) -> _KanLevel:
        cat = self.category
        contra = self.variance == "contravariant"
        offsets: dict[tuple, tuple[int, int]] = {}
        total = 0
        for obj in self._objs:
            n = self._gens[obj].ngens
            if n == 0:
                continue
            img = self._image[obj]
            fb = cat.basis(b, img) if contra else cat.basis(img, b)
            for f in fb:
                offsets[(obj, f)] = (total, n)
                total += n
        rels: list[dict[int, int]] = []
        for (obj, f), (off, n) in offsets.items():
            for r in self._gens[obj].relations:
                row = {off + i: v for i, v in enumerate(r) if v}
                if row:
                    rels.append(row)
        for x, x2, bsp, P in self._moves:
            if contra:
                nsrc = self._gens[x2].ngens
                nmid = self._gens[x].ngens
                fb = cat.basis(b, self._image[x])
            else:
                nsrc = self._gens[x].ngens
                nmid = self._gens[x2].ngens
                fb = cat.basis(self._image[x2], b)
            if nsrc == 0 and nmid == 0:
                continue
            for f in fb:
                comp = cat.compose(bsp, f) if contra else cat.compose(f, bsp)
                slot_plus = x2 if contra else x
                slot_minus = (x, f) if contra else (x2, f)
                minus = offsets.get(slot_minus)
                for i in range(nsrc):
                    row: dict[int, int] = {}
                    for u, cu in comp.items():
                        key = offsets.get((slot_plus, u))
                        if key is not None:
                            idx = key[0] + i
                            row[idx] = row.get(idx, 0) + cu
                    if minus is not None:
                        o = minus[0]
                        for k in range(minus[1]):
                            v = P[k][i]
                            if v:
                                row[o + k] = row.get(o + k, 0) - v
                    if row:
                        rels.append(row)
        value, proj, lift = presented_group(total, rels)
        return _KanLevel(value, proj, lift, offsets, total)

    def act(self, sp: Span):
        M = self.action.get(sp)
        if M is not None:
            return M
        cat = self.category
        if self.variance == "contravariant":
            A, B = self.level(sp.tgt), self.level(sp.src)
        else:
            A, B = self.level(sp.src), self.level(sp.tgt)
        colmap: dict[int, dict[int, int]] = {}
        for (obj, f), (off, n) in A.offsets.items():
            comp = cat.compose(f, sp) if self.variance == "contravariant" else cat.compose(sp, f)
            for u, cu in comp.items():
                off2 = B.offsets[(obj, u)][0]
                for i in range(n):
                    col = colmap.setdefault(off + i, {})
                    col[off2 + i] = col.get(off2 + i, 0) + cu
        M = _induced_map(A, B, colmap)
        self.action[sp] = M
        return M

    def materialize(self, check: bool = True) -> MackeyFunctor:
        cat = self.category
        values = [self.value(c) for c in cat.objects]
        action = {sp: self.act(sp) for sp in atomic_spans(cat)}
        F = MackeyFunctor(self.variance, cat, values, action, check=check)
        F.kan = self
        return F

    def __repr__(self):
        done = sorted(self._levels)
        return f"KanFunctor<{self.variance}; levels built: {done}>"


# ---------------------------------------------------------------------------
# change of group: restriction, induction


def subgroup_category(cat: OrbitCategory, H_lit) -> OrbitCategory:
    """The span category of a subgroup, linked back through .parent."""
    reg = _cache(cat, "_subcats")
    key = tuple(sorted(H_lit))
    got = reg.get(key)
    if got is None:
        K, emb = subgroup_as_group(cat.G, key)
        got = OrbitCategory(K)
        got.parent = (cat, tuple(emb))
        reg[key] = got
    return got


def restrict_group(T: MackeyFunctor, K, check: bool = True) -> MackeyFunctor:
    """Restriction to a subgroup (class index or literal element tuple).

    Values are reused from the ambient functor; a span of the subgroup
    acts the way its induced ambient span does.  Lazy functors are fine,
    only the touched values are forced.
    """
    cat = T.category
    K_lit = tuple(cat.rep(K)) if isinstance(K, int) else tuple(sorted(K))
    small = subgroup_category(cat, K_lit)
    emb = small.parent[1]
    big_of = [
        cat.lat.class_of(tuple(sorted(emb[x] for x in small.rep(k))))[0]
        for k in small.objects
    ]
    values = [T.value(big_of[k]) for k in small.objects]
    action = {}
    for sp in atomic_spans(small):
        action[sp] = T.act(induce_span(cat, emb, small, sp))
    R = MackeyFunctor(T.variance, small, values, action, check=check)
    R.level_map = big_of
    return R


def induce_group(C: MackeyFunctor, check: bool = True) -> MackeyFunctor:
    """Left Kan extension along a subgroup embedding recorded in .parent.

    Induction sends K/J to G/J, so a free functor induces to the free
    functor on the embedded class; general values are glued by the
    engine from slots along spans into embedded orbits.
    """
    small = C.category
    cat, emb = small.parent
    objs = list(small.objects)
    image = {
        a: cat.lat.class_of(tuple(sorted(emb[x] for x in small.rep(a))))[0]
        for a in objs
    }
    gens = {a: C.value(a) for a in objs}
    moves = []
    for sp in atomic_spans(small):
        moves.append((sp.src, sp.tgt, induce_span(cat, emb, small, sp), C.act(sp)))
    kan = _KanFunctor(C.variance, cat, objs, image, gens, moves)
    out = kan.materialize(check=check)
    out.induced_from = (small, emb)
    return out


# ---------------------------------------------------------------------------
# fixed points by a normal subgroup


def quotient_category(cat: OrbitCategory, K_lit) -> OrbitCategory:
    """Span category of G/K with the class correspondence precomputed.

    Classes of G/K match classes of K-containing subgroups of G exactly:
    conjugacy upstairs and downstairs agree because the projection is
    surjective.  Both directions of the bijection are stored.
    """
    reg = _cache(cat, "_quotcats")
    key = tuple(sorted(K_lit))
    got = reg.get(key)
    if got is not None:
        return got
    if not cat.lat.is_normal(key):
        raise NotNormal(f"{key} is not normal in {cat.G.label}")
    Q, belongs = quotient_group(cat.G, key)
    qcat = OrbitCategory(Q)
    preimg = []
    for m in qcat.objects:
        M = set(qcat.rep(m))
        L = tuple(sorted(g for g in range(cat.G.order) if belongs[g] in M))
        preimg.append(cat.lat.class_of(L)[0])
    containing = [b for b in cat.objects if set(key) <= set(cat.rep(b))]
    assert sorted(preimg) == containing, "class correspondence broke"
    qcat.inflation_parent = (cat, key, tuple(belongs))
    qcat.preimage_class = tuple(preimg)
    qcat.class_of_big = {b: m for m, b in enumerate(preimg)}
    reg[key] = qcat
    return qcat


def _saturated_lift(qcat: OrbitCategory, sp: Span) -> Span:
    """The ambient span with all three subgroups the full preimages."""
    cat, K_lit, belongs = qcat.inflation_parent
    n = cat.G.order

    def pre(M):
        Ms = set(M)
        return tuple(sorted(g for g in range(n) if belongs[g] in Ms))

    elt = min(g for g in range(n) if belongs[g] == sp.elt)
    return cat.span_from_raw(pre(qcat.rep(sp.src)), pre(qcat.rep(sp.tgt)), pre(sp.sub), elt)


class FixedQuotient:
    """K-fixed points of a functor, with the pieces of the defining sequence.

    functor lives over the quotient category; sub is the subfunctor of S
    generated below K, inclusion embeds it, inflation pulls the fixed
    functor back (zero at levels not containing K) and projection is the
    levelwise quotient map S -> inflation.
    """

    def __init__(self, functor, sub, inclusion, inflation, projection):
        self.functor = functor
        self.sub = sub
        self.inclusion = inclusion
        self.inflation = inflation
        self.projection = projection


def fixed_quotient(S: MackeyFunctor, K, check: bool = True) -> FixedQuotient:
    """Divide S by everything induced from levels not containing K.

    K must be normal.  At a level whose subgroup contains K the value is
    S there modulo the images of all spans arriving from (contravariant:
    leaving to) levels that do not contain K; other levels die entirely,
    so the result descends to the quotient group's span category.  Spans
    of G/K act through their full-preimage lifts; that is functorial
    because composites of saturated spans only ever meet K-saturated
    middle subgroups, matching the quotient category's composition.
    """
    cat = S.category
    K_lit = tuple(sorted(cat.rep(K) if isinstance(K, int) else K))
    qcat = quotient_category(cat, K_lit)
    Kset = set(K_lit)
    contra = S.variance == "contravariant"
    bad = [a for a in cat.objects if not Kset <= set(cat.rep(a))]
    subgens: dict[int, list[tuple[int, ...]]] = {b: [] for b in cat.objects}
    for b in cat.objects:
        nb = S.value(b).ngens
        for a in bad:
            fb = cat.basis(b, a) if contra else cat.basis(a, b)
            for sp in fb:
                M = S.act(sp)
                for j in range(S.value(a).ngens):
                    col = tuple(M[i][j] for i in range(nb))
                    if any(col):
                        subgens[b].append(col)

    sqs = [
        Subquotient(
            S.value(b).ngens,
            subgens[b] + list(S.value(b).relations),
            S.value(b).relations,
        )
        for b in cat.objects
    ]
    sub_values = [sq.group for sq in sqs]
    sub_action = {}
    for sp in atomic_spans(cat):
        x, y = (sp.tgt, sp.src) if contra else (sp.src, sp.tgt)
        M = S.act(sp)
        cols = []
        for v in sqs[x].basis:
            w = mat_vec(M, v)
            c = sqs[y]._coords(w)
            assert c is not None, "subfunctor not closed under a span"
            cols.append(c)
        ny = sub_values[y].ngens
        sub_action[sp] = [[cols[j][i] for j in range(len(cols))] for i in range(ny)]
    sub = MackeyFunctor(S.variance, cat, sub_values, sub_action, check=check)
    inclusion = NatTransf(
        sub, S,
        [[[sqs[b].basis[j][i] for j in range(sub_values[b].ngens)]
          for i in range(S.value(b).ngens)] for b in cat.objects],
        check=check,
    )

    # quotient values at K-containing levels, in quotient-class order
    q_data = {}
    for m in qcat.objects:
        b = qcat.preimage_class[m]
        val, proj, lift = presented_group(
            S.value(b).ngens, list(S.value(b).relations) + subgens[b])
        q_data[m] = (val, proj, lift)
    q_values = [q_data[m][0] for m in qcat.objects]
    q_action = {}
    for sp in atomic_spans(qcat):
        big = _saturated_lift(qcat, sp)
        x, y = (sp.tgt, sp.src) if contra else (sp.src, sp.tgt)
        M = mat_mul(q_data[y][1], mat_mul(S.act(big), q_data[x][2]))
        q_action[sp] = _shaped(M, q_values[y].ngens, q_values[x].ngens)
    functor = MackeyFunctor(S.variance, qcat, q_values, q_action, check=check)

    inflation = inflate(functor, check=check)
    proj_components = []
    for b in cat.objects:
        if Kset <= set(cat.rep(b)):
            proj_components.append(q_data[qcat.class_of_big[b]][1])
        else:
            proj_components.append(zeros(0, S.value(b).ngens))
    projection = NatTransf(S, inflation, proj_components, check=check)
    return FixedQuotient(functor, sub, inclusion, inflation, projection)


def inflate(F: MackeyFunctor, check: bool = True) -> MackeyFunctor:
    """Pull a functor on G/K back to G, zero where the level misses K.

    A span acts through its image in the quotient category when its
    middle subgroup contains K and by zero otherwise; normality makes
    the deficient case stable under composition, so both sides of every
    functoriality square vanish together.
    """
    qcat = F.category
    cat, K_lit, belongs = qcat.inflation_parent
    Kset = set(K_lit)
    values = []
    for b in cat.objects:
        if Kset <= set(cat.rep(b)):
            values.append(F.value(qcat.class_of_big[b]))
        else:
            values.append(FgAbGroup(0))
    contra = F.variance == "contravariant"
    action = {}
    for sp in atomic_spans(cat):
        x, y = (sp.tgt, sp.src) if contra else (sp.src, sp.tgt)
        if not Kset <= set(sp.sub):
            action[sp] = zeros(values[y].ngens, values[x].ngens)
            continue

        def down(M):
            Ms = set(M)
            return tuple(sorted({belongs[g] for g in Ms}))

        qsp = qcat.span_from_raw(
            down(cat.rep(sp.src)), down(cat.rep(sp.tgt)), down(sp.sub), belongs[sp.elt])
        action[sp] = F.act(qsp)
    out = MackeyFunctor(F.variance, cat, values, action, check=check)
    out.inflated_from = F
    return out


# ---------------------------------------------------------------------------
# products of groups and the box product


def product_category(cat1: OrbitCategory, cat2: OrbitCategory) -> OrbitCategory:
    """Span category of the direct product, cached on the first factor."""
    reg = _cache(cat1, "_products")
    got = reg.get(id(cat2))
    if got is None:
        got = OrbitCategory(direct_product(cat1.G, cat2.G))
        got.factors = (cat1, cat2)
        reg[id(cat2)] = got
    return got


def pair_class(pcat: OrbitCategory, a1: int, a2: int) -> int:
    """Class of the literal product subgroup rep(a1) x rep(a2)."""
    cache = _cache(pcat, "_pair_classes")
    key = (a1, a2)
    if key not in cache:
        cat1, cat2 = pcat.factors
        n2 = cat2.G.order
        lit = tuple(sorted(h1 * n2 + h2 for h1 in cat1.rep(a1) for h2 in cat2.rep(a2)))
        cache[key] = pcat.lat.class_of(lit)[0]
    return cache[key]


def _product_span(pcat: OrbitCategory, sp: Span, other: int, side: str) -> Span:
    """sp x id (side left) or id x sp (side right) on product orbits."""
    cache = _cache(pcat, "_prodspans")
    key = (sp, other, side)
    got = cache.get(key)
    if got is not None:
        return got
    cat1, cat2 = pcat.factors
    n2 = cat2.G.order
    if side == "left":
        O = cat2.rep(other)
        H = [h1 * n2 + h2 for h1 in cat1.rep(sp.src) for h2 in O]
        K = [h1 * n2 + h2 for h1 in cat1.rep(sp.tgt) for h2 in O]
        sub = [j * n2 + j2 for j in sp.sub for j2 in O]
        elt = sp.elt * n2
    else:
        O = cat1.rep(other)
        H = [h1 * n2 + h2 for h1 in O for h2 in cat2.rep(sp.src)]
        K = [h1 * n2 + h2 for h1 in O for h2 in cat2.rep(sp.tgt)]
        sub = [h1 * n2 + j2 for h1 in O for j2 in sp.sub]
        elt = sp.elt
    got = pcat.span_from_raw(tuple(sorted(H)), tuple(sorted(K)), tuple(sorted(sub)), elt)
    cache[key] = got
    return got


def _kron(A, B, ra: int, ca: int, rb: int, cb: int):
    """Kronecker product with explicit shapes, first factor major."""
    M = zeros(ra * rb, ca * cb)
    for i in range(ra):
        for j in range(ca):
            a = A[i][j]
            if a:
                for k in range(rb):
                    row = M[i * rb + k]
                    for l in range(cb):
                        v = a * B[k][l]
                        if v:
                            row[j * cb + l] = v
    return M


def box_external(T: MackeyFunctor, U: MackeyFunctor, materialize: bool = True,
                 check: bool = True):
    """The external product over the direct product group.

    Values on product orbits are the literal tensor products; everything
    else is glued by the Kan engine along the product-orbit subcategory,
    whose generating morphisms are atomic spans crossed with an
    identity.  With materialize=False the result is lazy and only the
    levels something asks for are ever presented.
    """
    assert T.variance == U.variance
    pcat = product_category(T.category, U.category)
    cat1, cat2 = pcat.factors
    objs = [(a1, a2) for a1 in cat1.objects for a2 in cat2.objects]
    image = {(a1, a2): pair_class(pcat, a1, a2) for a1, a2 in objs}
    gens = {(a1, a2): TensorGroup(T.value(a1), U.value(a2)) for a1, a2 in objs}
    moves = []
    for alpha in atomic_spans(cat1):
        A = T.act(alpha)
        ra, ca = T.shape(alpha)
        for a2 in cat2.objects:
            n = U.value(a2).ngens
            if n == 0 or (ra == 0 and ca == 0):
                continue
            bsp = _product_span(pcat, alpha, a2, "left")
            P = _kron(A, identity_matrix(n), ra, ca, n, n)
            moves.append(((alpha.src, a2), (alpha.tgt, a2), bsp, P))
    for beta in atomic_spans(cat2):
        B = U.act(beta)
        rb, cb = U.shape(beta)
        for a1 in cat1.objects:
            n = T.value(a1).ngens
            if n == 0 or (rb == 0 and cb == 0):
                continue
            bsp = _product_span(pcat, beta, a1, "right")
            P = _kron(identity_matrix(n), B, n, n, rb, cb)
            moves.append(((a1, beta.src), (a1, beta.tgt), bsp, P))
    kan = _KanFunctor(T.variance, pcat, objs, image, gens, moves)
    if not materialize:
        return kan
    out = kan.materialize(check=check)
    out.factors = (T, U)
    return out


def transport_functor(F: MackeyFunctor, newcat: OrbitCategory, check: bool = False) -> MackeyFunctor:
    """Move a functor to an equal-in-all-but-identity category.

    Only legal when the two categories were built from identical
    multiplication tables, so spans are the same plain data.
    """
    old = F.category
    assert old.G.mul == newcat.G.mul, "groups differ"
    assert old.lat.class_reps == newcat.lat.class_reps, "lattices differ"
    values = [F.value(c) for c in newcat.objects]
    action = {sp: F.act(sp) for sp in atomic_spans(newcat)}
    return MackeyFunctor(F.variance, newcat, values, action, check=check)


def box_internal(T: MackeyFunctor, U: MackeyFunctor, check: bool = True) -> MackeyFunctor:
    """The box product: external product restricted along the diagonal.

    The diagonal copy of G inside G x G is monotone in the element
    order, so its standalone multiplication table is identical to G's
    and the restricted functor transports back to G's own category.
    """
    cat = T.category
    assert U.category is cat
    pcat = product_category(cat, cat)
    lazy = box_external(T, U, materialize=False)
    n = cat.G.order
    diag = tuple(g * (n + 1) for g in range(n))
    R = restrict_group(lazy, diag, check=check)
    small = R.category
    assert small.G.mul == cat.G.mul
    out = transport_functor(R, cat, check=False)
    out.kan = lazy
    out.level_map = R.level_map
    out.pcat = pcat
    out.factors = (T, U)
    return out


def unit_box_iso(T: MackeyFunctor, boxed: MackeyFunctor) -> NatTransf:
    """The natural map T -> A_{G/G} box T, built on pure tensors.

    At level b the generator x goes to the class of 1 (x) x in the slot
    of the object (G/G, b) along the inclusion of the diagonal copy of
    rep(b) into G x rep(b).
    """
    cat = T.category
    pcat = boxed.pcat
    unitF = boxed.factors[0]
    unit = unitF.free_on
    assert unit == unit_class(cat)
    idx0 = unitF.free_index[unit][cat.identity(unit)]
    n = cat.G.order
    comps = []
    for b in cat.objects:
        lev = boxed.kan.level(boxed.level_map[b])
        nb = T.value(b).ngens
        M = zeros(lev.value.ngens, nb)
        if nb:
            diag_lit = tuple(sorted(g * (n + 1) for g in cat.rep(b)))
            prod_lit = tuple(sorted(h * n + k for h in range(n) for k in cat.rep(b)))
            f0 = pcat.span_from_raw(diag_lit, prod_lit, diag_lit, 0)
            off, width = lev.offsets[((unit, b), f0)]
            assert width == unitF.value(unit).ngens * nb
            for j in range(nb):
                col = _inject_column(lev, off + idx0 * nb + j)
                for r in range(lev.value.ngens):
                    M[r][j] = col[r]
        comps.append(M)
    return NatTransf(T, boxed, comps, check=True)


def _inject_column(lev: _KanLevel, idx: int):
    return [lev.proj[r][idx] for r in range(lev.value.ngens)]


# ---------------------------------------------------------------------------
# the mixed product of a covariant against a contravariant functor


def product_orbit_data(cat: OrbitCategory, a: int, b: int):
    """(gset, orbits, point -> orbit index) of G/rep(a) x G/rep(b)."""
    cache = _cache(cat, "_pgsets")
    key = (a, b)
    got = cache.get(key)
    if got is None:
        X = product_gset(
            coset_gset(cat.G, cat.lat, cat.rep(a)),
            coset_gset(cat.G, cat.lat, cat.rep(b)),
        )
        orbs = decompose_orbits(X, cat.lat)
        owner = [0] * X.size
        for oi, orb in enumerate(orbs):
            for p in orb.points:
                owner[p] = oi
        got = (X, orbs, owner)
        cache[key] = got
    return got


def times_orbit_matrix(cat: OrbitCategory, sp: Span, other: int, side: str):
    """Orbitwise components of sp x id (left) or id x sp (right).

    Crossing a span with an identity orbit gives a correspondence of
    product G-sets; each orbit of the middle contributes one basis span
    between the orbits of the two ends.  Returns {(xi, yi): lin}.
    """
    cache = _cache(cat, "_times")
    key = (sp, other, side)
    got = cache.get(key)
    if got is not None:
        return got
    G, lat = cat.G, cat.lat
    Wg = coset_gset(G, lat, sp.sub)
    Og = coset_gset(G, lat, cat.rep(other))
    reps_src, bel_src = lat.coset_table(cat.rep(sp.src))
    reps_tgt, bel_tgt = lat.coset_table(cat.rep(sp.tgt))
    if side == "left":
        W = product_gset(Wg, Og)
        X, xorbs, xown = product_orbit_data(cat, sp.src, other)
        Y, yorbs, yown = product_orbit_data(cat, sp.tgt, other)
        no = Og.size
        lam, rho = [], []
        for p in range(W.size):
            wi, oi = divmod(p, no)
            wrep = Wg.labels[wi]
            lam.append(bel_src[wrep] * no + oi)
            rho.append(bel_tgt[G.mul[wrep][sp.elt]] * no + oi)
    else:
        W = product_gset(Og, Wg)
        X, xorbs, xown = product_orbit_data(cat, other, sp.src)
        Y, yorbs, yown = product_orbit_data(cat, other, sp.tgt)
        nw = Wg.size
        nx, ny = len(reps_src), len(reps_tgt)
        lam, rho = [], []
        for p in range(W.size):
            oi, wi = divmod(p, nw)
            wrep = Wg.labels[wi]
            lam.append(oi * nx + bel_src[wrep])
            rho.append(oi * ny + bel_tgt[G.mul[wrep][sp.elt]])
    out: dict[tuple[int, int], dict[Span, int]] = {}
    for worb in decompose_orbits(W, lat):
        w0 = worb.anchor
        xi, yi = xown[lam[w0]], yown[rho[w0]]
        piece = gset_span(cat, W, X, Y, lam, rho, worb, xorbs[xi], yorbs[yi])
        cell = out.setdefault((xi, yi), {})
        cell[piece] = cell.get(piece, 0) + 1
    cache[key] = out
    return out


def mixed_product(S: MackeyFunctor, T: MackeyFunctor, check: bool = True) -> MackeyFunctor:
    """The composition product of a covariant with a contravariant functor.

    The value at a level L is the coend over objects J of
    S((G/J) x (G/L)) (x) T(J), with S spread over the orbits of the
    product.  Slots indexed by maps out of J collapse along the identity,
    so only (object, orbit) slots remain and the exchange relations run
    over atomic spans between objects.  The result is covariant: a span
    into L' moves the orbit factor.
    """
    assert S.variance == "covariant" and T.variance == "contravariant"
    assert S.category is T.category
    cat = S.category
    levels: dict[int, _KanLevel] = {}
    for L in cat.objects:
        offsets: dict[tuple[int, int], tuple[int, int]] = {}
        tensors: dict[tuple[int, int], TensorGroup] = {}
        total = 0
        rels: list[dict[int, int]] = []
        for J in cat.objects:
            nT = T.value(J).ngens
            if nT == 0:
                continue
            _, orbs, _ = product_orbit_data(cat, J, L)
            for oi, orb in enumerate(orbs):
                Sv = S.value(orb.rep_class)
                if Sv.ngens == 0:
                    continue
                tg = TensorGroup(Sv, T.value(J))
                offsets[(J, oi)] = (total, tg.ngens)
                tensors[(J, oi)] = tg
                for r in tg.relations:
                    row = {total + i: v for i, v in enumerate(r) if v}
                    if row:
                        rels.append(row)
                total += tg.ngens
        for g in atomic_spans(cat):
            J, J2 = g.src, g.tgt
            nTJ = T.value(J).ngens
            nTJ2 = T.value(J2).ngens
            if nTJ2 == 0:
                continue
            P = T.act(g)
            M = times_orbit_matrix(cat, g, L, "left")
            _, xorbs, _ = product_orbit_data(cat, J, L)
            for xi, xorb in enumerate(xorbs):
                nSx = S.value(xorb.rep_class).ngens
                if nSx == 0:
                    continue
                acts = []
                for (x2, yi), lin in M.items():
                    if x2 == xi and (J2, yi) in offsets:
                        acts.append((offsets[(J2, yi)][0], S.act_lin(lin)))
                keyx = offsets.get((J, xi))
                for j in range(nTJ2):
                    for i in range(nSx):
                        row: dict[int, int] = {}
                        if keyx is not None:
                            offx = keyx[0]
                            for k in range(nTJ):
                                v = P[k][j]
                                if v:
                                    row[offx + i * nTJ + k] = v
                        for offy, A in acts:
                            for l in range(len(A)):
                                v = A[l][i]
                                if v:
                                    idx = offy + l * nTJ2 + j
                                    row[idx] = row.get(idx, 0) - v
                        if row:
                            rels.append(row)
        value, proj, lift = presented_group(total, rels)
        lev = _KanLevel(value, proj, lift, offsets, total)
        lev.tensors = tensors
        levels[L] = lev

    action = {}
    for g in atomic_spans(cat):
        A, B = levels[g.src], levels[g.tgt]
        colmap: dict[int, dict[int, int]] = {}
        for (J, xi), (off, width) in A.offsets.items():
            nTJ = T.value(J).ngens
            M = times_orbit_matrix(cat, g, J, "right")
            _, xorbs, _ = product_orbit_data(cat, J, g.src)
            for (x2, yi), lin in M.items():
                if x2 != xi or (J, yi) not in B.offsets:
                    continue
                offy = B.offsets[(J, yi)][0]
                Act = S.act_lin(lin)
                nSx = S.value(xorbs[xi].rep_class).ngens
                for i in range(nSx):
                    for l in range(len(Act)):
                        v = Act[l][i]
                        if not v:
                            continue
                        for j in range(nTJ):
                            col = colmap.setdefault(off + i * nTJ + j, {})
                            idx = offy + l * nTJ + j
                            col[idx] = col.get(idx, 0) + v
        action[g] = _induced_map(A, B, colmap)
    values = [levels[L].value for L in cat.objects]
    out = MackeyFunctor("covariant", cat, values, action, check=check)
    out.mix_levels = levels
    out.factors = (S, T)
    return out


def unit_mixed_iso(S: MackeyFunctor, mixed: MackeyFunctor) -> NatTransf:
    """The natural map S -> S mixed-with A_{G/G}, on pure tensors.

    (G/G) x (G/L) is a single orbit with stabilizer class L, so each
    generator of S(L) has a canonical slot at the object G/G.
    """
    cat = S.category
    unitF = mixed.factors[1]
    unit = unitF.free_on
    assert unit == unit_class(cat)
    idx0 = unitF.free_index[unit][cat.identity(unit)]
    nT = unitF.value(unit).ngens
    comps = []
    for L in cat.objects:
        lev = mixed.mix_levels[L]
        nb = S.value(L).ngens
        M = zeros(lev.value.ngens, nb)
        if nb:
            _, orbs, _ = product_orbit_data(cat, unit, L)
            assert len(orbs) == 1 and orbs[0].rep_class == L
            off, width = lev.offsets[(unit, 0)]
            tg = lev.tensors[(unit, 0)]
            for j in range(nb):
                x = [0] * nb
                x[j] = 1
                y = [0] * nT
                y[idx0] = 1
                pure = tg.pure(x, y)
                for i, v in enumerate(pure):
                    if v:
                        col = _inject_column(lev, off + i)
                        for r in range(lev.value.ngens):
                            M[r][j] += v * col[r]
        comps.append(M)
    return NatTransf(S, mixed, comps, check=True)


# ---------------------------------------------------------------------------
# comparisons


def values_isomorphic(F: MackeyFunctor, G: MackeyFunctor) -> bool:
    """Levelwise abstract isomorphism of values (canonical forms agree)."""
    return all(
        F.value(c).canonical_form() == G.value(c).canonical_form()
        for c in F.category.objects
    )


def natural_iso(F: MackeyFunctor, G: MackeyFunctor, components) -> bool:
    """Do the components define a natural isomorphism F -> G?"""
    try:
        nat = NatTransf(F, G, components, check=True)
    except FunctorialityFailure:
        return False
    return nat.is_isomorphism()
