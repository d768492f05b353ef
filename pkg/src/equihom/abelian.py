"""Exact linear algebra over the integers.

Smith normal form with unimodular transforms, finitely generated abelian
groups presented by generators and relations, homomorphism and tensor
groups, and the subquotient machinery (kernels, images, homology of a
pair) that the rest of the package is built on.

Conventions, used consistently everywhere:

* a matrix is a list of rows of Python ints; no floats ever appear;
* matrices act on column vectors from the left, so a map from a group
  with ``a`` generators to one with ``b`` generators is a ``b x a``
  matrix, and ``mat_mul(f, g)`` is "first g, then f";
* a presentation lists its relations as rows, each of length ``ngens``.

>>> U, D, V = snf([[4, 0], [0, 6]])
>>> diagonal(D)
[2, 12]
>>> FgAbGroup(2, [(2, 0), (0, 3)]).canonical_form()
(0, (6,))
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

Vec = tuple[int, ...]
Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# matrices


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    m, k = len(A), len(B)
    n = len(B[0]) if k else 0
    assert all(len(row) == k for row in A) or k == 0
    out = zeros(m, n)
    for i, arow in enumerate(A):
        orow = out[i]
        for t, a in enumerate(arow):
            if a:
                brow = B[t]
                for j in range(n):
                    orow[j] += a * brow[j]
    return out

def mat_vec(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vec:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_add(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c: int, A) -> Matrix:
    return [[c * a for a in row] for row in A]


def mat_eq(A, B) -> bool:
    return [list(r) for r in A] == [list(r) for r in B]


def vec_add(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c: int, v: Sequence[int]) -> Vec:
    return tuple(c * a for a in v)


def block_diag(blocks: Sequence[Sequence[Sequence[int]]]) -> Matrix:
    rows = sum(len(b) for b in blocks)
    cols = sum(len(b[0]) if b else 0 for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[r + i][c + j] = x
        r += len(b)
        c += len(b[0]) if b else 0
    return out


# ---------------------------------------------------------------------------
# Smith normal form


def snf_full(M: Sequence[Sequence[int]]):
    """(U, Uinv, D, V, Vinv) with U*M*V = D in Smith normal form.

    U and V are unimodular; Uinv and Vinv are their exact inverses,
    maintained by applying the inverse elementary operations alongside.
    The diagonal of D is nonnegative and each entry divides the next.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    D = [list(row) for row in M]
    U, Ui = identity(m), identity(m)
    V, Vi = identity(n), identity(n)

    def row_combine(i, j, c):
        # row i += c * row j, on D and U; inverse op is a column op on Ui
        Di, Dj = D[i], D[j]
        for t in range(n):
            Di[t] += c * Dj[t]
        Uii, Uj = U[i], U[j]
        for t in range(m):
            Uii[t] += c * Uj[t]
        for r in Ui:
            r[j] -= c * r[i]

    def col_combine(j, i, c):
        # col j += c * col i, on D and V; inverse op is a row op on Vi
        for r in D:
            r[j] += c * r[i]
        for r in V:
            r[j] += c * r[i]
        Vj, Vii = Vi[j], Vi[i]
        for t in range(n):
            Vii[t] -= c * Vj[t]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        # locate a minimal nonzero pivot in the remaining block
        pivot = None
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, m):
                if D[i][t]:
                    row_combine(i, t, -(D[i][t] // D[t][t]))
            nz = [i for i in range(t + 1, m) if D[i][t]]
            if nz:
                i = min(nz, key=lambda i: abs(D[i][t]))
                swap_rows(t, i)
                continue
            for j in range(t + 1, n):
                if D[t][j]:
                    col_combine(j, t, -(D[t][j] // D[t][t]))
            nz = [j for j in range(t + 1, n) if D[t][j]]
            if nz:
                j = min(nz, key=lambda j: abs(D[t][j]))
                swap_cols(t, j)
                continue
            # divisibility sweep: the pivot must divide the whole block
            d = D[t][t]
            bad = None
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % d:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_combine(t, bad, 1)
        if D[t][t] < 0:
            negate_row(t)
        t += 1
    return U, Ui, D, V, Vi


def snf(M: Sequence[Sequence[int]]):
    """(U, D, V) with U*M*V = D diagonal, diagonal entries dividing in turn.

    >>> U, D, V = snf([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    >>> diagonal(D)
    [2, 6, 12]
    """
    U, _, D, V, _ = snf_full(M)
    return U, D, V


def diagonal(D: Sequence[Sequence[int]]) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def kernel_basis(M: Sequence[Sequence[int]]) -> list[Vec]:
    """Basis columns of the full integer kernel lattice of M."""
    m = len(M)
    n = len(M[0]) if m else 0
    return kernel_columns(M, n)


def kernel_columns(rows: Sequence[Sequence[int]], n: int) -> list[Vec]:
    """Basis of {x in Z^n : Rx = 0} by unimodular column elimination.

    Cheaper than a full SNF when rows vastly outnumber columns; duplicate
    and zero rows are dropped up front.  Invariant: once a row has been
    processed, every still-active column is zero there, so the surviving
    columns of the accumulated transform span the whole kernel lattice.
    """
    if n == 0:
        return []
    uniq = [list(r) for r in dict.fromkeys(tuple(r) for r in rows) if any(r)]
    if not uniq:
        return [tuple(col) for col in identity(n)]
    cols = [[r[j] for r in uniq] for j in range(n)]
    V = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    active = list(range(n))
    for r in range(len(uniq)):
        live = [j for j in active if cols[j][r]]
        if not live:
            continue
        piv = live[0]
        for j in live[1:]:
            a, b = cols[piv][r], cols[j][r]
            if b % a == 0:
                q = b // a
                cols[j] = [v - q * u for u, v in zip(cols[piv], cols[j])]
                V[j] = [v - q * u for u, v in zip(V[piv], V[j])]
                continue
            g, x, y = _ext_gcd(a, b)
            pa, pb = a // g, b // g
            cp, cj = cols[piv], cols[j]
            cols[piv] = [x * u + y * v for u, v in zip(cp, cj)]
            cols[j] = [pa * v - pb * u for u, v in zip(cp, cj)]
            vp, vj = V[piv], V[j]
            V[piv] = [x * u + y * v for u, v in zip(vp, vj)]
            V[j] = [pa * v - pb * u for u, v in zip(vp, vj)]
        active.remove(piv)
    return [tuple(V[j]) for j in active]


def kernel_congruence(rows: Sequence[Sequence[int]], moduli: Sequence[int], n: int) -> list[Vec]:
    """Basis of {x in Z^n : rows[r] . x == 0 mod moduli[r]}, modulus 0 exact.

    Same elimination as kernel_columns, but a torsion row's modulus is
    folded in directly: entries at that row live in [0, m), and when a
    pivot leaves with entry a there, (m / gcd(a, m)) times it re-enters as
    a fresh column.  A slack-column formulation computes the same lattice;
    this one keeps every coefficient at a torsion row bounded by m.
    """
    assert len(rows) == len(moduli)
    if n == 0:
        return []
    pairs = []
    seen = set()
    for r, m in zip(rows, moduli):
        assert m >= 0
        v = tuple(x % m for x in r) if m else tuple(r)
        if any(v) and (v, m) not in seen:
            seen.add((v, m))
            pairs.append((list(v), m))
    if not pairs:
        return [tuple(col) for col in identity(n)]
    # exact rows first: they only shrink the active set, while torsion rows
    # can append scaled pivots that would need re-elimination against them
    pairs.sort(key=lambda p: p[1] != 0)
    mods = [m for _, m in pairs]
    R = len(pairs)

    def reduced(col: list[int]) -> list[int]:
        for rr in range(R):
            if mods[rr]:
                col[rr] %= mods[rr]
        return col

    work = [reduced([p[0][j] for p in pairs]) for j in range(n)]
    V = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    active = list(range(n))
    for r in range(R):
        m = mods[r]
        live = [j for j in active if work[j][r]]
        if not live:
            continue
        piv = live[0]
        for j in live[1:]:
            a, b = work[piv][r], work[j][r]
            if b % a == 0:
                q = b // a
                work[j] = reduced([v - q * u for u, v in zip(work[piv], work[j])])
                V[j] = [v - q * u for u, v in zip(V[piv], V[j])]
                continue
            g, x, y = _ext_gcd(a, b)
            pa, pb = a // g, b // g
            cp, cj = work[piv], work[j]
            work[piv] = reduced([x * u + y * v for u, v in zip(cp, cj)])
            work[j] = reduced([pa * v - pb * u for u, v in zip(cp, cj)])
            vp, vj = V[piv], V[j]
            V[piv] = [x * u + y * v for u, v in zip(vp, vj)]
            V[j] = [pa * v - pb * u for u, v in zip(vp, vj)]
        active.remove(piv)
        if m:
            a = work[piv][r]
            g, _, _ = _ext_gcd(a, m)
            k = m // g
            work.append(reduced([k * v for v in work[piv]]))
            V.append([k * v for v in V[piv]])
            active.append(len(work) - 1)
    return [tuple(V[j]) for j in active]


def solve(M: Sequence[Sequence[int]], b: Sequence[int]):
    """Some integer solution x of M x = b, or None."""
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return (0,) * n
    U, _, D, V, _ = snf_full(M)
    c = mat_vec(U, b)
    diag = diagonal(D)
    y = [0] * n
    for i in range(m):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            if i < n:
                y[i] = c[i] // d
    return mat_vec(V, y)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def hnf_columns(cols: Iterable[Sequence[int]], n: int) -> list[Vec]:
    """Canonical (column-style Hermite) basis of the lattice the columns span.

    Echelon from the top: pivot rows strictly increase, pivots are positive,
    and entries in a pivot row of the other basis vectors are reduced into
    [0, pivot).  Equal lattices give byte-equal output.

    >>> hnf_columns([(2, 2), (0, 4), (2, 6)], 2)
    [(2, 2), (0, 4)]
    """
    pivots: dict[int, list[int]] = {}
    for c in cols:
        v = list(c)
        assert len(v) == n
        for p in range(n):
            if not v[p]:
                continue
            b = pivots.get(p)
            if b is None:
                pivots[p] = v
                v = None
                break
            g, x, y = _ext_gcd(b[p], v[p])
            cb, cv = b[p] // g, v[p] // g
            new_b = [x * bb + y * vv for bb, vv in zip(b, v)]
            v = [cb * vv - cv * bb for bb, vv in zip(b, v)]
            pivots[p] = new_b
        # leftover v is zero or got absorbed
    rows = sorted(pivots)
    # entries before a pivot row are zero, so reducing in increasing pivot
    # order never disturbs rows already normalized
    for p in rows:
        b = pivots[p]
        if b[p] < 0:
            pivots[p] = b = [-x for x in b]
        for q in rows:
            if q >= p:
                break
            a = pivots[q]
            k = a[p] // b[p]
            if k:
                pivots[q] = [aa - k * bb for aa, bb in zip(a, b)]
    return [tuple(pivots[p]) for p in rows]


def reduce_mod_hnf(v: Sequence[int], basis: Sequence[Sequence[int]]) -> Vec:
    """Shift v by lattice vectors until each pivot entry lies in [0, pivot).

    ``basis`` must be hnf_columns output.  The class of v modulo the
    lattice is unchanged; entries at pivot rows become small, which keeps
    later Hermite passes out of the big-integer regime.
    """
    w = list(v)
    for b in basis:
        p = next(i for i, x in enumerate(b) if x)
        k = w[p] // b[p]
        if k:
            for i in range(p, len(w)):
                if b[i]:
                    w[i] -= k * b[i]
    return tuple(w)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


class FgAbGroup:
    """An abelian group presented by ``ngens`` generators and relation rows.

    Elements are ambient integer vectors of length ``ngens``; two vectors
    represent the same element iff their difference lies in the relation
    lattice.  The Smith form of the relation matrix is computed once and
    drives canonical coordinates, equality and generator lifts.

    >>> A = FgAbGroup(2, [(2, 0), (0, 3)])
    >>> A.canonical_form()
    (0, (6,))
    >>> A.reduce((1, 1)) == A.reduce((3, 4))
    True
    """

    def __init__(self, ngens: int, relations: Iterable[Sequence[int]] = ()):
        self.ngens = ngens
        self.relations = tuple(tuple(r) for r in relations)
        assert all(len(r) == ngens for r in self.relations)
        rel_cols = transpose([list(r) for r in self.relations]) if self.relations else zeros(ngens, 0)
        U, Ui, D, _, _ = snf_full(rel_cols)
        diag = diagonal(D)
        # modulus of the i-th canonical coordinate; 0 means a free coordinate
        self.moduli: Vec = tuple(
            diag[i] if i < len(diag) else 0 for i in range(ngens)
        )
        self._U = U
        self._Ui = Ui

    def canonical_form(self) -> tuple[int, Vec]:
        """(free rank, invariant factors >= 2, in divisibility order)."""
        rank = sum(1 for m in self.moduli if m == 0)
        return rank, tuple(m for m in self.moduli if m >= 2)

    def zero(self) -> Vec:
        return (0,) * self.ngens

    def reduce(self, x: Sequence[int]) -> Vec:
        """Canonical coordinates of an element, trivial factors dropped."""
        y = mat_vec(self._U, x)
        out = []
        for yi, m in zip(y, self.moduli):
            if m == 1:
                continue
            out.append(yi % m if m else yi)
        return tuple(out)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.reduce(x))

    def congruence_rows(self) -> list[tuple[Vec, int]]:
        """(canonical transform row, modulus) pairs, trivial factors dropped.

        An ambient x is zero in the group iff row . x == 0 mod m for every
        pair (with m == 0 read as equality over Z), so membership of a
        linear form decouples into one congruence per row.
        """
        return [(tuple(self._U[i]), m)
                for i, m in enumerate(self.moduli) if m != 1]

    def elements_equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.reduce(x) == self.reduce(y)

    def generator_lifts(self) -> list[Vec]:
        """Ambient vectors projecting to the canonical cyclic generators.

        Order matches canonical_form: torsion factors first (in divisibility
        order), then the free coordinates.
        """
        tors = []
        free = []
        for i, m in enumerate(self.moduli):
            lift = tuple(self._Ui[t][i] for t in range(self.ngens))
            if m == 0:
                free.append(lift)
            elif m >= 2:
                tors.append(lift)
        return tors + free

    def from_canonical(self, coords: Sequence[int]) -> Vec:
        """Ambient vector with the given canonical coordinates."""
        lifts = self.generator_lifts()
        assert len(coords) == len(lifts)
        x = self.zero()
        for c, l in zip(coords, lifts):
            x = vec_add(x, vec_scale(c, l))
        return x

    def order(self):
        """Group order, or None when infinite."""
        if any(m == 0 for m in self.moduli):
            return None
        total = 1
        for m in self.moduli:
            total *= m
        return total

    def is_trivial(self) -> bool:
        return self.order() == 1

    def contains_in_relations(self, x: Sequence[int]) -> bool:
        return self.is_zero(x)

    def __repr__(self):
        rank, tors = self.canonical_form()
        parts = ["Z"] * rank + [f"Z/{t}" for t in tors]
        return "FgAbGroup<" + (" + ".join(parts) if parts else "0") + ">"


def direct_sum(groups: Sequence[FgAbGroup]) -> tuple[FgAbGroup, list[int]]:
    """Concatenated presentation and the generator offset of each summand."""
    offsets = []
    at = 0
    for g in groups:
        offsets.append(at)
        at += g.ngens
    rels = []
    for g, off in zip(groups, offsets):
        for r in g.relations:
            row = [0] * at
            row[off:off + g.ngens] = list(r)
            rels.append(tuple(row))
    return FgAbGroup(at, rels), offsets


class AbMap:
    """A homomorphism between presented groups, as a matrix on generators."""

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        self.matrix = [list(r) for r in matrix]
        assert len(self.matrix) == target.ngens
        assert all(len(r) == source.ngens for r in self.matrix)

    def well_defined(self) -> bool:
        return all(
            self.target.is_zero(mat_vec(self.matrix, r)) for r in self.source.relations
        )

    def __call__(self, x: Sequence[int]) -> Vec:
        return mat_vec(self.matrix, x)

    def compose(self, other: "AbMap") -> "AbMap":
        """self after other."""
        assert other.target is self.source or other.target.ngens == self.source.ngens
        if self.source.ngens == 0:
            # mat_mul cannot recover the column count through a 0-dim middle
            return AbMap.zero_map(other.source, self.target)
        return AbMap(other.source, self.target, mat_mul(self.matrix, other.matrix))

    def add(self, other: "AbMap") -> "AbMap":
        return AbMap(self.source, self.target, mat_add(self.matrix, other.matrix))

    def negate(self) -> "AbMap":
        return AbMap(self.source, self.target, mat_scale(-1, self.matrix))

    @staticmethod
    def identity_map(g: FgAbGroup) -> "AbMap":
        return AbMap(g, g, identity(g.ngens))

    @staticmethod
    def zero_map(source: FgAbGroup, target: FgAbGroup) -> "AbMap":
        return AbMap(source, target, zeros(target.ngens, source.ngens))

    def equals(self, other: "AbMap") -> bool:
        """Equality as maps, i.e. matrices agree modulo target relations."""
        if len(self.matrix) != len(other.matrix):
            return False
        for col in range(self.source.ngens):
            d = tuple(self.matrix[i][col] - other.matrix[i][col] for i in range(self.target.ngens))
            if not self.target.is_zero(d):
                return False
        return True


def preimage_lattice(F: Sequence[Sequence[int]], target: FgAbGroup, source_ngens: int | None = None) -> list[Vec]:
    """Basis of {x : F x = 0 in target}, a full-preimage sublattice of Z^n.

    The target relation columns are adjoined as extra unknowns and the
    block kernel is projected back to the x-coordinates.  ``source_ngens``
    is required when F has no rows (a map into the zero group).
    """
    m = len(F)
    n = len(F[0]) if m else source_ngens
    assert n is not None, "source dimension unknown for an empty matrix"
    assert m == target.ngens
    if m == 0:
        return [tuple(c) for c in identity(n)]
    rel_cols = transpose([list(r) for r in target.relations]) if target.relations else zeros(m, 0)
    block = [list(F[i]) + list(rel_cols[i]) for i in range(m)]
    ker = kernel_basis(block)
    return hnf_columns([v[:n] for v in ker], n)


class Subquotient:
    """K / L where L <= K are sublattices of an ambient Z^n.

    Presents the quotient as an FgAbGroup on an HNF basis of K, with exact
    coordinate maps in both directions.
    """

    def __init__(self, n: int, numerator: Iterable[Sequence[int]], denominator: Iterable[Sequence[int]]):
        self.n = n
        self.basis = hnf_columns(numerator, n)
        den = hnf_columns(denominator, n)
        self._basis_matrix = transpose([list(b) for b in self.basis]) if self.basis else zeros(n, 0)
        rel_rows = []
        for d in den:
            c = self._coords(d)
            assert c is not None, "denominator not inside numerator"
            rel_rows.append(c)
        self.group = FgAbGroup(len(self.basis), rel_rows)

    def _coords(self, x: Sequence[int]):
        if not self.basis:
            return () if not any(x) else None
        return solve(self._basis_matrix, x)

    def express(self, x: Sequence[int]) -> Vec:
        """Canonical coordinates of an ambient vector (must lie in K)."""
        c = self._coords(x)
        assert c is not None, "vector not in the numerator lattice"
        return self.group.reduce(c)

    def contains(self, x: Sequence[int]) -> bool:
        return self._coords(x) is not None

    def lift(self, coords: Sequence[int]) -> Vec:
        """Ambient vector with the given presentation coordinates."""
        if not self.basis:
            return (0,) * self.n
        return mat_vec(self._basis_matrix, coords)

    def generator_lifts(self) -> list[Vec]:
        return [self.lift(g) for g in self.group.generator_lifts()]


class Homology:
    """ker(out)/im(inc) at a presented middle term, with explicit lifts."""

    def __init__(self, out_map: AbMap, in_map: AbMap):
        mid = out_map.source
        assert in_map.target.ngens == mid.ngens
        self.middle = mid
        numer = preimage_lattice(out_map.matrix, out_map.target, mid.ngens)
        den: list[Vec] = [tuple(r) for r in mid.relations]
        for j in range(in_map.source.ngens):
            den.append(tuple(in_map.matrix[i][j] for i in range(mid.ngens)))
        self.subquotient = Subquotient(mid.ngens, numer, den)
        self.group = self.subquotient.group

    def class_of(self, x: Sequence[int]) -> Vec:
        return self.subquotient.express(x)

    def representative(self, i: int) -> Vec:
        return self.subquotient.generator_lifts()[i]


def homology_pair(out_map: AbMap, in_map: AbMap) -> FgAbGroup:
    """Homology group of the pair; see Homology for lifts.

    >>> Z = FgAbGroup(1)
    >>> zero = AbMap.zero_map(Z, Z)
    >>> homology_pair(zero, zero).canonical_form()
    (1, ())
    """
    return Homology(out_map, in_map).group


# ---------------------------------------------------------------------------
# hom and tensor


class TensorGroup(FgAbGroup):
    """A (x) B presented on pure tensors of generators.

    Generator (i, j) sits at index i * B.ngens + j.
    """

    def __init__(self, A: FgAbGroup, B: FgAbGroup):
        self.factors = (A, B)
        rels = []
        nb = B.ngens
        na = A.ngens
        for r in A.relations:
            for j in range(nb):
                row = [0] * (na * nb)
                for i in range(na):
                    row[i * nb + j] = r[i]
                rels.append(tuple(row))
        for s in B.relations:
            for i in range(na):
                row = [0] * (na * nb)
                for j in range(nb):
                    row[i * nb + j] = s[j]
                rels.append(tuple(row))
        super().__init__(na * nb, rels)

    def pure(self, x: Sequence[int], y: Sequence[int]) -> Vec:
        nb = self.factors[1].ngens
        out = [0] * self.ngens
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        out[i * nb + j] = xi * yj
        return tuple(out)


def tensor_ab(A: FgAbGroup, B: FgAbGroup) -> TensorGroup:
    """Tensor product of presented groups.

    >>> tensor_ab(FgAbGroup(1, [(4,)]), FgAbGroup(1, [(6,)])).canonical_form()
    (0, (2,))
    """
    return TensorGroup(A, B)


def tensor_map(f: AbMap, g: AbMap) -> AbMap:
    """f (x) g between the tensor presentations (Kronecker matrix)."""
    src = tensor_ab(f.source, g.source)
    tgt = tensor_ab(f.target, g.target)
    nbs = g.source.ngens
    nbt = g.target.ngens
    M = zeros(tgt.ngens, src.ngens)
    for it in range(f.target.ngens):
        for jt in range(nbt):
            row = M[it * nbt + jt]
            for isrc in range(f.source.ngens):
                fv = f.matrix[it][isrc]
                if fv:
                    grow = g.matrix[jt]
                    for jsrc in range(nbs):
                        row[isrc * nbs + jsrc] = fv * grow[jsrc]
    return AbMap(src, tgt, M)


class HomGroup:
    """Hom(A, B) with explicit generating homomorphisms.

    The ambient lattice is vec'd matrices, entry (i, j) at i * A.ngens + j.
    """

    def __init__(self, A: FgAbGroup, B: FgAbGroup):
        self.A = A
        self.B = B
        a, b = A.ngens, B.ngens
        n = a * b
        # well-definedness: M r in rel(B) for every relation r of A
        if A.relations:
            F = []
            for r in A.relations:
                for i in range(b):
                    row = [0] * n
                    for j in range(a):
                        row[i * a + j] = r[j]
                    F.append(row)
            big_target, _ = direct_sum([B] * len(A.relations))
            numer = preimage_lattice(F, big_target)
        else:
            numer = [tuple(c) for c in identity(n)]
        # maps into the relation lattice of B are zero
        den = []
        rel_cols = transpose([list(r) for r in B.relations]) if B.relations else []
        for col in range(len(rel_cols[0]) if rel_cols else 0):
            for j in range(a):
                v = [0] * n
                for i in range(b):
                    v[i * a + j] = rel_cols[i][col]
                den.append(tuple(v))
        self.subquotient = Subquotient(n, numer, den)
        self.group = self.subquotient.group

    def matrix_from_vec(self, v: Sequence[int]) -> Matrix:
        a = self.A.ngens
        return [list(v[i * a:(i + 1) * a]) for i in range(self.B.ngens)]

    def vec_from_matrix(self, M: Sequence[Sequence[int]]) -> Vec:
        out = []
        for row in M:
            out.extend(row)
        return tuple(out)

    def generating_maps(self) -> list[AbMap]:
        return [
            AbMap(self.A, self.B, self.matrix_from_vec(l))
            for l in self.subquotient.generator_lifts()
        ]

    def express(self, f: AbMap) -> Vec:
        return self.subquotient.express(self.vec_from_matrix(f.matrix))


def hom_ab(A: FgAbGroup, B: FgAbGroup) -> HomGroup:
    """Hom group with explicit generators.

    >>> hom_ab(FgAbGroup(1, [(4,)]), FgAbGroup(1, [(6,)])).group.canonical_form()
    (0, (2,))
    """
    return HomGroup(A, B)


def hom_map(f: AbMap, g: AbMap, hom_src: HomGroup | None = None, hom_tgt: HomGroup | None = None) -> AbMap:
    """Hom(f, g): Hom(A, B) -> Hom(A', B') sending phi to g o phi o f,
    for f: A' -> A and g: B -> B'."""
    H = hom_src if hom_src is not None else hom_ab(f.target, g.source)
    H2 = hom_tgt if hom_tgt is not None else hom_ab(f.source, g.target)
    cols = []
    for phi in H.generating_maps():
        composite = g.compose(phi).compose(f)
        cols.append(H2.subquotient.express(H2.vec_from_matrix(composite.matrix)))
    # columns are canonical coordinates of the images of H's canonical gens
    m = len(H2.group.generator_lifts())
    ncols = len(cols)
    M = [[cols[j][i] if i < len(cols[j]) else 0 for j in range(ncols)] for i in range(m)]
    src = canonical_group(H.group)
    tgt = canonical_group(H2.group)
    return AbMap(src, tgt, M)


def canonical_group(g: FgAbGroup) -> FgAbGroup:
    """The same group presented on its canonical cyclic generators."""
    rank, tors = g.canonical_form()
    n = len(tors) + rank
    rels = []
    for i, t in enumerate(tors):
        row = [0] * n
        row[i] = t
        rels.append(tuple(row))
    return FgAbGroup(n, rels)


def is_isomorphism(f: AbMap) -> bool:
    """True iff f is an isomorphism of presented groups.

    Surjectivity: the cokernel presentation collapses.  Injectivity: the
    kernel lattice upstairs lies inside the source relations.
    """
    if not f.well_defined():
        return False
    cols = [
        tuple(f.matrix[i][j] for i in range(f.target.ngens))
        for j in range(f.source.ngens)
    ]
    coker = FgAbGroup(f.target.ngens, list(f.target.relations) + [c for c in cols])
    if not coker.is_trivial():
        return False
    ker = preimage_lattice(f.matrix, f.target, f.source.ngens)
    return all(f.source.is_zero(v) for v in ker)


def reduce_presentation(ngens: int, relations: Iterable[Sequence[int]]):
    """Tietze-shrink a presentation by eliminating unit-pivot generators.

    Returns (survivors, proj, rels): the kept generator indices, a
    len(survivors) x ngens matrix rewriting every old generator in the
    survivors, and the residual relation rows over the survivors.  proj is
    a retraction (identity on the survivors), so Z^ngens / <relations> and
    Z^survivors / <rels> present the same group and proj transports
    coordinates between them.

    Rows may be dense sequences or sparse {index: coeff} dicts.
    """
    rels: list[dict[int, int]] = []
    for row in relations:
        if isinstance(row, dict):
            d = {j: c for j, c in row.items() if c}
        else:
            d = {j: c for j, c in enumerate(row) if c}
        if d:
            rels.append(d)
    uses: dict[int, set[int]] = {j: set() for j in range(ngens)}
    for ri, d in enumerate(rels):
        for j in d:
            uses[j].add(ri)
    alive_rel = set(range(len(rels)))
    alive_gen = set(range(ngens))
    eliminated: list[tuple[int, dict[int, int]]] = []
    queue = deque(sorted(alive_rel, key=lambda ri: len(rels[ri])))
    queued = set(alive_rel)
    while queue:
        ri = queue.popleft()
        queued.discard(ri)
        if ri not in alive_rel:
            continue
        d = rels[ri]
        units = [j for j, c in d.items() if c == 1 or c == -1]
        if not units:
            continue
        j = min(units, key=lambda k: (len(uses[k]), k))
        c = d[j]
        expr = {k: -v * c for k, v in d.items() if k != j}
        alive_rel.discard(ri)
        for k in d:
            uses[k].discard(ri)
        alive_gen.discard(j)
        eliminated.append((j, expr))
        for si in list(uses[j]):
            e = rels[si]
            coeff = e.pop(j)
            uses[j].discard(si)
            for k, v in expr.items():
                w = e.get(k, 0) + coeff * v
                if w:
                    if k not in e:
                        uses[k].add(si)
                    e[k] = w
                elif k in e:
                    del e[k]
                    uses[k].discard(si)
            if not e:
                alive_rel.discard(si)
            elif si not in queued:
                queue.append(si)
                queued.add(si)
    survivors = sorted(alive_gen)
    pos = {j: i for i, j in enumerate(survivors)}
    resolved: dict[int, dict[int, int]] = {}
    for j, expr in reversed(eliminated):
        acc: dict[int, int] = {}
        for k, v in expr.items():
            if k in pos:
                acc[k] = acc.get(k, 0) + v
            else:
                for k2, v2 in resolved[k].items():
                    acc[k2] = acc.get(k2, 0) + v * v2
        resolved[j] = {k: v for k, v in acc.items() if v}
    proj = [[0] * ngens for _ in survivors]
    for j in range(ngens):
        if j in pos:
            proj[pos[j]][j] = 1
        else:
            for k, v in resolved[j].items():
                proj[pos[k]][j] = v
    seen = set()
    out_rels = []
    for ri in sorted(alive_rel):
        row = [0] * len(survivors)
        for k, v in rels[ri].items():
            row[pos[k]] = v
        t = tuple(row)
        if t not in seen:
            seen.add(t)
            out_rels.append(row)
    return survivors, proj, out_rels


def presented_group(ngens: int, relations: Iterable[Sequence[int]]):
    """Canonical group of a (possibly huge, sparse) presentation.

    Returns (group, proj, lift) with group in canonical diagonal form,
    proj mapping old Z^ngens coordinates onto its generators and lift a
    section of proj (exact on canonical generators).
    """
    surv, proj1, rels1 = reduce_presentation(ngens, relations)
    small = FgAbGroup(len(surv), rels1)
    canon = canonical_group(small)
    proj2 = [[0] * len(surv) for _ in range(canon.ngens)]
    for j in range(len(surv)):
        unit = [0] * len(surv)
        unit[j] = 1
        col = small.reduce(unit)
        for i in range(canon.ngens):
            proj2[i][j] = col[i]
    lifts = small.generator_lifts()
    # proj2 . proj1, exploiting the sparsity of the retraction rows
    proj = [[0] * ngens for _ in range(canon.ngens)]
    for t in range(len(surv)):
        row1 = proj1[t]
        for j, v in enumerate(row1):
            if v:
                for i in range(canon.ngens):
                    w = proj2[i][t]
                    if w:
                        proj[i][j] += w * v
    lift = [[0] * canon.ngens for _ in range(ngens)]
    for k in range(canon.ngens):
        for i, s in enumerate(surv):
            lift[s][k] = lifts[k][i]
    return canon, proj, lift
