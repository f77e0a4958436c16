"""Exact linear algebra over the integers.

Smith normal form with unimodular transforms, integer lattice utilities
(solve / kernel / column space), homology of bounded chain complexes of
free abelian groups, and finitely generated abelian groups in
invariant-factor normal form.

Everything runs on Python integers, so there is no overflow to check:
arbitrary precision is the contract, not an option.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd


class ExactAlgebraError(Exception):
    """Base class for errors raised by this module."""


class NotInLatticeError(ExactAlgebraError):
    """A vector was expected to lie in an integer lattice but does not."""


class ShapeError(ExactAlgebraError):
    """Matrix dimensions do not match the requested operation."""


# ---------------------------------------------------------------------------
# Dense integer matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, immutable.

    A 0-row or 0-column matrix is legal and shows up constantly here
    (empty bases, maps from or to the zero group).
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative matrix dimensions")
        if len(self.entries) != self.rows:
            raise ShapeError("row count does not match entries")
        for row in self.entries:
            if len(row) != self.cols:
                raise ShapeError("ragged rows")

    @staticmethod
    def from_rows(rows: list[list[int]]) -> "IntMatrix":
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return IntMatrix(r, c, tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def from_columns(cols: list[list[int]], rows: int) -> "IntMatrix":
        return IntMatrix(rows, len(cols),
                         tuple(tuple(col[i] for col in cols) for i in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> list[int]:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            ri = self.entries[i]
            out.append(tuple(sum(ri[k] * other.entries[k][j] for k in range(self.cols))
                             for j in range(other.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec: list[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ShapeError("vector length does not match column count")
        return [sum(self.entries[i][k] * vec[k] for k in range(self.cols))
                for i in range(self.rows)]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ShapeError("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(self.entries[i] + other.entries[i] for i in range(self.rows)))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def pretty(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"[{self.rows}x{self.cols}]"
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """left * matrix * right == diag, with left/right unimodular.

    left_inv and right_inv are the exact inverses, tracked during the
    reduction so no separate inversion step is needed.
    """

    diag: IntMatrix
    left: IntMatrix
    right: IntMatrix
    left_inv: IntMatrix
    right_inv: IntMatrix
    rank: int

    def diagonal(self) -> list[int]:
        n = min(self.diag.rows, self.diag.cols)
        return [self.diag[i, i] for i in range(n)]

    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal() if d != 0]


_SNF_CACHE: dict[tuple, SmithForm] = {}


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Diagonalize an integer matrix by unimodular row/column operations.

    The diagonal is non-negative with each entry dividing the next.
    Pivots are chosen by least absolute value, so entries stay small on
    the nearly-diagonal matrices this package produces.  Results are
    memoized: the pipelines hit the same tiny matrices constantly.
    """
    key = (m.rows, m.cols, m.entries)
    cached = _SNF_CACHE.get(key)
    if cached is not None:
        return cached
    form = _smith_normal_form(m)
    if len(_SNF_CACHE) < 250_000:
        _SNF_CACHE[key] = form
    return form


def _smith_normal_form(m: IntMatrix) -> SmithForm:
    r, c = m.rows, m.cols
    d = [list(row) for row in m.entries]
    left = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    left_inv = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    right = [[1 if i == j else 0 for j in range(c)] for i in range(c)]
    right_inv = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def row_add(i, j, q):
        # row i += q * row j; inverse op applied to left_inv on the right
        for k in range(c):
            d[i][k] += q * d[j][k]
        for k in range(r):
            left[i][k] += q * left[j][k]
        for t in range(r):
            left_inv[t][j] -= q * left_inv[t][i]

    def col_add(j, k, q):
        # col j += q * col k
        for i in range(r):
            d[i][j] += q * d[i][k]
        for i in range(c):
            right[i][j] += q * right[i][k]
        for t in range(c):
            right_inv[k][t] -= q * right_inv[j][t]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        left[i], left[j] = left[j], left[i]
        for t in range(r):
            left_inv[t][i], left_inv[t][j] = left_inv[t][j], left_inv[t][i]

    def col_swap(i, j):
        for t in range(r):
            d[t][i], d[t][j] = d[t][j], d[t][i]
        for t in range(c):
            right[t][i], right[t][j] = right[t][j], right[t][i]
        right_inv[i], right_inv[j] = right_inv[j], right_inv[i]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        left[i] = [-x for x in left[i]]
        for t in range(r):
            left_inv[t][i] = -left_inv[t][i]

    t = 0
    n = min(r, c)
    while t < n:
        # least-absolute-value nonzero pivot in the trailing submatrix
        pivot = None
        for i in range(t, r):
            for j in range(t, c):
                if d[i][j] != 0 and (pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            row_swap(pi, t)
        if pj != t:
            col_swap(pj, t)
        if d[t][t] < 0:
            row_negate(t)

        dirty = False
        for i in range(t + 1, r):
            if d[i][t] != 0:
                q = d[i][t] // d[t][t]
                if q:
                    row_add(i, t, -q)
                if d[i][t] != 0:
                    dirty = True
        for j in range(t + 1, c):
            if d[t][j] != 0:
                q = d[t][j] // d[t][t]
                if q:
                    col_add(j, t, -q)
                if d[t][j] != 0:
                    dirty = True
        if dirty:
            continue  # smaller remainders appeared; re-pick the pivot

        # enforce divisibility: fold any non-multiple into the pivot's row
        bad = None
        for i in range(t + 1, r):
            for j in range(t + 1, c):
                if d[i][j] % d[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_add(t, bad, 1)
            continue
        t += 1

    rank = sum(1 for i in range(n) if d[i][i] != 0)
    return SmithForm(
        diag=IntMatrix.from_rows(d),
        left=IntMatrix.from_rows(left),
        right=IntMatrix.from_rows(right),
        left_inv=IntMatrix.from_rows(left_inv),
        right_inv=IntMatrix.from_rows(right_inv),
        rank=rank,
    )


# ---------------------------------------------------------------------------
# Lattice utilities
# ---------------------------------------------------------------------------

def solve(m: IntMatrix, b: list[int]) -> list[int] | None:
    """One integer solution x of m x = b, or None if there is none."""
    if len(b) != m.rows:
        raise ShapeError("right-hand side length mismatch")
    snf = smith_normal_form(m)
    lb = snf.left.apply(b)
    y = [0] * m.cols
    n = min(m.rows, m.cols)
    for i in range(m.rows):
        di = snf.diag[i, i] if i < n else 0
        if di == 0:
            if lb[i] != 0:
                return None
        else:
            if lb[i] % di != 0:
                return None
            if i < m.cols:
                y[i] = lb[i] // di
    return snf.right.apply(y)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel lattice of m."""
    snf = smith_normal_form(m)
    cols = [snf.right.column(j) for j in range(snf.rank, m.cols)]
    return IntMatrix.from_columns(cols, m.cols)


def column_space_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the column lattice (integer span) of m."""
    snf = smith_normal_form(m)
    cols = []
    for j in range(snf.rank):
        dj = snf.diag[j, j]
        cols.append([dj * snf.left_inv[i, j] for i in range(m.rows)])
    return IntMatrix.from_columns(cols, m.rows)


def lattice_contains(basis: IntMatrix, v: list[int]) -> bool:
    return solve(basis, v) is not None


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------

def _factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FgAbelian:
    """Finitely generated abelian group in invariant-factor normal form.

    rank is the free rank; torsion is (d_1, ..., d_k) with d_1 | d_2 | ...
    and each d_i >= 2.  The normal form is unique, so equality of values
    is isomorphism of groups.
    """

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ExactAlgebraError("negative rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ExactAlgebraError(f"torsion {self.torsion} is not a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ExactAlgebraError("torsion coefficients must be >= 2")

    @staticmethod
    def from_orders(orders: list[int]) -> "FgAbelian":
        """Normalize arbitrary cyclic orders (0 meaning Z) into normal form."""
        rank = sum(1 for d in orders if d == 0)
        primes: dict[int, list[int]] = {}
        for d in orders:
            if d in (0, 1):
                continue
            for p, e in _factorint(abs(d)).items():
                primes.setdefault(p, []).append(e)
        length = max((len(v) for v in primes.values()), default=0)
        factors = []
        for i in range(length):
            f = 1
            for p, exps in primes.items():
                exps_sorted = sorted(exps, reverse=True)
                if i < len(exps_sorted):
                    f *= p ** exps_sorted[i]
            factors.append(f)
        # factors currently largest-first; the chain wants smallest-first
        return FgAbelian(rank, tuple(reversed(factors)))

    @staticmethod
    def zero() -> "FgAbelian":
        return FgAbelian(0, ())

    @staticmethod
    def free(rank: int) -> "FgAbelian":
        return FgAbelian(rank, ())

    @staticmethod
    def cyclic(d: int) -> "FgAbelian":
        return FgAbelian.from_orders([d])

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def direct_sum(self, other: "FgAbelian") -> "FgAbelian":
        return FgAbelian.from_orders([0] * (self.rank + other.rank)
                                     + list(self.torsion) + list(other.torsion))

    def composition_factors(self) -> tuple[int, tuple[int, ...]]:
        """(free rank, sorted multiset of prime-power torsion orders)."""
        pieces = []
        for d in self.torsion:
            for p, e in _factorint(d).items():
                pieces.append(p ** e)
        return (self.rank, tuple(sorted(pieces)))

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def iso_check(g1: FgAbelian, g2: FgAbelian) -> bool:
    """Structural equality of normal forms, i.e. isomorphism."""
    return g1 == g2


def composition_factors(g: FgAbelian) -> tuple[int, tuple[int, ...]]:
    return g.composition_factors()


def has_nonzero_hom(src: FgAbelian, dst: FgAbelian) -> bool:
    """Whether Hom(src, dst) != 0.

    Hom(Z, G) != 0 iff G != 0; Hom(Z/d, G) != 0 iff G has torsion
    sharing a prime with d (torsion maps nowhere into a free group).
    """
    if src.rank > 0 and not dst.is_zero():
        return True
    for d in src.torsion:
        for e in dst.torsion:
            if gcd(d, e) > 1:
                return True
    return False


# ---------------------------------------------------------------------------
# Presented subquotients of Z^n
# ---------------------------------------------------------------------------

_PRES_CACHE: dict[tuple, "PresentedGroup"] = {}


@dataclass(frozen=True)
class PresentedGroup:
    """A subquotient cycles/bounds of an ambient Z^n with chosen generators.

    gens columns live in ambient coordinates, one per invariant factor of
    the group; orders[i] is the order of gens[:, i] (0 = infinite).  rels
    columns span the denominator lattice, used to express arbitrary
    ambient vectors in generator coordinates.
    """

    ambient: int
    gens: IntMatrix
    orders: tuple[int, ...]
    rels: IntMatrix
    group: FgAbelian

    @staticmethod
    def from_lattices(cycles: IntMatrix, bounds: IntMatrix) -> "PresentedGroup":
        """Present cycles/bounds; bounds must be a sublattice of cycles."""
        key = (cycles.rows, cycles.entries, bounds.entries)
        cached = _PRES_CACHE.get(key)
        if cached is not None:
            return cached
        out = PresentedGroup._from_lattices(cycles, bounds)
        if len(_PRES_CACHE) < 250_000:
            _PRES_CACHE[key] = out
        return out

    @staticmethod
    def _from_lattices(cycles: IntMatrix, bounds: IntMatrix) -> "PresentedGroup":
        ambient = cycles.rows
        if bounds.rows != ambient:
            raise ShapeError("cycle/boundary ambient mismatch")
        k = cycles.cols
        coord_cols = []
        for j in range(bounds.cols):
            x = solve(cycles, bounds.column(j))
            if x is None:
                raise NotInLatticeError("boundary not contained in cycle lattice")
            coord_cols.append(x)
        coords = IntMatrix.from_columns(coord_cols, k)
        snf = smith_normal_form(coords)
        gens_cols = []
        orders = []
        for i in range(k):
            di = snf.diag[i, i] if i < min(k, coords.cols) else 0
            if i < snf.rank and di == 1:
                continue
            gens_cols.append(cycles.apply(snf.left_inv.column(i)))
            orders.append(di if i < snf.rank else 0)
        gens = IntMatrix.from_columns(gens_cols, ambient)
        group = FgAbelian.from_orders([o for o in orders])
        return PresentedGroup(ambient, gens, tuple(orders), bounds, group)

    @staticmethod
    def zero(ambient: int) -> "PresentedGroup":
        return PresentedGroup(ambient, IntMatrix.zero(ambient, 0), (),
                              IntMatrix.zero(ambient, 0), FgAbelian.zero())

    @staticmethod
    def full_free(ambient: int) -> "PresentedGroup":
        return PresentedGroup(ambient, IntMatrix.identity(ambient),
                              (0,) * ambient, IntMatrix.zero(ambient, 0),
                              FgAbelian.free(ambient))

    def is_zero(self) -> bool:
        return self.group.is_zero()

    def express(self, v: list[int]) -> list[int]:
        """Coordinates of an ambient vector in the chosen generators."""
        if len(v) != self.ambient:
            raise ShapeError("ambient dimension mismatch")
        sys = self.gens.hstack(self.rels)
        x = solve(sys, v)
        if x is None:
            raise NotInLatticeError("vector does not lie in the presented subquotient")
        out = []
        for i, o in enumerate(self.orders):
            out.append(x[i] % o if o else x[i])
        return out

    def reduce_coords(self, coords: list[int]) -> list[int]:
        return [c % o if o else c for c, o in zip(coords, self.orders)]


def hom_matrix(src: PresentedGroup, dst: PresentedGroup,
               ambient_map: "callable") -> IntMatrix:
    """Matrix (in generator coordinates) of a map induced on presentations.

    ambient_map takes an ambient vector of src and returns one of dst.
    Well-definedness (relations map to relations) is checked.
    """
    cols = []
    for j in range(src.gens.cols):
        img = ambient_map(src.gens.column(j))
        cols.append(dst.express(img))
    mat = IntMatrix.from_columns(cols, len(dst.orders))
    for j, o in enumerate(src.orders):
        if o:
            scaled = [o * mat[i, j] for i in range(mat.rows)]
            if any(x % (dst.orders[i] or 0) if dst.orders[i] else x
                   for i, x in enumerate(scaled)):
                raise ExactAlgebraError("map is not well defined on torsion")
    return mat


def _rel_columns(orders: tuple[int, ...]) -> IntMatrix:
    n = len(orders)
    cols = []
    for i, o in enumerate(orders):
        if o:
            col = [0] * n
            col[i] = o
            cols.append(col)
    return IntMatrix.from_columns(cols, n)


def presented_kernel(mat: IntMatrix, src_orders: tuple[int, ...],
                     dst_orders: tuple[int, ...]) -> PresentedGroup:
    """Kernel of a map of presented groups, in source generator coordinates.

    mat maps source generator coords to destination generator coords.
    """
    n_src = len(src_orders)
    dst_rels = _rel_columns(dst_orders)
    big = mat.hstack(dst_rels)
    kb = kernel_basis(big)
    proj_cols = [[kb[i, j] for i in range(n_src)] for j in range(kb.cols)]
    span = IntMatrix.from_columns(proj_cols, n_src)
    k_lattice = column_space_basis(span)
    src_rels = _rel_columns(src_orders)
    return PresentedGroup.from_lattices(k_lattice, src_rels)


def presented_cokernel(mat: IntMatrix, dst_orders: tuple[int, ...]) -> PresentedGroup:
    """Cokernel of a map of presented groups, in destination coordinates."""
    n_dst = len(dst_orders)
    rels = mat.hstack(_rel_columns(dst_orders))
    return PresentedGroup.from_lattices(IntMatrix.identity(n_dst), rels)


def map_is_iso(mat: IntMatrix, src_orders: tuple[int, ...],
               dst_orders: tuple[int, ...]) -> bool:
    """Whether the induced map of presented groups is an isomorphism."""
    return (presented_kernel(mat, src_orders, dst_orders).is_zero()
            and presented_cokernel(mat, dst_orders).is_zero())


def image_contains(mat: IntMatrix, dst_orders: tuple[int, ...],
                   vec: list[int]) -> bool:
    """Whether vec (destination coords) lies in the image of the map."""
    return solve(mat.hstack(_rel_columns(dst_orders)), vec) is not None


# ---------------------------------------------------------------------------
# Chain complexes of free abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntComplex:
    """Bounded chain complex of free abelian groups.

    dims[i] is the rank of C_{bottom+i}; diffs[i] is the boundary map
    C_{bottom+i+1} -> C_{bottom+i}.  The square-zero law is checked at
    construction, always.
    """

    bottom: int
    dims: tuple[int, ...]
    diffs: tuple[IntMatrix, ...] = field(default=())

    def __post_init__(self):
        if len(self.diffs) != max(0, len(self.dims) - 1):
            raise ShapeError("number of differentials does not match dims")
        for i, d in enumerate(self.diffs):
            if d.rows != self.dims[i] or d.cols != self.dims[i + 1]:
                raise ShapeError(f"differential {i} has shape {d.rows}x{d.cols}, "
                                 f"expected {self.dims[i]}x{self.dims[i + 1]}")
        for i in range(len(self.diffs) - 1):
            if not self.diffs[i].mul(self.diffs[i + 1]).is_zero():
                raise ExactAlgebraError(f"d o d != 0 between degrees "
                                        f"{self.bottom + i + 2} and {self.bottom + i}")

    @property
    def top(self) -> int:
        return self.bottom + len(self.dims) - 1

    def dim(self, k: int) -> int:
        i = k - self.bottom
        if 0 <= i < len(self.dims):
            return self.dims[i]
        return 0

    def boundary(self, k: int) -> IntMatrix:
        """The map C_k -> C_{k-1} (zero matrix outside the support)."""
        i = k - self.bottom - 1
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return IntMatrix.zero(self.dim(k - 1), self.dim(k))


def homology_at(c: IntComplex, k: int) -> FgAbelian:
    """ker(d_k) / im(d_{k+1}) in invariant-factor normal form."""
    if c.dim(k) == 0:
        return FgAbelian.zero()
    return homology_with_basis(c, k).group


def homology_with_basis(c: IntComplex, k: int) -> PresentedGroup:
    """Homology at k together with representing cycles in C_k coordinates."""
    n = c.dim(k)
    if n == 0:
        return PresentedGroup.zero(0)
    out = c.boundary(k)
    into = c.boundary(k + 1)
    cycles = kernel_basis(out) if out.rows else IntMatrix.identity(n)
    bounds = column_space_basis(into) if into.cols else IntMatrix.zero(n, 0)
    return PresentedGroup.from_lattices(cycles, bounds)
