"""Exact linear algebra over Q(i).

Matrices are tuples of tuples of Scalar (immutable once built); row vectors
inside the elimination routines are plain lists.  Everything here is plain
Gauss-Jordan with the pivot normalized to 1; no pivoting heuristics are
needed since arithmetic is exact, and scanning order keeps results
deterministic.
"""

from .scalars import ZERO, ONE


def freeze(rows):
    return tuple(tuple(r) for r in rows)


def mzeros(r, c):
    row = (ZERO,) * c
    return tuple(row for _ in range(r))


def mid(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def madd(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def msub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mneg(a):
    return tuple(tuple(-x for x in r) for r in a)


def mscale(a, c):
    return tuple(tuple(x * c for x in r) for r in a)


def mmul(a, b):
    """Matrix product with zero-row skipping; the action matrices are
    nilpotent and mostly zeros, so this matters."""
    n = len(a)
    inner = len(b)
    if inner == 0:
        return mzeros(n, 0)
    m = len(b[0])
    out = []
    for i in range(n):
        arow = a[i]
        acc = [ZERO] * m
        for k in range(inner):
            c = arow[k]
            if not c:
                continue
            brow = b[k]
            for j in range(m):
                v = brow[j]
                if v:
                    acc[j] = acc[j] + c * v
        out.append(tuple(acc))
    return tuple(out)


def mtranspose(a):
    return tuple(zip(*a)) if a else ()


def mat_is_zero(a):
    return all(not x for r in a for x in r)


def mat_eq(a, b):
    return a == b


def flatten(a):
    return tuple(x for r in a for x in r)


def unflatten(v, rows, cols):
    it = iter(v)
    return tuple(tuple(next(it) for _ in range(cols)) for _ in range(rows))


def mat_vec(a, v):
    out = []
    for row in a:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(u, c):
    return tuple(x * c for x in u)


def vec_is_zero(u):
    return not any(u)


def rref(rows):
    """Reduced row echelon form.  Returns (rows, pivot_columns); zero rows
    are dropped."""
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if work else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if work[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = work[r][col].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][col]:
                c = work[i][col]
                work[i] = [x - c * y for x, y in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return [work[i] for i in range(r)], pivots


def rank(rows):
    return len(rref(rows)[0])


def nullspace(rows, ncols):
    """Basis of {x : A x = 0} for A given by rows; each basis vector has a 1
    in one free column, deterministic order."""
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for rrow, p in zip(red, pivots):
            if rrow[f]:
                v[p] = -rrow[f]
        basis.append(tuple(v))
    return basis


def solve(rows, rhs):
    """One solution x of A x = b, or None.  rows: list of rows of A."""
    if not rows:
        return () if not any(rhs) else None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    x = [ZERO] * ncols
    for rrow, p in zip(red, pivots):
        if p == ncols:
            return None  # inconsistent: pivot in the rhs column
        x[p] = rrow[ncols]
    return tuple(x)


class SpanBasis:
    """Incrementally maintained RREF basis of a span of row vectors.

    add() reports whether the span grew; coords() expresses a member in the
    current echelon rows.  Rows are kept fully reduced, so reduction below is
    a single pass in pivot order.
    """

    def __init__(self, ncols, rows=()):
        self.ncols = ncols
        self.rows = []
        self.pivots = []
        for r in rows:
            self.add(r)

    @property
    def dim(self):
        return len(self.rows)

    def _reduce(self, v, record=None):
        v = list(v)
        for idx, (row, p) in enumerate(zip(self.rows, self.pivots)):
            c = v[p]
            if c:
                if record is not None:
                    record[idx] = c
                for j in range(self.ncols):
                    if row[j]:
                        v[j] = v[j] - c * row[j]
        return v

    def add(self, v):
        """Insert v; True iff the dimension grew."""
        v = self._reduce(v)
        pivot = None
        for j in range(self.ncols):
            if v[j]:
                pivot = j
                break
        if pivot is None:
            return False
        inv = v[pivot].inverse()
        v = [x * inv for x in v]
        # keep existing rows reduced against the new one
        for i, row in enumerate(self.rows):
            c = row[pivot]
            if c:
                self.rows[i] = [x - c * y for x, y in zip(row, v)]
        at = 0
        while at < len(self.pivots) and self.pivots[at] < pivot:
            at += 1
        self.rows.insert(at, v)
        self.pivots.insert(at, pivot)
        return True

    def contains(self, v):
        return not any(self._reduce(v))

    def coords(self, v):
        """Coefficients of v against the echelon rows, or None if outside."""
        record = {}
        residue = self._reduce(v, record)
        if any(residue):
            return None
        return tuple(record.get(i, ZERO) for i in range(len(self.rows)))

    def frozen_rows(self):
        return freeze(self.rows)

    def same_span(self, other):
        """Equality of spans; RREF is canonical so row comparison suffices."""
        if self.dim != other.dim or self.pivots != other.pivots:
            return False
        return self.frozen_rows() == other.frozen_rows()


def span_of(rows, ncols):
    sb = SpanBasis(ncols)
    for r in rows:
        sb.add(r)
    return sb


def subspace_intersection(rows_a, rows_b, ncols):
    """Basis of (span of rows_a) intersect (span of rows_b)."""
    a = [r for r in rows_a if any(r)]
    b = [r for r in rows_b if any(r)]
    if not a or not b:
        return []
    # kernel of M^T where M has the a-rows then b-rows:
    # alpha . A + beta . B = 0  <=>  alpha . A = -beta . B in the intersection
    m = a + b
    cols = len(m)
    kernel_rows = [[m[t][j] for t in range(cols)] for j in range(ncols)]
    out = SpanBasis(ncols)
    basis = []
    for vec in nullspace(kernel_rows, cols):
        comb = [ZERO] * ncols
        for t in range(len(a)):
            if vec[t]:
                comb = [x + vec[t] * y for x, y in zip(comb, a[t])]
        if any(comb) and out.add(comb):
            basis.append(tuple(comb))
    return out.frozen_rows()


def det(mat):
    """Exact determinant by elimination (scalar entries)."""
    n = len(mat)
    work = [list(r) for r in mat]
    total = ONE
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if work[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            return ZERO
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            total = -total
        pv = work[col][col]
        total = total * pv
        inv = pv.inverse()
        for i in range(col + 1, n):
            if work[i][col]:
                c = work[i][col] * inv
                work[i] = [x - c * y for x, y in zip(work[i], work[col])]
    return total


def mat_inverse(mat):
    """Exact inverse; raises on singular input."""
    n = len(mat)
    aug = [list(mat[i]) + [ONE if j == i else ZERO for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return freeze([row[n:] for row in red])
