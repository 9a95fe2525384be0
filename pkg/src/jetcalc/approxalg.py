"""Algebras with an increasing chain of idempotents standing in for an
approximate identity, modules over them, and the double-commutant test.

The chain (alpha_1 <= ... <= alpha_m) satisfies alpha_i alpha_j = alpha_i
for i <= j, and every basis element is absorbed by some alpha_j.  A module
is approximately unital when the images of the pi(alpha_j) exhaust the
space; at finite dimension that forces pi(alpha_m) = id, so strictly
smaller corners only show up on modules where the chain has not caught up
with the action (a junk summand nothing absorbs), which the constructor
permits only on request.

The membership test for End^# is the constructive one: take a chain
idempotent absorbing phi, a basis u_1..u_n of its image, the module W
generated by the single stacked tuple (u_1,..,u_n) inside V^n, and ask
whether the diagonal action of phi preserves W.  That one module decides
membership in the image of the algebra, and a witness element is recovered
by a linear solve and re-verified exactly.
"""

import json

from .scalars import ZERO, ONE
from .poly import parse_scalar
from . import linalg
from .linalg import (SpanBasis, mmul, madd, mscale, mid, mzeros, freeze,
                     flatten, unflatten, mat_vec)


class ApproxAlgebra:
    """Associative algebra on a finite basis with sparse structure constants
    and a distinguished increasing idempotent chain."""

    __slots__ = ("dim", "sc", "chain", "labels")

    def __init__(self, dim, sc, chain, labels=None, check=True, check_assoc=True):
        self.dim = dim
        cleaned = {}
        for key, row in sc.items():
            row = {t: c for t, c in row.items() if c}
            if row:
                cleaned[key] = row
        self.sc = cleaned
        self.chain = tuple(tuple(x for x in a) for a in chain)
        if labels is None:
            labels = tuple("e%d" % t for t in range(dim))
        self.labels = tuple(labels)
        if not self.chain:
            raise ValueError("the idempotent chain must be nonempty")
        for a in self.chain:
            if len(a) != dim:
                raise ValueError("chain element has wrong length")
        if check:
            self.validate(check_assoc=check_assoc)

    def mul(self, x, y):
        """Product of two elements given by coordinates."""
        out = [ZERO] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                row = self.sc.get((i, j))
                if row:
                    f = xi * yj
                    for t, c in row.items():
                        out[t] = out[t] + f * c
        return tuple(out)

    def basis_elem(self, t):
        return tuple(ONE if s == t else ZERO for s in range(self.dim))

    def validate(self, check_assoc=True):
        chain = self.chain
        for a in range(len(chain)):
            for b in range(a, len(chain)):
                lo, hi = chain[a], chain[b]
                if self.mul(lo, hi) != lo or self.mul(hi, lo) != lo:
                    raise ValueError("chain elements %d and %d do not absorb" % (a, b))
        for t in range(self.dim):
            e = self.basis_elem(t)
            if not any(self.mul(al, e) == e and self.mul(e, al) == e for al in chain):
                raise ValueError("basis element %d is absorbed by no chain idempotent" % t)
        if check_assoc:
            basis = [self.basis_elem(t) for t in range(self.dim)]
            for i in range(self.dim):
                for j in range(self.dim):
                    ij = self.mul(basis[i], basis[j])
                    for t in range(self.dim):
                        if self.mul(ij, basis[t]) != self.mul(basis[i], self.mul(basis[j], basis[t])):
                            raise ValueError("associativity fails on triple (%d,%d,%d)"
                                             % (i, j, t))

    @classmethod
    def from_blocks(cls, sizes, check=True):
        """Direct sum of full matrix algebras; basis = matrix units, chain =
        partial sums of the block identities."""
        sizes = list(sizes)
        if not sizes:
            raise ValueError("need at least one block")
        index = {}
        labels = []
        t = 0
        for b, d in enumerate(sizes):
            for r in range(d):
                for c in range(d):
                    index[(b, r, c)] = t
                    labels.append("b%d:%d%d" % (b, r, c))
                    t += 1
        dim = t
        sc = {}
        for b, d in enumerate(sizes):
            for r in range(d):
                for c in range(d):
                    i = index[(b, r, c)]
                    for c2 in range(d):
                        j = index[(b, c, c2)]
                        sc[(i, j)] = {index[(b, r, c2)]: ONE}
        chain = []
        acc = [ZERO] * dim
        for b, d in enumerate(sizes):
            for r in range(d):
                acc[index[(b, r, r)]] = ONE
            chain.append(tuple(acc))
        return cls(dim, sc, chain, labels, check=check, check_assoc=False)

    @classmethod
    def from_matrix_basis(cls, mats, check=True):
        """Algebra spanned by matrices (must be closed under product and
        contain the identity); structure constants read off by expressing
        products in the reduced basis.  Chain = the identity alone.
        Returns the algebra together with its defining module."""
        mats = [freeze(m) for m in mats]
        n = len(mats[0])
        sb = SpanBasis(n * n)
        for m in mats:
            sb.add(flatten(m))
        # the algebra basis is the echelon basis of the span, so that
        # coordinate vectors from the span line up with basis indices
        basis_mats = [unflatten(row, n, n) for row in sb.frozen_rows()]
        dim = len(basis_mats)
        id_coords = sb.coords(flatten(mid(n)))
        if id_coords is None:
            raise ValueError("identity matrix is not in the span")
        sc = {}
        for i in range(dim):
            for j in range(dim):
                coords = sb.coords(flatten(mmul(basis_mats[i], basis_mats[j])))
                if coords is None:
                    raise ValueError("basis is not closed under products")
                row = {t: c for t, c in enumerate(coords) if c}
                if row:
                    sc[(i, j)] = row
        alg = cls(dim, sc, [tuple(id_coords)], check=check, check_assoc=False)
        module = ApproxModule(alg, n, basis_mats, check=check)
        return alg, module

    def __repr__(self):
        return "ApproxAlgebra(dim=%d, chain=%d)" % (self.dim, len(self.chain))


def block_module(sizes, check=True):
    """Block matrix algebra acting on the direct sum of its column spaces;
    returns (algebra, module)."""
    alg = ApproxAlgebra.from_blocks(sizes, check=check)
    dim = sum(sizes)
    offsets = []
    off = 0
    for d in sizes:
        offsets.append(off)
        off += d
    mats = []
    for b, d in enumerate(sizes):
        for r in range(d):
            for c in range(d):
                m = [[ZERO] * dim for _ in range(dim)]
                m[offsets[b] + r][offsets[b] + c] = ONE
                mats.append(m)
    return alg, ApproxModule(alg, dim, mats, check=check)


class ApproxModule:
    """Module over an ApproxAlgebra: one action matrix per basis element."""

    __slots__ = ("algebra", "dim", "mats")

    def __init__(self, algebra, dim, mats, check=True, require_unital=True):
        mats = tuple(freeze(m) for m in mats)
        if len(mats) != algebra.dim:
            raise ValueError("need one action matrix per basis element")
        for m in mats:
            if len(m) != dim or any(len(r) != dim for r in m):
                raise ValueError("action matrices must be dim x dim")
        self.algebra = algebra
        self.dim = dim
        self.mats = mats
        if check:
            self.validate(require_unital=require_unital)

    def act(self, coords):
        out = mzeros(self.dim, self.dim)
        for t, c in enumerate(coords):
            if c:
                out = madd(out, mscale(self.mats[t], c))
        return out

    def idem_mat(self, j):
        return self.act(self.algebra.chain[j])

    def validate(self, require_unital=True):
        A = self.algebra
        for i in range(A.dim):
            for j in range(A.dim):
                prod = mmul(self.mats[i], self.mats[j])
                if prod != self.act(A.mul(A.basis_elem(i), A.basis_elem(j))):
                    raise ValueError("action is not multiplicative on pair (%d,%d)" % (i, j))
        for j in range(len(A.chain)):
            P = self.idem_mat(j)
            if mmul(P, P) != P:
                raise ValueError("chain element %d does not act idempotently" % j)
        if require_unital and not self.is_approx_unital():
            raise ValueError("module is not approximately unital "
                             "(no chain idempotent acts as the identity)")

    def is_approx_unital(self):
        """The images of the chain idempotents exhaust the space: since the
        chain increases, the top idempotent must act as the identity."""
        return self.idem_mat(len(self.algebra.chain) - 1) == mid(self.dim)

    def image_span(self):
        """Row-reduced span of the action image inside End(V)."""
        sb = SpanBasis(self.dim * self.dim)
        for m in self.mats:
            sb.add(flatten(m))
        return sb

    def V_j(self, j):
        """Column space of the j-th chain idempotent."""
        P = self.idem_mat(j)
        sb = SpanBasis(self.dim)
        for c in range(self.dim):
            sb.add([P[r][c] for r in range(self.dim)])
        return sb

    def to_json(self):
        A = self.algebra
        sc_obj = {}
        for (i, j), row in sorted(A.sc.items()):
            sc_obj["%d,%d" % (i, j)] = {str(t): c.json_str() for t, c in sorted(row.items())}
        return json.dumps({
            "basis": list(A.labels),
            "structure_constants": sc_obj,
            "idempotent_chain": [[c.json_str() for c in a] for a in A.chain],
            "dim": self.dim,
            "action": [[c.json_str() for c in flatten(m)] for m in self.mats],
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        labels = data["basis"]
        n = len(labels)
        sc = {}
        for key, row in data["structure_constants"].items():
            i, j = (int(x) for x in key.split(","))
            sc[(i, j)] = {int(t): parse_scalar(s) for t, s in row.items()}
        chain = [[parse_scalar(s) for s in a] for a in data["idempotent_chain"]]
        alg = ApproxAlgebra(n, sc, chain, labels)
        dim = data["dim"]
        mats = []
        for flat in data["action"]:
            scl = [parse_scalar(s) for s in flat]
            mats.append(tuple(tuple(scl[r * dim + c] for c in range(dim)) for r in range(dim)))
        return cls(alg, dim, mats)

    def __repr__(self):
        return "ApproxModule(algebra dim=%d, dim=%d)" % (self.algebra.dim, self.dim)


def _corner_span(M, j):
    """Span of P_j . End(V) . P_j for the j-th chain idempotent."""
    d = M.dim
    P = M.idem_mat(j)
    sb = SpanBasis(d * d)
    for r in range(d):
        for c in range(d):
            unit = [[ZERO] * d for _ in range(d)]
            unit[r][c] = ONE
            sb.add(flatten(mmul(mmul(P, freeze(unit)), P)))
    return sb


def end_zero_basis(M):
    """Basis of the reachable part of End(V): the span of all chain corners
    P_j F P_j.  Computed twice (all corners together, and the top corner
    alone, which contains the others since the chain increases) and
    cross-checked.  Returns (basis matrices, span)."""
    d = M.dim
    full = SpanBasis(d * d)
    for j in range(len(M.algebra.chain)):
        for row in _corner_span(M, j).frozen_rows():
            full.add(list(row))
    top = _corner_span(M, len(M.algebra.chain) - 1)
    if not full.same_span(top):
        raise AssertionError("corner span computations disagree")
    return [unflatten(row, d, d) for row in full.frozen_rows()], full


def _tuple_act(mat, w, n, d):
    """Diagonal action of a matrix on a stacked vector of V^n."""
    out = []
    for b in range(n):
        out.extend(mat_vec(mat, w[b * d:(b + 1) * d]))
    return out


class SharpResult:
    """Outcome of a membership test: the verdict, the witness element on
    success, and the violated module plus escaping vector on failure."""

    __slots__ = ("member", "witness", "j", "tuple_vec", "submodule", "escaped")

    def __init__(self, member, witness=None, j=None, tuple_vec=None,
                 submodule=None, escaped=None):
        self.member = member
        self.witness = witness
        self.j = j
        self.tuple_vec = tuple_vec
        self.submodule = submodule
        self.escaped = escaped

    def __bool__(self):
        return self.member


def end_sharp_membership(M, phi):
    """Decide whether phi lies in the image of the algebra action; see the
    module docstring for the procedure."""
    phi = freeze(phi)
    d = M.dim
    corner_j = None
    for j in range(len(M.algebra.chain)):
        P = M.idem_mat(j)
        if mmul(mmul(P, phi), P) == phi:
            corner_j = j
            break
    if corner_j is None:
        raise ValueError("the endomorphism lies in no chain corner; "
                         "it cannot be an image element")
    basis = M.V_j(corner_j).frozen_rows()
    n = len(basis)
    u = []
    for b in basis:
        u.extend(b)
    if n == 0:
        return SharpResult(True, witness=(ZERO,) * M.algebra.dim, j=corner_j,
                           tuple_vec=tuple(u))
    # W = span of basis-element actions on the tuple; it contains u because
    # the corner idempotent fixes every u_i
    W = SpanBasis(n * d)
    for t in range(M.algebra.dim):
        W.add(_tuple_act(M.mats[t], u, n, d))
    for row in W.frozen_rows():
        moved = _tuple_act(phi, list(row), n, d)
        if not W.contains(moved):
            return SharpResult(False, j=corner_j, tuple_vec=tuple(u),
                               submodule=W, escaped=(tuple(row), tuple(moved)))
    # recover a witness: solve phi.u = pi(a).u in the element coordinates,
    # then cut a down to the corner so the equality extends from V_j to V
    cols = [_tuple_act(M.mats[t], u, n, d) for t in range(M.algebra.dim)]
    rows = [[cols[t][s] for t in range(M.algebra.dim)] for s in range(n * d)]
    sol = linalg.solve(rows, _tuple_act(phi, u, n, d))
    if sol is None:
        raise AssertionError("invariance held but no witness solves the system")
    alpha = M.algebra.chain[corner_j]
    a = M.algebra.mul(M.algebra.mul(alpha, tuple(sol)), alpha)
    if M.act(a) != phi:
        raise AssertionError("witness verification failed")
    return SharpResult(True, witness=a, j=corner_j, tuple_vec=tuple(u))


def end_sharp_space(M):
    """End^# as a subspace of End(V): elements of the corner span whose
    diagonal action preserves the module generated by the top basis tuple.
    Computed as one nullspace.  Returns (basis matrices, span)."""
    corner_mats, _ = end_zero_basis(M)
    d = M.dim
    basis = M.V_j(len(M.algebra.chain) - 1).frozen_rows()
    n = len(basis)
    u = []
    for b in basis:
        u.extend(b)
    W = SpanBasis(n * d)
    for t in range(M.algebra.dim):
        W.add(_tuple_act(M.mats[t], u, n, d))
    pivots = set(W.pivots)
    compl = [s for s in range(n * d) if s not in pivots]
    rows = []
    for wrow in W.frozen_rows():
        residues = [W._reduce(_tuple_act(C, list(wrow), n, d)) for C in corner_mats]
        for t in compl:
            rows.append([residues[s][t] for s in range(len(corner_mats))])
    if not rows:
        rows = [[ZERO] * len(corner_mats)]
    sharp = SpanBasis(d * d)
    for v in linalg.nullspace(rows, len(corner_mats)):
        mat = mzeros(d, d)
        for s, c in enumerate(v):
            if c:
                mat = madd(mat, mscale(corner_mats[s], c))
        sharp.add(flatten(mat))
    return [unflatten(r, d, d) for r in sharp.frozen_rows()], sharp


class CheckReport:
    """Uniform pass/fail report with dimension bookkeeping and an optional
    failure witness."""

    __slots__ = ("check", "status", "dims", "witness")

    def __init__(self, check, status, dims, witness=None):
        self.check = check
        self.status = status
        self.dims = dims
        self.witness = witness

    @property
    def ok(self):
        return self.status == "pass"

    def to_dict(self):
        out = {"check": self.check, "status": self.status, "dims": dict(self.dims)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def double_commutant_check(M):
    """Compare the action image with End^#, both as subspaces of End(V).

    One containment (image inside End^#) is checked directly; the other is
    established constructively by running the membership test on every
    element of a basis of End^#, which also recovers explicit witnesses.
    On failure the report carries a separating functional."""
    image = M.image_span()
    sharp_mats, sharp = end_sharp_space(M)
    d = M.dim
    dims = {
        "dim_V": d,
        "dim_image": len(image.rows),
        "dim_sharp": len(sharp.rows),
        "dim_end_zero": len(end_zero_basis(M)[1].rows),
    }
    for row in image.frozen_rows():
        if not sharp.contains(list(row)):
            return CheckReport("double_commutant", "fail", dims,
                               witness={"kind": "image_not_in_sharp",
                                        "matrix": [str(c) for c in row]})
    for mat in sharp_mats:
        res = end_sharp_membership(M, mat)
        if not res.member:
            func = _separating_functional(image, sharp, d)
            return CheckReport("double_commutant", "fail", dims,
                               witness={"kind": "sharp_not_in_image",
                                        "separating_functional": func})
    if len(image.rows) != len(sharp.rows):
        return CheckReport("double_commutant", "fail", dims,
                           witness={"kind": "dimension_mismatch"})
    return CheckReport("double_commutant", "pass", dims)


def _separating_functional(image, sharp, d):
    """A dual vector vanishing on the image but pairing nontrivially with
    some element of the sharp space."""
    rows = [list(r) for r in image.rows]
    if not rows:
        rows = [[ZERO] * (d * d)]
    for func in linalg.nullspace(rows, d * d):
        for srow in sharp.frozen_rows():
            val = sum((a * b for a, b in zip(func, srow)), ZERO)
            if val:
                return {"functional": [str(c) for c in func],
                        "sharp_element": [str(c) for c in srow],
                        "pairing": str(val)}
    return None


def corner_identity_check(M, j1, j2):
    """The image of the abstract corner alpha_{j1} A alpha_{j2} must equal
    the intersection of the action image with the concrete corner
    {X : P_{j1} X P_{j2} = X}; both sides computed independently."""
    A = M.algebra
    d = M.dim
    left = SpanBasis(d * d)
    for t in range(A.dim):
        elem = A.mul(A.mul(A.chain[j1], A.basis_elem(t)), A.chain[j2])
        left.add(flatten(M.act(elem)))
    P1, P2 = M.idem_mat(j1), M.idem_mat(j2)
    corner = SpanBasis(d * d)
    for r in range(d):
        for c in range(d):
            unit = [[ZERO] * d for _ in range(d)]
            unit[r][c] = ONE
            corner.add(flatten(mmul(mmul(P1, freeze(unit)), P2)))
    image = M.image_span()
    inter_rows = linalg.subspace_intersection(
        [list(r) for r in image.rows], [list(r) for r in corner.rows], d * d)
    right = SpanBasis(d * d)
    for r in inter_rows:
        right.add(r)
    ok = left.same_span(right)
    dims = {"dim_left": len(left.rows), "dim_right": len(right.rows)}
    return CheckReport("corner_identity", "pass" if ok else "fail", dims)


def generated_tuple_module(M, w, n):
    """Smallest action-invariant subspace of V^n containing w."""
    d = M.dim
    W = SpanBasis(n * d)
    W.add(list(w))
    frontier = [list(w)]
    while frontier:
        new = []
        for v in frontier:
            for t in range(M.algebra.dim):
                moved = _tuple_act(M.mats[t], v, n, d)
                if W.add(moved):
                    new.append(moved)
        frontier = new
    return W


def submodule_grid_check(M, phi, n, extra=()):
    """Spot-check of the universal quantifier behind End^#: when phi passes
    the membership test, the module generated by each grid vector of V^n
    (standard basis tuples plus any extras) must be preserved by the
    diagonal action of phi.  Returns None, or the offending generator."""
    d = M.dim
    if not end_sharp_membership(M, phi).member:
        return None
    grid = []
    for s in range(n * d):
        w = [ZERO] * (n * d)
        w[s] = ONE
        grid.append(w)
    grid.extend(list(w) for w in extra)
    for w in grid:
        W = generated_tuple_module(M, w, n)
        preserved = all(W.contains(_tuple_act(phi, list(row), n, d))
                        for row in W.frozen_rows())
        if not preserved:
            return tuple(w)
    return None
