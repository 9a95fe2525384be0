"""Command line entry point: seeded verification suites over random
instances, plus a small demo walkthrough.

Every subcommand draws its instances from the --seed (or the JETCALC_SEED
environment variable), so two runs with the same seed test the same
instances and, with --json, write byte-identical report files.  Timing is
printed to the console only.  Exit status: 0 when every check passed, 1 when
any failed, 2 for usage errors.
"""

import argparse
import hashlib
import json
import os
import random
import sys
import time

from .scalars import Scalar, ZERO, ONE
from .poly import Polynomial, ExpPoly, Vector, translate
from .linalg import mid
from .localmod import cyclic_quotient, maximal_ideal, dual_number_module
from .jetfun import (jet, jet_family, block_derivative, functional_to_diffop,
                     diffop_to_module, kernel_alpha_bar, subquotient_lambdas,
                     alpha_bar_image)
from .approxalg import (double_commutant_check, corner_identity_check,
                        submodule_grid_check, end_sharp_membership)
from .family import (PWCandidate, FunctionalData, membership_triple,
                     invariance_check, relation_check, RelationTerm,
                     functional_to_relation, spanned_algebra)
from . import gen, linalg


def _canon(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _digest(obj):
    return hashlib.sha256(_canon(obj).encode("utf-8")).hexdigest()


def _mstr(mat):
    return [[str(x) for x in row] for row in mat]


def _estr(E):
    return {"nvars": E.nvars, "k": E.k, "mats": [_mstr(m) for m in E.mats]}


class Suite:
    """Collects per-instance records and per-check tallies."""

    def __init__(self):
        self.records = []
        self.tally = {}

    def record(self, check_id, statement, instance, ok, witness=None):
        rec = {
            "check_id": check_id,
            "statement": statement,
            "instance_digest": _digest(instance),
            "status": "pass" if ok else "fail",
        }
        if witness is not None:
            rec["witness"] = witness
        self.records.append(rec)
        p, t = self.tally.get(check_id, (0, 0))
        self.tally[check_id] = (p + (1 if ok else 0), t + 1)

    @property
    def failed(self):
        return any(r["status"] == "fail" for r in self.records)

    def sorted_records(self):
        return sorted(self.records,
                      key=lambda r: (r["check_id"], r["instance_digest"]))


def _rng(cfg, tag):
    return random.Random("%d:%s" % (cfg.seed, tag))


# --- jet checks -------------------------------------------------------------

def run_jet(cfg, suite):
    rng = _rng(cfg, "jet")
    for i in range(20):
        nv = rng.randint(1, cfg.nmax)
        E = gen.rand_finmod(rng, nv, cfg.kmax, cfg.dimmax)
        f = gen.rand_exp_poly(rng, nv, cfg.kmax)
        g = gen.rand_exp_poly(rng, nv, cfg.kmax)
        inst = {"i": i, "E": _estr(E), "f": str(f), "g": str(g)}
        jf, jg, jfg = jet(f, E), jet(g, E), jet(f * g, E)
        suite.record("jet.hom", "jet of a product equals the product of jets",
                     inst, jfg == jf * jg)

        p = gen.rand_poly(rng, nv, cfg.kmax + 1)
        mu = gen.rand_point(rng, nv)
        inst2 = {"i": i, "E": _estr(E), "p": str(p), "mu": str(mu)}
        lhs = jet(p, E).evaluate_scalar(tuple(mu.coords))
        rhs = E.act_poly(translate(p, mu))
        suite.record("jet.eval", "jet evaluation matches the translated action",
                     inst2, lhs == rhs)

    for i in range(10):
        nv = rng.randint(1, cfg.nmax)
        F = gen.rand_elementary_family(rng, nv, 2)
        eta = gen.rand_covector(rng, nv)
        inst = {"i": i, "F": [str(e) for r in F.entries for e in r],
                "eta": str(eta)}
        ok = block_derivative(F, eta) == jet_family(
            F, dual_number_module(Vector(eta.coords)))
        suite.record("jet.kappa", "doubled-space derivative is the dual-number jet",
                     inst, ok)

    for i in range(10):
        nv = rng.randint(1, cfg.nmax)
        ops = [gen.rand_diffop(rng, nv, cfg.kmax)
               for _ in range(rng.randint(1, 2))]
        E, funcs = diffop_to_module(ops)
        ok = all(functional_to_diffop(E, H) == u for u, H in zip(ops, funcs))
        inst = {"i": i, "ops": [str(u) for u in ops]}
        suite.record("jet.functional",
                     "operators survive the round trip through module functionals",
                     inst, ok)


# --- kernel checks ----------------------------------------------------------

def run_kernel(cfg, suite):
    rng = _rng(cfg, "kernel")
    for i in range(12):
        nv = rng.randint(1, min(2, cfg.nmax))
        n = rng.randint(1, 3)
        lams = [gen.rand_point(rng, nv, zero_ok=False) for _ in range(n)]
        d = rng.randint(0, 4)
        inst = {"i": i, "lams": [str(l) for l in lams], "d": d}
        try:
            res = kernel_alpha_bar(lams, d)
        except AssertionError:
            suite.record("kernel.routes", "both kernel computations agree",
                         inst, False)
            continue
        suite.record("kernel.routes", "both kernel computations agree",
                     inst, True)
        suite.record("kernel.flag", "partial flag set exactly when d < n+1",
                     inst, res.partial == (d < n + 1))
        member_ok = all(
            not any(alpha_bar_image(b, lams))
            for b in res.basis)
        suite.record("kernel.member", "kernel basis maps to zero",
                     inst, member_ok)

    for i in range(10):
        nv = rng.randint(1, min(2, cfg.nmax))
        ideal = gen.rand_cofinite_ideal(rng, nv, min(cfg.kmax, 2))
        r = subquotient_lambdas(ideal)
        inst = {"i": i, "nvars": nv, "k": ideal.k,
                "gens": [str(g) for g in ideal.generators]}
        suite.record("kernel.subquotient",
                     "direction-sequence kernel lies inside the ideal",
                     inst, r.certified)


# --- double commutant checks --------------------------------------------------

def run_dcomm(cfg, suite):
    rng = _rng(cfg, "dcomm")
    for i in range(20):
        alg, M = gen.rand_approx_module(rng, cfg.dimmax, junk_ok=True)
        inst = {"i": i, "alg_dim": alg.dim, "dim": M.dim,
                "mats": [_mstr(m) for m in M.mats]}
        rep = double_commutant_check(M)
        suite.record("dcomm.main", "action image equals its double commutant",
                     inst, rep.ok,
                     witness=None if rep.ok else rep.to_dict())

        phi = gen.rand_member_phi(rng, M)
        res = end_sharp_membership(M, phi)
        ok = res.member
        if ok and res.witness is not None:
            ok = M.act(res.witness) == phi
        suite.record("dcomm.member",
                     "action elements pass membership with a checked witness",
                     {"i": i, "phi": _mstr(phi), "dim": M.dim}, ok)

        n = max(1, len(M.V_j(len(alg.chain) - 1).rows))
        if M.dim * n <= 8:
            bad = submodule_grid_check(M, phi, n)
            suite.record("dcomm.grid",
                         "members preserve every grid-generated submodule",
                         {"i": i, "phi": _mstr(phi), "n": n}, bad is None,
                         witness=None if bad is None
                         else {"vector": [str(x) for x in bad]})

        j1 = rng.randrange(len(alg.chain))
        j2 = rng.randrange(len(alg.chain))
        crep = corner_identity_check(M, j1, j2)
        suite.record("dcomm.corner",
                     "abstract corners act onto the concrete corners",
                     {"i": i, "j1": j1, "j2": j2, "dim": M.dim}, crep.ok)


# --- membership / relation checks ---------------------------------------------

def _eval_module(nv):
    return cyclic_quotient(maximal_ideal(nv)).module


def _rand_layout(rng, cfg):
    nv = 1
    reps = [gen.rand_repfamily(rng, "a", nv, rng.randint(1, 2))]
    if rng.random() < 0.4:
        reps.append(gen.rand_repfamily(rng, "b", nv, rng.randint(1, 2)))
    pts = [gen.rand_point(rng, nv)]
    if rng.random() < 0.4:
        q = gen.rand_point(rng, nv)
        if q.coords != pts[0].coords:
            pts.append(q)
    if rng.random() < 0.5:
        E = _eval_module(nv)
    else:
        E = dual_number_module(gen.rand_point(rng, nv, zero_ok=False))
    total = E.dim * sum(r.dim for r in reps) * len(pts)
    return reps, pts, E, total


def _inst_layout(reps, pts, E, extra=None):
    inst = {"reps": [{ "label": r.label,
                       "gens": [[str(e) for row in g.entries for e in row]
                                for g in r.generators]} for r in reps],
            "pts": [str(p) for p in pts], "E": _estr(E)}
    if extra:
        inst.update(extra)
    return inst


def run_pw(cfg, suite):
    rng = _rng(cfg, "pw")
    for i in range(10):
        reps, pts, E, total = _rand_layout(rng, cfg)
        if total > 8:
            pts = pts[:1]
            total = E.dim * sum(r.dim for r in reps)
        if total > 8:
            E = _eval_module(1)
        cand, is_member = gen.rand_candidate(rng, reps, maxlen=cfg.words)
        t = membership_triple(cand, reps, pts, E)
        ok = t.unanimous and (t.member or not is_member)
        suite.record("pw.triple", "the three membership tests agree",
                     _inst_layout(reps, pts, E, {"i": i,
                                                 "cand": cand.to_json(),
                                                 "member": is_member}),
                     ok, witness=None if ok else t.to_dict())

        delta = []
        for rep in reps:
            for p in pts:
                delta.extend([(rep.label, p, [])] * rep.dim)
        Ev = _eval_module(1)
        tv = membership_triple(cand, reps, pts, Ev)
        inv = invariance_check(cand, delta, reps)
        ok2 = tv.unanimous and inv == tv.member
        suite.record("pw.invariance",
                     "delta-data invariance matches the membership verdict",
                     _inst_layout(reps, pts, Ev, {"i": i,
                                                  "cand": cand.to_json()}),
                     ok2, witness=None if ok2 else
                     {"invariance": inv, "triple": tv.to_dict()})

    for i in range(8):
        reps, pts, E, total = _rand_layout(rng, cfg)
        if total > 6:
            pts = pts[:1]
            reps = reps[:1]
            total = E.dim * reps[0].dim
        mats, span, asm = spanned_algebra(reps, pts, E)
        layout = asm.layout
        coords = [(layout.blocks[b][2] + r, layout.blocks[b][2] + c)
                  for b in range(len(layout.blocks))
                  for r in range(layout.blocks[b][3])
                  for c in range(layout.blocks[b][3])]
        rows = [[row[rc[0] * layout.total + rc[1]] for rc in coords]
                for row in span.frozen_rows()]
        null = linalg.nullspace(rows, len(coords))
        inst = _inst_layout(reps, pts, E, {"i": i})
        if not null:
            suite.record("pw.relation",
                         "relations certify and annihilate word candidates",
                         inst, True)
            continue
        vec = null[0]
        psi = [[ZERO] * layout.total for _ in range(layout.total)]
        for (r, c), x in zip(coords, vec):
            psi[r][c] = x
        data = FunctionalData(E, reps, pts, tuple(tuple(r) for r in psi), layout)
        dec = functional_to_relation(data)
        if not dec.terms:
            suite.record("pw.relation",
                         "relations certify and annihilate word candidates",
                         inst, True)
            continue
        word_cand = PWCandidate.from_word(
            reps, gen.rand_word(rng, len(reps[0].generators), cfg.words))
        verdict = relation_check(word_cand, dec.terms, reps)
        suite.record("pw.relation",
                     "relations certify and annihilate word candidates",
                     inst, verdict.certified and verdict.holds is True)

        ident_term = RelationTerm(reps[0].label, mid(reps[0].dim), pts[0],
                                  gen.rand_diffop(rng, 1, 0))
        bad = relation_check(word_cand, [ident_term], reps)
        suite.record("pw.nonrelation",
                     "a non-annihilating datum is flagged, not evaluated",
                     inst, (not bad.certified) and bad.witness is not None)

    rf = gen.reducible_family(1)
    ec = gen.escaping_candidate(1)
    pt = Vector([Scalar(1)])
    E1 = _eval_module(1)
    t = membership_triple(ec, [rf], [pt], E1)
    inv = invariance_check(ec, [("R", pt, []), ("R", pt, [])], [rf])
    good, _ = gen.rand_candidate(_rng(cfg, "pw-fixture"), [rf], member=True)
    t2 = membership_triple(good, [rf], [pt], E1)
    inv2 = invariance_check(good, [("R", pt, []), ("R", pt, [])], [rf])
    suite.record("pw.fixture",
                 "the reducible fixture rejects the escaping candidate",
                 {"family": "reducible", "cand": ec.to_json()},
                 t.unanimous and not t.member and not inv)
    suite.record("pw.fixture",
                 "the reducible fixture accepts word candidates",
                 {"family": "reducible", "cand": good.to_json()},
                 t2.unanimous and t2.member and inv2)


RUNNERS = {
    "jet": run_jet,
    "kernel": run_kernel,
    "dcomm": run_dcomm,
    "pw": run_pw,
}


def run_demo(cfg, suite):
    out = []
    nv = 1
    E = dual_number_module(Vector([ONE]))
    f = ExpPoly.from_poly(Polynomial(nv, {(0,): ONE, (2,): Scalar(1, 0)}))
    out.append("module: dual numbers along the unit direction (dim %d, k=%d)"
               % (E.dim, E.k))
    J = jet(f, E)
    out.append("jet of 1 + x^2:")
    for row in J.entries:
        out.append("    [" + ", ".join(str(e) for e in row) + "]")
    lams = [Vector([ONE]), Vector([Scalar(2)])]
    res = kernel_alpha_bar(lams, 3)
    out.append("kernel for two directions through degree 3: "
               + "; ".join(str(b) for b in res.basis))
    suite.record("demo.kernel", "demo kernel has the expected dimension",
                 {"lams": [str(l) for l in lams]}, len(res.basis) == 1)
    rf = gen.reducible_family(1)
    ec = gen.escaping_candidate(1)
    pt = Vector([ONE])
    t = membership_triple(ec, [rf], [pt], _eval_module(1))
    out.append("escaping candidate against the reducible family: "
               + ("member" if t.member else "rejected")
               + " (unanimous=%s)" % t.unanimous)
    suite.record("demo.fixture", "demo fixture rejects the escaping candidate",
                 {"cand": ec.to_json()}, t.unanimous and not t.member)
    return out


def build_parser():
    ap = argparse.ArgumentParser(
        prog="jetcalc",
        description="exact verification suites for jet calculus, kernels, "
                    "double commutants, and matrix-family membership")
    ap.add_argument("--seed", type=int,
                    default=int(os.environ.get("JETCALC_SEED", "0")),
                    help="instance seed (default: JETCALC_SEED or 0)")
    ap.add_argument("--nmax", type=int, default=2,
                    help="max number of variables (default 2)")
    ap.add_argument("--kmax", type=int, default=2,
                    help="max jet order (default 2)")
    ap.add_argument("--dimmax", type=int, default=5,
                    help="max module dimension (default 5)")
    ap.add_argument("--words", type=int, default=4,
                    help="max word length (default 4)")
    ap.add_argument("--json", metavar="PATH",
                    help="write sorted JSON-lines records to PATH")
    ap.add_argument("command",
                    choices=["verify", "jet", "kernel", "dcomm", "pw", "demo"],
                    help="which suite to run")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.nmax < 1 or args.kmax < 0 or args.dimmax < 1 or args.words < 0:
        ap.error("size limits out of range")

    suite = Suite()
    t0 = time.monotonic()
    if args.command == "demo":
        for line in run_demo(args, suite):
            print(line)
    elif args.command == "verify":
        for name in ("jet", "kernel", "dcomm", "pw"):
            t1 = time.monotonic()
            RUNNERS[name](args, suite)
            print("suite %-6s done in %.2fs" % (name, time.monotonic() - t1))
    else:
        RUNNERS[args.command](args, suite)

    for check_id in sorted(suite.tally):
        p, t = suite.tally[check_id]
        status = "pass" if p == t else "FAIL"
        print("[%s] %-20s %d/%d" % (status, check_id, p, t))
    print("total %.2fs, seed %d" % (time.monotonic() - t0, args.seed))

    if args.json:
        with open(args.json, "w") as fh:
            for rec in suite.sorted_records():
                fh.write(_canon(rec) + "\n")

    return 1 if suite.failed else 0


if __name__ == "__main__":
    sys.exit(main())
