"""Rational ell-isogeny search by interpolation on shared p-power torsion.

Given two ordinary curves over the same small-characteristic field
F_q = F_p(g) that are linked by a rational isogeny of odd prime degree
ell != p, the x-map of that isogeny is a degree-(ell, ell-1) rational
function sending abscissae of p^k-torsion points to abscissae of
p^k-torsion points.  The search:

  1. builds a generator P of a rational cyclic p^k subgroup of the
     first curve through an Artin-Schreier tower (``t_torsE``),
  2. locates a matching generator abscissa for the second curve inside
     the *same* tower top by repeated division by p (``t_torsE2``) --
     legitimate because the x-map of the sought isogeny is rational in
     x, so the second curve's torsion abscissae lie in the field
     already generated by the first curve's,
  3. tabulates x([i]P) and x([i]P') for every unit class i of
     (Z/p^k)^*/{+-1} with one projective difference-addition step and a
     single shared inversion per table,
  4. for every candidate scalar t interpolates the data
     x([i]P) -> x([i t]P') into a polynomial A_t modulo the node
     polynomial T, reconstructs A_t as a rational function g/h, and
     accepts t exactly when h is the square of a kernel polynomial
     whose isogeny, composed with an isomorphism onto the target curve,
     reproduces (g, h).

Candidate polynomials come in three interchangeable builds: classic
Lagrange interpolation over the tower top (``c2-naive``); an
orbit-by-orbit linear solve over F_q glued by CRT idempotents, using
the fact that Frobenius permutes the nodes (``c2-fi``); and, on top of
that, a precomputed modular-composition operator that walks an entire
Frobenius coset of candidates from a single interpolation
(``c2-fi-mc``).
"""

import threading
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._linalg import LinearSolver, matvec_mod
from .curves import (
    NotIsomorphic,
    division_polynomial,
    find_isomorphism,
    p_torsion_polynomial,
    velu,
    x_mul,
)
from .factor import _is_prime, poly_powmod, roots
from .field import FieldElement
from .poly import (
    NoRationalFraction,
    Poly,
    poly_gcd,
    poly_invmod,
    prod_list,
    rational_reconstruction,
)
from .torsion import all_automorphisms, build_torsion_generator

VARIANTS = ("c2-naive", "c2-fi", "c2-fi-mc")
DEFAULT_VARIANT = "c2-fi-mc"

REJECT_REASONS = ("degree", "square", "morphism", "isomorphism-missing")


class NoSharedTorsion(ValueError):
    """The second curve has no p^k-torsion abscissae rational over the
    field generated by the first curve's: the curves cannot be linked
    by a rational isogeny of degree prime to p."""

    def __init__(self, message, t_torsE=0.0, t_torsE2=0.0, k=0):
        super().__init__(message)
        self.t_torsE = t_torsE
        self.t_torsE2 = t_torsE2
        self.k = k


# ---------------------------------------------------------------------------
# torsion height selection


def torsion_budget(p, k, mode="primitive"):
    """Number of candidate classes at height k: primitive classes
    (Z/p^k)^*/{+-1}, or every nonzero class when mode='all'."""
    if mode == "primitive":
        count = (p - 1) * p ** (k - 1)
    elif mode == "all":
        count = p**k - 1
    else:
        raise ValueError("mode must be 'primitive' or 'all'")
    return count // 2


def choose_k(p, ell, mode="primitive"):
    """Smallest torsion height whose class count clears the rational
    reconstruction demand 2*ell - 1.

    At exact equality the numerator/denominator pair of the sought
    degree-(ell, ell-1) fraction is under-determined by one dimension
    (the last Euclidean convergent joins the solution lattice), so the
    height is raised one more level to keep the reconstruction unique
    up to scaling."""
    k = 1
    while True:
        n = torsion_budget(p, k, mode)
        if n >= 2 * ell - 1:
            if n == 2 * ell - 1:
                k += 1
            return k
        k += 1


# ---------------------------------------------------------------------------
# small helpers


def _batch_inverse(ctx, vecs):
    """Inverses of a list of nonzero vectors with a single field
    inversion (prefix-product trick)."""
    prefix = []
    acc = ctx.one_vec()
    for v in vecs:
        acc = ctx.mul_vec(acc, v)
        prefix.append(acc)
    inv = ctx.inv_vec(prefix[-1])
    out = [None] * len(vecs)
    for i in range(len(vecs) - 1, 0, -1):
        out[i] = ctx.mul_vec(inv, prefix[i - 1])
        inv = ctx.mul_vec(inv, vecs[i])
    out[0] = inv
    return out


def _abscissa_chain(E, x1, count):
    """Vectors x([i]P) for i = 1..count given x(P) = x1 of a point of
    order > count, by one projective difference-addition per index and
    a single shared inversion at the end."""
    ctx = E.ctx
    one = ctx.one()
    X = [None] * (count + 1)
    Z = [None] * (count + 1)
    X[1], Z[1] = x1, one
    if count >= 2:
        if E.p == 2:
            x2 = x1 * x1
            X[2], Z[2] = x2 * x2 + E.b, x2
        else:
            a2, a4, a6 = E.coefficients()
            xx = x1 * x1
            X[2] = xx * xx - a4 * xx * 2 - a6 * x1 * 8 + (a4 * a4 - a2 * a6 * 4)
            Z[2] = (x1 * xx + a2 * xx + a4 * x1 + a6) * 4
    if E.p == 2:
        for i in range(3, count + 1):
            t1 = X[i - 1]
            t2 = x1 * Z[i - 1]
            s2 = t1 + t2
            s2 = s2 * s2
            X[i] = X[i - 2] * s2 + Z[i - 2] * (t1 * t2)
            Z[i] = Z[i - 2] * s2
    else:
        a2, a4, a6 = E.coefficients()
        for i in range(3, count + 1):
            t1 = X[i - 1]
            t2 = x1 * Z[i - 1]
            diff = t1 - t2
            den = diff * diff
            m0 = X[i - 1] * x1
            zz = Z[i - 1]
            num = (t1 + t2) * (m0 + a4 * zz) + (a2 * m0 + a6 * zz) * zz * 2
            num = num * 2
            X[i] = Z[i - 2] * num - X[i - 2] * den
            Z[i] = Z[i - 2] * den
    invs = _batch_inverse(ctx, [Z[i].vec for i in range(1, count + 1)])
    table = [ctx.mul_vec(X[i].vec, invs[i - 1]) for i in range(1, count + 1)]
    # spot-check the recurrence against the generic ladder
    for i in (2, count):
        if i <= count:
            ref = x_mul(E, x1, i)
            assert ref is not None and np.array_equal(ref.vec, table[i - 1])
    return table


def _even_division_cofactors(E):
    """The y-free cofactors q4, q6, q8 of the even-index division
    polynomials (psi_{2m} = 2y * q_{2m}), derived from the odd-index
    ones by exact division."""
    ctx = E.ctx
    f = E.f_poly()
    psi3 = division_polynomial(E, 3)
    psi5 = division_polynomial(E, 5)
    sixteen_f2 = f * f * 16
    q4 = (psi5 + psi3**3) // sixteen_f2
    assert q4 * sixteen_f2 == psi5 + psi3**3
    q6 = psi3 * (psi5 - q4 * q4)
    psi7 = division_polynomial(E, 7)
    q8 = q4 * (q6 * psi3 * psi3 - psi5 * psi5)
    assert psi7 == psi5 * psi3**3 - f * f * q4**3 * 16
    return q4, q6, q8


def _p_multiplication_x(E):
    """Numerator and denominator of the x-map of multiplication by p on
    E, as polynomials over E's own field (p <= 7)."""
    ctx = E.ctx
    p = E.p
    x = Poly.x(ctx)
    if p == 2:
        den = x * x
        num = den * den + Poly.const(ctx, E.b.vec)
        return num, den
    psi_p = division_polynomial(E, p)
    f = E.f_poly()
    if p == 3:
        q4, _, _ = _even_division_cofactors(E)
        cof = q4  # q2 = 1
    elif p == 5:
        q4, q6, _ = _even_division_cofactors(E)
        cof = q4 * q6
    elif p == 7:
        _, q6, q8 = _even_division_cofactors(E)
        cof = q6 * q8
    else:
        raise ValueError("multiplication-by-p x-map implemented for p <= 7 only")
    den = psi_p * psi_p
    num = x * den - f * cof * 4
    return num, den


def _sqrt_poly(h):
    """The monic square root of h when h is the square of a squarefree
    monic polynomial; None otherwise."""
    ctx = h.ctx
    if h.is_zero() or h.degree % 2 or not h.is_monic():
        return None
    half = h.degree // 2
    if ctx.p == 2:
        rows = []
        for j in range(h.degree + 1):
            vec = h.coeff(j)
            if j % 2:
                if vec.any():
                    return None
            else:
                rows.append(FieldElement(ctx, vec).pth_root().vec)
        s = Poly(ctx, np.stack(rows))
    else:
        d = h.derivative()
        if d.is_zero():
            return None
        s = poly_gcd(h, d)
        if s.degree != half:
            return None
    if not (s * s == h):
        return None
    return s


# ---------------------------------------------------------------------------
# run report


class RunReport:
    """Outcome and stage timings of one isogeny search."""

    __slots__ = (
        "ell",
        "p",
        "d",
        "k",
        "variant",
        "workers",
        "t_torsE",
        "t_torsE2",
        "t_FI",
        "t_RFR",
        "t_MC",
        "tries",
        "t_loop",
        "found",
        "verified",
        "budget",
        "t_setup",
        "accepted",
        "reject_counts",
        "note",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw.pop(name))
        assert not kw
        assert self.tries <= self.budget

    def summary(self):
        state = "found" if self.found is not None else "not found"
        return (
            f"ell={self.ell} p={self.p} d={self.d} k={self.k} "
            f"variant={self.variant} workers={self.workers}: {state} "
            f"after {self.tries}/{self.budget} candidates in {self.t_loop:.6f}s "
            f"(torsion {self.t_torsE:.6f}s + {self.t_torsE2:.6f}s, "
            f"interp {self.t_FI:.6f}s, recon {self.t_RFR:.6f}s, "
            f"compose {self.t_MC:.6f}s; verified={self.verified})"
        )


class _Block:
    """One Frobenius orbit of candidate classes: its members in
    tau-multiplication order, the minimal polynomial of its nodes over
    F_q, the matching CRT idempotent, and the linear solver expressing
    tower-top values in the F_q(node) basis."""

    __slots__ = ("rep", "members", "minpoly", "idem", "solver")

    def __init__(self, rep, members):
        self.rep = rep
        self.members = members
        self.minpoly = None
        self.idem = None
        self.solver = None


# ---------------------------------------------------------------------------
# the search object


class IsogenySearch:
    """Shared state of one (E, E2, ell) search: the torsion tower, the
    abscissa tables, the Frobenius orbit structure and the per-variant
    candidate-polynomial builders."""

    def __init__(self, E, E2, ell, k=None):
        if E.ctx is not E2.ctx:
            raise ValueError("both curves must live over the same field object")
        p = E.p
        if ell % 2 == 0 or ell < 3 or ell == p or not _is_prime(ell):
            raise ValueError("the isogeny degree must be an odd prime different from p")
        self.E = E
        self.E2 = E2
        self.ell = ell
        self.p = p
        self.d = E.ctx.deg_abs
        self.k = choose_k(p, ell) if k is None else int(k)
        self.M = p**self.k
        self.budget = torsion_budget(p, self.k)
        if self.budget < 2 * ell - 1:
            raise ValueError("torsion height too small for reconstruction")

        t0 = time.perf_counter()
        self.gen = build_torsion_generator(E, self.k)
        self.top = self.gen.top
        self.E_top = E.lift_to(self.top)
        self.E2_top = E2.lift_to(self.top)
        self.xP = self.gen.x_on_curve(self.k)
        if x_mul(self.E_top, self.xP, self.M) is not None or (
            x_mul(self.E_top, self.xP, self.M // p) is None
        ):
            raise AssertionError("torsion generator has the wrong order")
        self.t_torsE = time.perf_counter() - t0

        t0 = time.perf_counter()
        try:
            self.xP2 = self._shared_torsion_abscissa()
        except NoSharedTorsion as exc:
            exc.t_torsE = self.t_torsE
            exc.t_torsE2 = time.perf_counter() - t0
            exc.k = self.k
            raise
        self.t_torsE2 = time.perf_counter() - t0

        t0 = time.perf_counter()
        self._build_tables()
        self._build_blocks()
        self.t_setup = time.perf_counter() - t0
        self._naive_ready = False
        self._comp_ready = False
        self._prep_lock = threading.Lock()

    # -- second-curve torsion inside the first curve's tower -------------

    def _shared_torsion_abscissa(self):
        """Abscissa of a p^k-torsion generator of the second curve,
        found inside the tower top by repeated division by p."""
        p, k, top = self.p, self.k, self.top
        E2t = self.E2_top
        if p == 2:
            x = top.zero()
        else:
            try:
                w2 = p_torsion_polynomial(self.E2)
            except ValueError as exc:
                raise NoSharedTorsion(str(exc)) from exc
            rv = roots(w2.lift_to(top))
            if len(rv) != (p - 1) // 2:
                raise NoSharedTorsion(
                    "second curve's p-torsion abscissae are not all rational "
                    "over the torsion field of the first"
                )
            x = FieldElement(top, rv[0])
        pnum, pden = _p_multiplication_x(self.E2)
        pnum_l = pnum.lift_to(top)
        pden_l = pden.lift_to(top)
        for level in range(2, k + 1):
            G = pnum_l - pden_l.scale(x.vec)
            rv = roots(G)
            expect = 1 if (p == 2 and level == 2) else p
            if len(rv) != expect:
                raise NoSharedTorsion(
                    f"division by p above level {level - 1} found {len(rv)} "
                    f"rational preimages instead of {expect}"
                )
            x = FieldElement(top, rv[0])
        if x_mul(E2t, x, p**k) is not None or x_mul(E2t, x, p ** (k - 1)) is None:
            raise NoSharedTorsion("second curve's torsion generator has the wrong order")
        return x

    # -- abscissa tables and orbit structure ------------------------------

    def _class_of(self, i):
        u = i % self.M
        return min(u, self.M - u)

    def _build_tables(self):
        p, M = self.p, self.M
        count = M // 2 - 1 if p == 2 else (M - 1) // 2
        chain1 = _abscissa_chain(self.E_top, self.xP, count)
        chain2 = _abscissa_chain(self.E2_top, self.xP2, count)
        if p == 2:
            self.reps = [i for i in range(1, M // 2, 2)]
        else:
            self.reps = [i for i in range(1, (M - 1) // 2 + 1) if i % p != 0]
        assert len(self.reps) == self.budget
        self.xs = {i: chain1[i - 1] for i in self.reps}
        self.xs2 = {i: chain2[i - 1] for i in self.reps}
        self._x_index = {v.tobytes(): i for i, v in self.xs.items()}
        self._x2_index = {v.tobytes(): i for i, v in self.xs2.items()}

    def _build_blocks(self):
        top, Fq = self.top, self.E.ctx
        d = self.d
        sig = FieldElement(top, self.xs[1]).frobenius(d)
        self.tau = self._x_index[sig.vec.tobytes()]

        used = set()
        self.blocks = []
        self.order = []
        for r in self.reps:
            if r in used:
                continue
            members = [r]
            used.add(r)
            c = self._class_of(r * self.tau)
            while c != r:
                members.append(c)
                used.add(c)
                c = self._class_of(c * self.tau)
            blk = _Block(r, members)
            for off, m in enumerate(members):
                self.order.append((m, len(self.blocks), off))
            self.blocks.append(blk)
        self.L = len(self.blocks[0].members)
        assert all(len(b.members) == self.L for b in self.blocks)
        assert len(self.order) == self.budget

        # minimal polynomials of the node orbits, their product T, the
        # CRT idempotents, and the per-orbit base-change solvers
        for blk in self.blocks:
            m_top = Poly.from_roots(top, [self.xs[c] for c in blk.members])
            blk.minpoly = m_top.down_to(Fq)
        self.T = prod_list(Fq, [b.minpoly for b in self.blocks])
        assert self.T.degree == self.budget
        for blk in self.blocks:
            cof = self.T // blk.minpoly
            inv = poly_invmod(cof % blk.minpoly, blk.minpoly)
            blk.idem = (cof * inv) % self.T

        D = top.deg_abs
        basis_lift = [
            top.lift_from(Fq, np.eye(d, dtype=np.int64)[m]) for m in range(d)
        ]
        for blk in self.blocks:
            xi = FieldElement(top, self.xs[blk.rep])
            cols = np.empty((self.L * d, D), dtype=np.int64)
            pw = top.one_vec()
            for j in range(self.L):
                for m in range(d):
                    cols[j * d + m] = top.mul_vec(pw, basis_lift[m])
                if j + 1 < self.L:
                    pw = top.mul_vec(pw, xi.vec)
            blk.solver = LinearSolver(cols.T, self.p)
            assert blk.solver.rank == self.L * d

    # -- candidate polynomial builders ------------------------------------

    def _ensure_naive(self):
        with self._prep_lock:
            if self._naive_ready:
                return
            top = self.top
            self._T_top = self.T.lift_to(top)
            dT = self._T_top.derivative()
            vals = dT.eval_many(np.stack([self.xs[i] for i in self.reps]))
            self._bary = _batch_inverse(top, list(vals))
            self._naive_ready = True

    def _ensure_composition(self):
        with self._prep_lock:
            if self._comp_ready:
                return
            Fq = self.E.ctx
            n, d, p = self.budget, self.d, self.p
            F = poly_powmod(Poly.x(Fq), Fq.order, self.T)
            cols = np.zeros((n * d, n * d), dtype=np.int64)
            pw = Poly.one(Fq)
            unit = np.eye(d, dtype=np.int64)
            for j in range(n):
                for m in range(d):
                    img = pw.scale(unit[m])
                    cm = img.cmat
                    flat = np.zeros(n * d, dtype=np.int64)
                    if cm.shape[0]:
                        flat[: cm.size] = cm.ravel()
                    cols[:, j * d + m] = flat
                if j + 1 < n:
                    pw = (pw * F) % self.T
            self._comp_op = cols
            self._comp_ready = True

    def _interp_classic(self, t):
        """Lagrange interpolation of the candidate data for class t over
        the tower top, pushed down to F_q.  Raises ValueError when the
        interpolant is not rational over F_q."""
        self._ensure_naive()
        top = self.top
        p = self.p
        n = self.budget
        acc = np.zeros((n, top.deg_abs), dtype=np.int64)
        Tc = self._T_top.cmat
        for idx, i in enumerate(self.reps):
            v = self.xs2[self._class_of(i * t)]
            c = top.mul_vec(v, self._bary[idx])
            xi = self.xs[i]
            b = top.one_vec()
            for row in range(n - 1, -1, -1):
                acc[row] = (acc[row] + top.mul_vec(c, b)) % p
                if row:
                    b = (Tc[row] + top.mul_vec(xi, b)) % p
        return Poly(top, acc).down_to(self.E.ctx)

    def _interp_fast(self, t):
        """Orbit-by-orbit interpolation over F_q glued by CRT
        idempotents; None when a sample is not expressible over the
        orbit's node field (the data cannot come from a rational map)."""
        Fq = self.E.ctx
        total = None
        for blk in self.blocks:
            v = self.xs2[self._class_of(blk.rep * t)]
            sol = blk.solver.solve(v)
            if sol is None:
                return None
            piece = Poly(Fq, sol.reshape(self.L, self.d))
            term = piece * blk.idem
            total = term if total is None else total + term
        return total % self.T

    def _compose_step(self, A):
        """A(X) -> A(X^q mod T) mod T through the precomputed linear
        operator: advances a candidate to the next class of its
        Frobenius coset."""
        n, d = self.budget, self.d
        flat = np.zeros(n * d, dtype=np.int64)
        cm = A.cmat
        if cm.shape[0]:
            flat[: cm.size] = cm.ravel()
        out = matvec_mod(self._comp_op, flat, self.p)
        return Poly(self.E.ctx, out.reshape(n, d))

    # -- recognition -------------------------------------------------------

    def _reconstruct(self, A):
        ell = self.ell
        try:
            g, h = rational_reconstruction(A, self.T, ell, ell - 1)
        except NoRationalFraction:
            return None
        if g.degree != ell or h.degree != ell - 1:
            return None
        return g, h

    def _recognize(self, g, h):
        """Rebuild the isogeny from the candidate denominator and test
        it against (g, h); returns (map, None) or (None, reason)."""
        s = _sqrt_poly(h)
        if s is None:
            return None, "square"
        try:
            V = velu(self.E, s, check=False)
        except (AssertionError, ValueError, ZeroDivisionError):
            return None, "morphism"
        try:
            onto = find_isomorphism(V.codomain, self.E2)
        except NotIsomorphic:
            return None, "isomorphism-missing"
        base = onto.compose_isogeny(V)
        for alpha in all_automorphisms(self.E2):
            full = alpha.compose_isogeny(base)
            if full.x_num == g and full.x_den == h:
                return full, None
        return None, "morphism"

    def locate_image_class(self, x):
        """The class whose tabulated second-curve abscissa equals x (a
        tower-top element); None when x is not in the table."""
        return self._x2_index.get(x.vec.tobytes())

    # -- the candidate loop --------------------------------------------------

    def run(self, variant=DEFAULT_VARIANT, workers=1, scan_all=False):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        workers = max(1, int(workers))
        if variant == "c2-naive":
            self._ensure_naive()
        elif variant == "c2-fi-mc":
            self._ensure_composition()
        n = self.budget
        per = -(-n // workers)
        slices = [(w * per, min(n, (w + 1) * per)) for w in range(workers) if w * per < n]

        lock = threading.Lock()
        best = {"pos": None, "map": None}
        accepted = []
        stage = []

        def scan(lo, hi):
            t_fi = t_rfr = t_mc = 0.0
            rej = dict.fromkeys(REJECT_REASONS, 0)
            A = None
            prev_pos = None
            for pos in range(lo, hi):
                if not scan_all:
                    with lock:
                        bp = best["pos"]
                    if bp is not None and bp < pos:
                        break
                rep, _, off = self.order[pos]
                t0 = time.perf_counter()
                if variant == "c2-naive":
                    try:
                        A = self._interp_classic(rep)
                    except ValueError:
                        A = None
                    t_fi += time.perf_counter() - t0
                elif variant == "c2-fi":
                    A = self._interp_fast(rep)
                    t_fi += time.perf_counter() - t0
                else:
                    if off != 0 and prev_pos == pos - 1 and A is not None:
                        A = self._compose_step(A)
                        t_mc += time.perf_counter() - t0
                    else:
                        A = self._interp_fast(rep)
                        t_fi += time.perf_counter() - t0
                prev_pos = pos
                if A is None:
                    rej["degree"] += 1
                    continue
                t0 = time.perf_counter()
                gh = self._reconstruct(A)
                t_rfr += time.perf_counter() - t0
                if gh is None:
                    rej["degree"] += 1
                    continue
                phi, reason = self._recognize(*gh)
                if phi is None:
                    rej[reason] += 1
                    continue
                with lock:
                    if best["pos"] is None or pos < best["pos"]:
                        best["pos"], best["map"] = pos, phi
                    accepted.append((pos, rep, phi))
                if not scan_all:
                    break
            stage.append((t_fi, t_rfr, t_mc, rej))

        t0 = time.perf_counter()
        if len(slices) == 1:
            scan(*slices[0])
        else:
            with ThreadPoolExecutor(max_workers=len(slices)) as pool:
                list(pool.map(lambda span: scan(*span), slices))
        t_loop = time.perf_counter() - t0

        found = best["map"]
        tries = n if (scan_all or found is None) else best["pos"] + 1
        accepted.sort(key=lambda item: item[0])
        verified = bool(
            found is not None and found.check_morphism(np.random.default_rng(0xC4EC))
        )
        reject_counts = dict.fromkeys(REJECT_REASONS, 0)
        t_fi = t_rfr = t_mc = 0.0
        for fi, rf, mc, rej in stage:
            t_fi += fi
            t_rfr += rf
            t_mc += mc
            for key, val in rej.items():
                reject_counts[key] += val
        return RunReport(
            ell=self.ell,
            p=self.p,
            d=self.d,
            k=self.k,
            variant=variant,
            workers=workers,
            t_torsE=self.t_torsE,
            t_torsE2=self.t_torsE2,
            t_FI=t_fi,
            t_RFR=t_rfr,
            t_MC=t_mc,
            tries=tries,
            t_loop=t_loop,
            found=found,
            verified=verified,
            budget=self.budget,
            t_setup=self.t_setup,
            accepted=accepted,
            reject_counts=reject_counts,
            note="",
        )


# ---------------------------------------------------------------------------
# module-level entry points


def prepare(E, E2, ell, k=None):
    """Build the shared search state for one (E, E2, ell) instance; the
    result's .run() can be called repeatedly with different variants."""
    return IsogenySearch(E, E2, ell, k=k)


def interpolate_classic(search, t):
    """Candidate polynomial for class t by Lagrange interpolation over
    the tower top (raises ValueError when not rational over F_q)."""
    return search._interp_classic(t)


def fast_interpolate(search, t):
    """Candidate polynomial for class t by the orbit/CRT build (raises
    ValueError when the data is not rational over F_q)."""
    A = search._interp_fast(t)
    if A is None:
        raise ValueError("candidate data is not rational over the base field")
    return A


def find_isogeny(E, E2, ell, variant=DEFAULT_VARIANT, workers=1, k=None, scan_all=False):
    """Search for a rational ell-isogeny E -> E2; returns a RunReport
    whose .found is the isogeny map or None."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    try:
        search = prepare(E, E2, ell, k=k)
    except NoSharedTorsion as exc:
        return RunReport(
            ell=ell,
            p=E.p,
            d=E.ctx.deg_abs,
            k=exc.k or (choose_k(E.p, ell) if k is None else int(k)),
            variant=variant,
            workers=max(1, int(workers)),
            t_torsE=exc.t_torsE,
            t_torsE2=exc.t_torsE2,
            t_FI=0.0,
            t_RFR=0.0,
            t_MC=0.0,
            tries=0,
            t_loop=0.0,
            found=None,
            verified=False,
            budget=torsion_budget(E.p, exc.k or choose_k(E.p, ell)),
            t_setup=0.0,
            accepted=[],
            reject_counts=dict.fromkeys(REJECT_REASONS, 0),
            note=str(exc),
        )
    return search.run(variant=variant, workers=workers, scan_all=scan_all)
