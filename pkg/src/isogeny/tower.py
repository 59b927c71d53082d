"""Artin-Schreier towers over a finite base field.

A tower tracks the fields met while repeatedly dividing points by p on an
ordinary elliptic curve.  Level 1 adjoins a (p-1)-th root ``c`` of the
Hasse invariant (so the curve can be rescaled to Hasse invariant 1); each
later level either reuses the current field (the needed Artin-Schreier
equation ``z^p - z = theta`` already has a solution there) or is the
degree-p extension defined by that equation.

Every context caches the linear solver for ``z -> z^p - z`` and at most
one degree-p Artin-Schreier child.  The child can be shared: once some
equation forced an extension, every other trace-nonzero equation over the
same field has its solutions in that same child (its trace vanishes one
level up), so towers built for two curves ride a single trunk of contexts
and never branch.
"""

from __future__ import annotations

import numpy as np

from ._linalg import LinearSolver
from .field import FieldCtx, FieldElement


class Solution:
    """The equation solved inside the current level."""

    __slots__ = ("z", "level")

    def __init__(self, z, level):
        self.z = z
        self.level = level

    extended = False


class Extend:
    """The equation forced (or reused) a degree-p extension."""

    __slots__ = ("level", "root")

    def __init__(self, level, root):
        self.level = level
        self.root = root

    extended = True


class TowerLevel:
    __slots__ = ("index", "ctx", "below", "rel_degree", "theta")

    def __init__(self, index, ctx, below, rel_degree, theta=None):
        self.index = index
        self.ctx = ctx
        self.below = below
        self.rel_degree = rel_degree
        self.theta = theta

    def __repr__(self):
        return "TowerLevel(%d, %s, rel=%d)" % (self.index, self.ctx.name, self.rel_degree)


def _canonical_root(z):
    """Lex-least solution among z + j, j in F_p: zero the constant flat
    coordinate (1 has flat coordinates e_0, so only vec[0] varies)."""
    vec = z.vec.copy()
    vec[0] = 0
    return FieldElement(z.ctx, vec)


def _as_solver(ctx):
    solver = getattr(ctx, "_as_solver_cache", None)
    if solver is None:
        n = ctx.deg_abs
        mat = (ctx.frob_mat() - np.eye(n, dtype=np.int64)) % ctx.p
        solver = LinearSolver(mat, ctx.p)
        ctx._as_solver_cache = solver
    return solver


def _as_child(ctx, theta):
    """Degree-p Artin-Schreier child of ctx, created on first use and
    shared by all later extensions over the same field."""
    child = getattr(ctx, "_as_child_cache", None)
    if child is None:
        p = ctx.p
        rows = np.zeros((p + 1, ctx.deg_abs), dtype=np.int64)
        rows[0] = (-theta.vec) % p
        rows[1] = (-ctx.one_vec()) % p
        rows[p] = (rows[p] + ctx.one_vec()) % p
        child = ctx.extend(rows, name="%s[z^%d-z-th]" % (ctx.name, p))
        child._as_defining_theta = theta
        ctx._as_child_cache = child
    return child


def solve_artin_schreier(level, theta):
    """Solve z^p - z = theta over the level's field.

    Returns Solution(z, level) when the absolute trace of theta to F_p
    vanishes (z canonical: constant flat coordinate zero), otherwise
    Extend(new level, canonical root) over the shared degree-p child.
    """
    ctx = level.ctx
    p = ctx.p
    if not isinstance(theta, FieldElement) or theta.ctx is not ctx:
        theta = ctx.element(theta)
    if theta.trace_to_prime() == 0:
        sol = _as_solver(ctx).solve(theta.vec)
        if sol is None:
            raise AssertionError("trace-zero Artin-Schreier equation must be solvable")
        z = _canonical_root(FieldElement(ctx, sol))
        assert z.frobenius(1) - z == theta
        return Solution(z, level)
    child = _as_child(ctx, theta)
    if getattr(child, "_as_defining_theta", None) is theta:
        root = _canonical_root(child.element(child.gen_vec()))
    else:
        lifted = child.element(child.lift_from(ctx, theta.vec))
        sol = _as_solver(child).solve(lifted.vec)
        if sol is None:
            raise AssertionError("Artin-Schreier equation unsolvable in its own splitting field")
        root = _canonical_root(FieldElement(child, sol))
    assert root.frobenius(1) - root == child.element(child.lift_from(ctx, theta.vec))
    new_level = TowerLevel(level.index + 1, child, level, p, theta=theta)
    return Extend(new_level, root)


def galois_orbit(a, over_ctx):
    """The p conjugates of ``a`` under Gal(U_{i+1}/U_i), the generator
    being Frobenius**(absolute degree of U_i)."""
    from .poly import Poly

    p = over_ctx.p
    e = over_ctx.deg_abs
    if isinstance(a, Poly):
        ctx = a.ctx
        out = [a]
        mat = ctx.sigma_mat(e % ctx.deg_abs)
        for _ in range(p - 1):
            out.append(out[-1].map_rows(mat))
        return out
    ctx = a.ctx
    out = [a]
    for _ in range(p - 1):
        out.append(out[-1].frobenius(e))
    return out


def push_down(a, to_ctx):
    """Re-express an element or polynomial over the subfield ``to_ctx``
    (one tower step down); raises ValueError naming the first offending
    coordinate when the input does not lie in the subfield."""
    from .poly import Poly

    if isinstance(a, Poly):
        return a.down_to(to_ctx)
    if a.ctx is to_ctx:
        return a
    return to_ctx.element(a.ctx.down_cast(a.vec, to_ctx))


def _orbit_size(x, d):
    """Degree of F_q(x) over F_q, q = p^d, by Frobenius orbit length."""
    ctx = x.ctx
    y = x.frobenius(d)
    size = 1
    while y != x:
        y = y.frobenius(d)
        size += 1
        if size > ctx.deg_abs:
            raise AssertionError("Frobenius orbit failed to close")
    return size


def build_base(ctx, hasse):
    """Level U_1 = F_q[c] with c a canonical (p-1)-th root of the Hasse
    invariant.  Returns (Tower, c, r) where (p-1)/(2r) = [F_q[c^2]:F_q].
    For p = 2 the level is F_q itself with c = 1, r = 1."""
    tower = Tower(ctx, hasse)
    return tower, tower.c, tower.r


class Tower:
    """The chain U_1 <= U_2 <= ... produced by one per-level equation at a
    time; levels with rel_degree 1 mark equations that solved in place."""

    def __init__(self, base_ctx, hasse=None):
        from . import factor as _factor

        self.base = base_ctx
        p = base_ctx.p
        self.p = p
        if p == 2:
            u1 = base_ctx
            self.c = base_ctx.one()
            self.m = 1
            self.r = 1
            self.sub_c2 = base_ctx
        else:
            if hasse is None or (isinstance(hasse, FieldElement) and hasse.is_zero()):
                raise ValueError("need a nonzero Hasse invariant to build the tower base")
            h = base_ctx.element(hasse)
            u1, c = _factor.min_degree_root_field(h, p - 1)
            self.c = c
            hl = u1.element(u1.lift_from(base_ctx, h.vec)) if u1 is not base_ctx else h
            assert c ** (p - 1) == hl
            d = base_ctx.deg_abs
            self.m = _orbit_size(c * c, d)
            e_c = _orbit_size(c, d)
            assert e_c * base_ctx.deg_abs == u1.deg_abs
            assert (p - 1) % (2 * self.m) == 0
            self.r = (p - 1) // (2 * self.m)
            self.sub_c2 = self._register_even_subfield(u1, e_c)
        self.levels = [TowerLevel(1, u1, None, u1.deg_abs // base_ctx.deg_abs)]

    def _register_even_subfield(self, u1, e_c):
        """Build F_q[c^2] as its own context and register its embedding
        into U_1 (generator -> c^2)."""
        from .poly import Poly

        base = self.base
        m = self.m
        if m == 1:
            return base
        if m == e_c:
            return u1
        c2 = self.c * self.c
        orbit = [c2]
        for _ in range(m - 1):
            orbit.append(orbit[-1].frobenius(base.deg_abs))
        minpoly = Poly.from_roots(u1, [x.vec for x in orbit]).down_to(base)
        sub = base.extend(minpoly.cmat, name="%s[c^2]" % base.name)
        # nested coordinates of sub are (power of its generator, base coord);
        # map generator -> c^2 and base through its embedding, then compose
        # with flat->nested to get the flat-coordinate embedding matrix.
        nested = np.zeros((u1.deg_abs, sub.deg_abs), dtype=np.int64)
        emb_base = base.embedding_to(u1)
        acc = u1.one_vec()
        for k in range(sub.deg_abs // base.deg_abs):
            block = emb_base * 1
            for j in range(base.deg_abs):
                nested[:, k * base.deg_abs + j] = u1.mul_vec(acc, block[:, j])
            acc = u1.mul_vec(acc, c2.vec)
        mat = (nested @ sub.to_nested) % u1.p
        sub.register_embedding(u1, mat)
        gen_img = u1.element(mat @ sub.gen_vec() % u1.p)
        assert gen_img == c2
        return sub

    @property
    def top(self):
        return self.levels[-1]

    @property
    def k(self):
        return len(self.levels)

    @property
    def i0(self):
        """Largest index i with U_i = U_1."""
        i0 = 1
        for lvl in self.levels[1:]:
            if lvl.rel_degree != 1:
                break
            i0 = lvl.index
        return i0

    def _check_degree_law(self):
        """Relative degrees must read (d_1, 1, ..., 1, p, ..., p)."""
        rels = [lvl.rel_degree for lvl in self.levels[1:]]
        seen_p = False
        for rdeg in rels:
            if rdeg == self.p:
                seen_p = True
            elif seen_p:
                raise AssertionError("tower grew again after stabilising: %r" % rels)

    def step(self, theta):
        """Advance one level with the equation z^p - z = theta over the
        current top; returns the canonical solution at the new top."""
        outcome = solve_artin_schreier(self.top, theta)
        if outcome.extended:
            self.levels.append(outcome.level)
            self._check_degree_law()
            return outcome.root
        self.levels.append(TowerLevel(self.top.index + 1, self.top.ctx, self.top, 1, theta=theta))
        self._check_degree_law()
        return outcome.z

    def step_stable(self):
        """Advance one level without a field extension (the purely
        inseparable first halving step in characteristic 2)."""
        self.levels.append(TowerLevel(self.top.index + 1, self.top.ctx, self.top, 1))
        self._check_degree_law()
        return self.top
