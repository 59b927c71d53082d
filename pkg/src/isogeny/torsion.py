"""Generators of the physical p-power torsion, one descent level at a time.

For an ordinary curve E over F_q the cyclic group E[p^k] (the etale part
of the p^k-torsion, the part visible over the algebraic closure) is
reached by repeatedly dividing a p-torsion point by p.  Each division
step is an Artin-Schreier equation over the field reached so far, so the
coordinate fields form a tower handled by ``tower.Tower``.

Odd characteristic first moves to the quadratic twist with Hasse
invariant 1 (coordinates in U_1 = F_q[c], c^(p-1) = Hasse(E)), where the
p-torsion itself becomes rational.  A division step then inverts the
etale degree-p isogeny V (dual of the coordinate p-th-power map): the
preimage Q with [p]Q = R satisfies V(Q) = R^(1/p); the step's
Artin-Schreier right-hand side is theta = y * beta(x) at R^(1/p), with
beta read off the half-power of the one-over-p curve's cubic, and the
fiber abscissae are the roots of a degree-p polynomial over the new
field.

Characteristic 2 divides by 2 on abscissae alone: x_half satisfies
x_half^2 + b/x_half^2 = x, i.e. w^2 + w = sqrt(b)/x with
x_half = sqrt(x) * w; the very first halving (from the 2-torsion
abscissa 0) is purely inseparable and extends nothing.
"""

from __future__ import annotations

import numpy as np

from .field import FieldElement
from .poly import Poly
from .tower import Tower, build_base
from . import curves as cv
from . import factor as _factor


def _lift_elt(x, ctx2):
    if x.ctx is ctx2:
        return x
    return ctx2.element(ctx2.lift_from(x.ctx, x.vec))


def _lift_point(P, ctx2):
    if P is None:
        return None
    return (_lift_elt(P[0], ctx2), _lift_elt(P[1], ctx2))


def all_automorphisms(E):
    """The form-preserving automorphisms of E over its own field."""
    ctx = E.ctx
    if E.p == 2:
        return [cv.Isomorphism(E, E, s=ctx.zero()), cv.Isomorphism(E, E, s=ctx.one())]
    if E.a.is_zero() or E.b.is_zero():
        power = 6 if E.a.is_zero() else 4
        cmat = np.zeros((power + 1, ctx.deg_abs), dtype=np.int64)
        cmat[0] = (-ctx.one_vec()) % ctx.p
        cmat[power] = ctx.one_vec()
        us = [FieldElement(ctx, vec) for vec in _factor.roots(Poly(ctx, cmat))]
    else:
        us = [ctx.one(), -ctx.one()]
    return [cv.Isomorphism(E, E, u=u) for u in us]


def p_torsion_generator(Et):
    """Canonical generator of the physical p-torsion of a Hasse-1 curve,
    plus its monic kernel polynomial.  All p-torsion coordinates must be
    rational over the curve's own field."""
    ctx = Et.ctx
    p = Et.p
    if p == 2:
        return (ctx.zero(), Et.b.pth_root()), Poly.x(ctx)
    W = cv.p_torsion_polynomial(Et)
    root_vecs = _factor.roots(W)
    if len(root_vecs) != W.degree:
        raise AssertionError("p-torsion abscissae are not rational over U_1")
    x1 = FieldElement(ctx, root_vecs[0])
    P1 = Et.lift_x(x1)
    if P1 is None:
        raise AssertionError("p-torsion ordinate is not rational over U_1")
    assert Et.mul(p, P1) is None
    return P1, W


class VolochContext:
    """Everything fixed across the descent steps of one odd-p curve."""

    __slots__ = ("Et", "Ec", "V", "W", "P1", "beta")

    def __init__(self, Et, Ec, V, W, P1, beta):
        self.Et = Et
        self.Ec = Ec
        self.V = V
        self.W = W
        self.P1 = P1
        self.beta = beta


def _beta_polynomial(Ec):
    """beta with f^((p-1)/2) = alpha + X^(p-1) + X^p*beta over the
    one-over-p curve (whose Hasse invariant must be exactly 1)."""
    ctx = Ec.ctx
    p = Ec.p
    fp = Ec.f_poly() ** ((p - 1) // 2)
    if FieldElement(ctx, fp.coeff(p - 1)) != ctx.one():
        raise AssertionError("the one-over-p curve does not have Hasse invariant 1")
    beta = Poly(ctx, fp.cmat[p:].copy())
    assert beta.degree == (p - 3) // 2
    return beta


def verschiebung(Et, W):
    """The etale degree-p isogeny V with (coordinate p-th powers after V)
    equal to [p], onto the curve with p-th-rooted coefficients."""
    u1 = Et.ctx
    p = Et.p
    Ec = cv.Curve(u1, Et.a.pth_root(), Et.b.pth_root())
    phi0 = cv.velu(Et, W)
    iso = cv.find_isomorphism(phi0.codomain, Ec)
    V0 = iso.compose_isogeny(phi0)
    rng = np.random.default_rng(0x5EED5)
    ext = cv.extension_ctx(u1, 2)
    tests = []
    guard = 0
    while len(tests) < 4 and guard < 200:
        guard += 1
        # small base fields may have no sign-informative multiples at all,
        # so fall through to the quadratic extension quickly
        E_here = Et if guard <= 8 and len(tests) < 2 else Et.lift_to(ext)
        T = E_here.random_point(rng)
        want = E_here.mul(p, T)
        if want is None or want == E_here.neg(want):
            continue  # uninformative for the sign search
        tests.append((T, want))
    assert len(tests) == 4
    for eps in sorted(all_automorphisms(Ec), key=lambda im: im.u.serialize()):
        V = eps.compose_isogeny(V0)
        ok = True
        for T, want in tests:
            big = T[0].ctx
            Vl = V.lift_to(big)
            img = Vl.apply(T)
            got = None if img is None else (img[0].frobenius(1), img[1].frobenius(1))
            if got != want:
                ok = False
                break
        if ok:
            return V, Ec
    raise AssertionError("no automorphism twist of the quotient map gives [p]")


def voloch_setup(Et):
    """Precompute the descent data for a Hasse-1 curve over U_1."""
    assert Et.p >= 3
    assert cv.hasse_invariant(Et) == Et.ctx.one()
    P1, W = p_torsion_generator(Et)
    V, Ec = verschiebung(Et, W)
    beta = _beta_polynomial(Ec)
    return VolochContext(Et, Ec, V, W, P1, beta)


def voloch_descend(vctx, tower, R):
    """One division step: a point Q over the (possibly grown) tower top
    with [p]Q = R.  R must live on the twist over the current top."""
    p = vctx.Et.p
    top = tower.top.ctx
    x_r, y_r = R
    assert x_r.ctx is top
    xc = x_r.pth_root()
    yc = y_r.pth_root()
    beta_l = vctx.beta.lift_to(top)
    theta = yc * beta_l.eval_elt(xc)
    tower.step(theta)
    new_top = tower.top.ctx
    Vl = vctx.V.lift_to(new_top)
    xc_l = _lift_elt(xc, new_top)
    yc_l = _lift_elt(yc, new_top)
    G = (Vl.x_den.scale(xc_l.vec) - Vl.x_num).monic()
    root_vecs = _factor.roots(G)
    if len(root_vecs) != p:
        raise AssertionError(
            "division fiber is not rational where the Artin-Schreier step says it is"
        )
    x_new = FieldElement(new_top, root_vecs[0])
    Etl = vctx.Et.lift_to(new_top)
    Q = Etl.lift_x(x_new)
    if Q is None:
        raise AssertionError("fiber ordinate missing over the tower top")
    if Vl.apply(Q) != (xc_l, yc_l):
        Q = Etl.neg(Q)
    assert Vl.apply(Q) == (xc_l, yc_l)
    assert Etl.mul(p, Q) == _lift_point(R, new_top)
    return Q


def kummer_descend(tower, E, x_prev):
    """One halving step on abscissae in characteristic 2.  The input 0
    (the 2-torsion abscissa) is the purely inseparable step."""
    top = tower.top.ctx
    assert x_prev.ctx is top
    if x_prev.is_zero():
        tower.step_stable()
        return E.b.pth_root().pth_root()
    b_l = _lift_elt(E.b, top)
    theta = b_l.pth_root() / x_prev
    w = tower.step(theta)
    new_top = tower.top.ctx
    x_half = _lift_elt(x_prev, new_top).pth_root() * w
    assert cv.x_mul(E.lift_to(new_top), x_half, 2) == _lift_elt(x_prev, new_top)
    return x_half


class TorsionGenerator:
    """The descent trail of one curve: per level i the coordinates of a
    point of exact order p^i (odd p: points on the Hasse-1 twist; char 2:
    abscissae on the curve itself), plus the tower that carries them."""

    __slots__ = ("E", "p", "k", "tower", "c", "Et", "trail", "vctx")

    def __init__(self, E, k, tower, c, Et, trail, vctx=None):
        self.E = E
        self.p = E.p
        self.k = k
        self.tower = tower
        self.c = c
        self.Et = Et
        self.trail = trail
        self.vctx = vctx

    @property
    def top(self):
        return self.tower.top.ctx

    def level_ctx(self, i):
        return self.tower.levels[i - 1].ctx

    def x_on_twist(self, i):
        """Abscissa of the level-i trail point, over its own level field."""
        entry = self.trail[i - 1]
        return entry if self.p == 2 else entry[0]

    def x_on_curve(self, i):
        """Abscissa of the level-i trail point mapped back to the model of
        E (undo the twist)."""
        xt = self.x_on_twist(i)
        if self.p == 2:
            return xt
        c_l = _lift_elt(self.c, xt.ctx)
        return cv.untwist_abscissa(xt, c_l)


def build_torsion_generator(E, k):
    """Descend from the p-torsion to a point of exact order p^k.

    Returns a TorsionGenerator whose tower has exactly k levels and whose
    top-level point passes both exact-order ladder tests."""
    if k < 1:
        raise ValueError("need at least one level")
    ctx = E.ctx
    p = ctx.p
    if p == 2:
        tower = Tower(ctx)
        x = ctx.zero()
        trail = [x]
        for _ in range(2, k + 1):
            x = kummer_descend(tower, E, x)
            trail.append(x)
        top = tower.top.ctx
        El = E.lift_to(top)
        x_top = _lift_elt(trail[-1], top)
        assert cv.x_mul(El, x_top, 2**k) is None
        if k > 1:
            assert cv.x_mul(El, x_top, 2 ** (k - 1)) is not None
        return TorsionGenerator(E, k, tower, None, E, trail)
    H = cv.hasse_invariant(E)
    if H.is_zero():
        raise ValueError("supersingular curve: no physical p-power torsion")
    tower, c, _r = build_base(ctx, H)
    u1 = tower.top.ctx
    Et = cv.twist_to_hasse_one(E, c, u1)
    vctx = voloch_setup(Et)
    # the p-torsion abscissa lies in the even subfield F_q[c^2]
    assert vctx.P1[0].frobenius(ctx.deg_abs * tower.m) == vctx.P1[0]
    P = vctx.P1
    trail = [P]
    for _ in range(2, k + 1):
        P = voloch_descend(vctx, tower, _lift_point(P, tower.top.ctx))
        trail.append(P)
    top = tower.top.ctx
    Etl = Et.lift_to(top)
    x_top = _lift_elt(trail[-1][0], top)
    assert cv.x_mul(Etl, x_top, p**k) is None
    if k > 1:
        assert cv.x_mul(Etl, x_top, p ** (k - 1)) is not None
    return TorsionGenerator(E, k, tower, c, Et, trail, vctx=vctx)
