"""Ordinary elliptic curves over ``FieldCtx`` fields.

One short form per characteristic:

* p >= 5:  y^2 = x^3 + a*x + b
* p == 3:  y^2 = x^3 + a*x^2 + b   (a != 0 keeps the curve ordinary)
* p == 2:  y^2 + x*y = x^3 + a*x^2 + b  (b != 0; always ordinary)

Provides affine chord-tangent arithmetic, x-only Montgomery-style ladders,
separable odd-degree isogenies from kernel polynomials (with their y-maps
and a morphism self-check), isomorphism recovery between curves in the
same form, the quadratic twist normalising the Hasse invariant to 1, and
sampling of Galois-stable prime-order kernels for instance generation.
"""

from __future__ import annotations

import numpy as np

from .field import FieldElement
from .poly import Poly, power_sums, prod_list, radical
from .tower import _as_solver


class NotIsomorphic(ValueError):
    """The curves are not isomorphic over their base field."""


class NoRationalKernel(ValueError):
    """The curve has no Galois-stable cyclic subgroup of the given order."""


# ---------------------------------------------------------------------------
# curve forms


class Curve:
    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx, a, b):
        self.ctx = ctx
        self.a = ctx.element(a)
        self.b = ctx.element(b)
        p = ctx.p
        if p == 2:
            if self.b.is_zero():
                raise ValueError("binary form needs b != 0 (singular otherwise)")
        elif p == 3:
            if self.a.is_zero():
                raise ValueError("characteristic-3 form needs a != 0 (supersingular otherwise)")
            if self.b.is_zero():
                raise ValueError("characteristic-3 form needs b != 0 (singular otherwise)")
        else:
            disc = self.a**3 * 4 + self.b**2 * 27
            if disc.is_zero():
                raise ValueError("singular curve: 4a^3 + 27b^2 = 0")

    @property
    def p(self):
        return self.ctx.p

    @property
    def form(self):
        p = self.ctx.p
        return "binary" if p == 2 else ("a2" if p == 3 else "short")

    def coefficients(self):
        """(a2, a4, a6) of y^2 (+ xy) = x^3 + a2 x^2 + a4 x + a6."""
        zero = self.ctx.zero()
        if self.p >= 5:
            return zero, self.a, self.b
        return self.a, zero, self.b

    def f_poly(self):
        """The right-hand side cubic as a polynomial."""
        a2, a4, a6 = self.coefficients()
        return Poly.from_coeffs(self.ctx, [a6.vec, a4.vec, a2.vec, self.ctx.one_vec()])

    def j_invariant(self):
        p = self.p
        if p == 2:
            return self.b.inverse()
        if p == 3:
            return -(self.a**3) / self.b
        num = (self.a * 4) ** 3 * 1728
        den = (self.a**3 * 4 + self.b**2 * 27) * 16
        return num / den

    def lift_to(self, ctx2):
        if ctx2 is self.ctx:
            return self
        return Curve(
            ctx2,
            ctx2.element(ctx2.lift_from(self.ctx, self.a.vec)),
            ctx2.element(ctx2.lift_from(self.ctx, self.b.vec)),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Curve)
            and self.ctx is other.ctx
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((id(self.ctx), self.a, self.b))

    def serialize(self):
        return "%d,%d,%s,%s,%s" % (
            self.p,
            self.ctx.deg_abs,
            self.form,
            self.a.serialize(),
            self.b.serialize(),
        )

    def __repr__(self):
        return "Curve(%s)" % self.serialize()

    # -- point arithmetic -----------------------------------------------

    def on_curve(self, P):
        if P is None:
            return True
        x, y = P
        if self.p == 2:
            return y * y + x * y == x**3 + self.a * x * x + self.b
        a2, a4, a6 = self.coefficients()
        return y * y == x**3 + a2 * x * x + a4 * x + a6

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        if self.p == 2:
            return (x, y + x)
        return (x, -y)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if self.p == 2:
            if x1 == x2:
                if y2 == y1 + x1 or x1.is_zero():
                    return None
                lam = x1 + y1 / x1
                x3 = lam * lam + lam + self.a
                y3 = x1 * x1 + (lam + 1) * x3
                return (x3, y3)
            lam = (y1 + y2) / (x1 + x2)
            x3 = lam * lam + lam + x1 + x2 + self.a
            y3 = lam * (x1 + x3) + x3 + y1
            return (x3, y3)
        a2, a4, _ = self.coefficients()
        if x1 == x2:
            if (y1 + y2).is_zero():
                return None
            lam = (x1 * x1 * 3 + a2 * x1 * 2 + a4) / (y1 * 2)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return (x3, y3)

    def mul(self, n, P):
        n = int(n)
        if n < 0:
            return self.mul(-n, self.neg(P))
        out = None
        acc = P
        while n:
            if n & 1:
                out = self.add(out, acc)
            acc = self.add(acc, acc)
            n >>= 1
        return out

    # -- sampling ---------------------------------------------------------

    def lift_x(self, x):
        """A point with the given abscissa, or None.  The ordinate choice
        is deterministic (canonical square/AS root)."""
        ctx = self.ctx
        if self.p == 2:
            if x.is_zero():
                return (x, self.b.pth_root())
            rhs = (x**3 + self.a * x * x + self.b) / (x * x)
            if rhs.trace_to_prime() != 0:
                return None
            w = _canonical_as_root(ctx, rhs)
            return (x, w * x)
        from . import factor as _factor

        a2, a4, a6 = self.coefficients()
        rhs = x**3 + a2 * x * x + a4 * x + a6
        if rhs.is_zero():
            return (x, ctx.zero())
        y = _factor.sqrt_element(rhs)
        if y is None:
            return None
        return (x, y)

    def random_point(self, rng, tries=4096):
        for _ in range(tries):
            P = self.lift_x(self.ctx.random_element(rng))
            if P is not None:
                return P
        raise ValueError("failed to sample a point")


def parse_curve(ctx, text):
    parts = _split_top_level(text.strip())
    if len(parts) != 5:
        raise ValueError("curve text must have five fields: p,d,form,a,b")
    p, d, form = int(parts[0]), int(parts[1]), parts[2]
    if p != ctx.p or d != ctx.deg_abs:
        raise ValueError("curve field parameters do not match the context")
    E = Curve(ctx, ctx.element(parts[3]), ctx.element(parts[4]))
    if E.form != form:
        raise ValueError("curve form tag %r does not match characteristic" % form)
    return E


def _split_top_level(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# x-only ladders


def x_mul(E, x, n):
    """Abscissa of [n]P for any point P with abscissa x; None for infinity.

    Montgomery ladder on (X:Z) pairs: characteristic 2 uses the squaring
    double x -> x^2 + b/x^2 with mixed addition, odd characteristic the
    symmetric biquadratic formulas of the form's cubic.
    """
    n = int(abs(n))
    ctx = E.ctx
    if n == 0:
        return None
    if n == 1:
        return x
    one = ctx.one()
    if E.p == 2:
        b = E.b

        def dbl(X, Z):
            X2, Z2 = X * X, Z * Z
            return X2 * X2 + b * Z2 * Z2, X2 * Z2

        def add(X1, Z1, X2, Z2):
            t1, t2 = X1 * Z2, X2 * Z1
            Zp = (t1 + t2) ** 2
            return x * Zp + t1 * t2, Zp

    else:
        a2, a4, a6 = E.coefficients()
        c44 = a4 * a4 - a2 * a6 * 4

        def dbl(X, Z):
            X2, Z2 = X * X, Z * Z
            XZ = X * Z
            num = X2 * X2 - a4 * X2 * Z2 * 2 - a6 * XZ * Z2 * 8 + c44 * Z2 * Z2
            den = (X2 * X + a2 * X2 * Z + a4 * XZ * Z + a6 * Z2 * Z) * Z * 4
            return num, den

        def add(X1, Z1, X2, Z2):
            t1, t2 = X1 * Z2, X2 * Z1
            S = t1 + t2
            M = X1 * X2
            ZZ = Z1 * Z2
            den = (t1 - t2) ** 2
            num = (S * (M + a4 * ZZ) + (a2 * M + a6 * ZZ) * ZZ * 2) * 2
            return num - x * den, den

    R0 = (x, one)
    R1 = dbl(x, one)
    for bit in bin(n)[3:]:
        if bit == "1":
            R0 = add(R0[0], R0[1], R1[0], R1[1])
            R1 = dbl(R1[0], R1[1])
        else:
            R1 = add(R0[0], R0[1], R1[0], R1[1])
            R0 = dbl(R0[0], R0[1])
    X, Z = R0
    if Z.is_zero():
        return None
    return X / Z


# ---------------------------------------------------------------------------
# Hasse invariant and twists


def hasse_invariant(E):
    """Coefficient of X^(p-1) in f^((p-1)/2) (odd characteristic only)."""
    p = E.p
    if p == 2:
        raise ValueError("the Hasse invariant in this sense needs odd characteristic")
    f = E.f_poly()
    fp = f ** ((p - 1) // 2)
    return fp.coeff_elt(p - 1)


def twist_to_hasse_one(E, c, u1):
    """Quadratic twist by c^(-2) over the field of c: the result has Hasse
    invariant 1, and E -> twist is (x, y) -> (x/c^2, y/c^3)."""
    if E.p == 2:
        raise ValueError("characteristic 2 needs no Hasse normalisation")
    El = E.lift_to(u1)
    c2 = c * c
    if E.p == 3:
        Et = Curve(u1, El.a / c2, El.b / c2**3)
    else:
        Et = Curve(u1, El.a / c2**2, El.b / c2**3)
    assert hasse_invariant(Et) == u1.one()
    return Et


def untwist_abscissa(x, c):
    """Abscissa map from the Hasse-1 twist back to the original curve."""
    return x * c * c


def twist_point(P, c):
    """Point map E -> twist, (x, y) -> (x/c^2, y/c^3)."""
    if P is None:
        return None
    x, y = P
    c2 = c * c
    return (x / c2, y / (c2 * c))


def untwist_point(P, c):
    if P is None:
        return None
    x, y = P
    c2 = c * c
    return (x * c2, y * c2 * c)


# ---------------------------------------------------------------------------
# division polynomials (odd p, odd indices up to 7)


def division_polynomial(E, n):
    """The n-th division polynomial's x-part for odd n in {3,5,7} (odd p):
    vanishes exactly on the abscissae of the nonzero n-torsion."""
    if E.p == 2:
        raise ValueError("use the binary doubling formula in characteristic 2")
    if n not in (3, 5, 7):
        raise ValueError("only odd indices 3..7 are supported")
    ctx = E.ctx
    a2, a4, a6 = E.coefficients()
    f = E.f_poly()
    b2 = a2 * 4
    b4 = a4 * 2
    b6 = a6 * 4
    b8 = a2 * a6 * 4 - a4 * a4
    one = ctx.one()

    def C(*vals):
        return Poly.from_coeffs(ctx, [v.vec for v in vals])

    psi3 = C(b8, b6 * 3, b4 * 3, b2, one * 3)
    if n == 3:
        return psi3
    # even-index terms carry a factor 2y; track the y-free cofactor q4 of
    # psi4 = 2y*q4 and substitute y^2 -> f when two ordinates meet.
    q4 = C(
        b4 * b8 - b6 * b6,
        b2 * b8 - b4 * b6,
        b8 * 10,
        b6 * 10,
        b4 * 5,
        b2,
        one * 2,
    )
    psi5 = f * f * q4 * 16 - psi3**3
    if n == 5:
        return psi5
    return psi5 * psi3**3 - f * f * q4**3 * 16


def p_torsion_polynomial(E):
    """Monic radical of the p-division polynomial: degree (p-1)/2, the
    abscissae of the physical p-torsion of an ordinary curve."""
    p = E.p
    psi = division_polynomial(E, p)
    rad = radical(psi.monic())
    if rad.degree != (p - 1) // 2:
        raise ValueError("curve is not ordinary: p-torsion abscissa count is wrong")
    return rad


# ---------------------------------------------------------------------------
# isogenies from kernel polynomials


class IsogenyMap:
    """Separable odd-degree isogeny: x-map x_num/x_den with x_den the
    square of the monic kernel polynomial, and the matching y-map
    y -> (y * y_cross(x) + y_plain(x)) / y_den(x)."""

    __slots__ = (
        "domain",
        "codomain",
        "ell",
        "kernel",
        "x_num",
        "x_den",
        "y_cross",
        "y_plain",
        "y_den",
    )

    def __init__(self, domain, codomain, ell, kernel, x_num, x_den, y_cross, y_plain, y_den):
        self.domain = domain
        self.codomain = codomain
        self.ell = ell
        self.kernel = kernel
        self.x_num = x_num
        self.x_den = x_den
        self.y_cross = y_cross
        self.y_plain = y_plain
        self.y_den = y_den

    def apply(self, P):
        if P is None:
            return None
        x, y = P
        den = self.x_den.eval_elt(x)
        if den.is_zero():
            return None
        yd = self.y_den.eval_elt(x)
        if yd.is_zero():
            # only x = 0 in characteristic 2 (x divides y_den there):
            # translate by an auxiliary point, map, translate back.
            rng = np.random.default_rng(0x7A31)
            for _ in range(64):
                Q = self.domain.random_point(rng)
                img_q = self._apply_direct(Q)
                img_pq = self._apply_direct(self.domain.add(P, Q))
                if img_pq is None or img_q is None:
                    continue
                return self.codomain.add(img_pq, self.codomain.neg(img_q))
            raise ValueError("could not evaluate the isogeny at this point")
        return self._finish(x, y, den, yd)

    def _apply_direct(self, P):
        if P is None:
            return None
        x, y = P
        den = self.x_den.eval_elt(x)
        yd = self.y_den.eval_elt(x)
        if den.is_zero() or yd.is_zero():
            return None
        return self._finish(x, y, den, yd)

    def _finish(self, x, y, den, yd):
        X = self.x_num.eval_elt(x) / den
        Y = (y * self.y_cross.eval_elt(x) + self.y_plain.eval_elt(x)) / yd
        return (X, Y)

    def lift_to(self, ctx2):
        if ctx2 is self.domain.ctx:
            return self
        return IsogenyMap(
            self.domain.lift_to(ctx2),
            self.codomain.lift_to(ctx2),
            self.ell,
            self.kernel.lift_to(ctx2),
            self.x_num.lift_to(ctx2),
            self.x_den.lift_to(ctx2),
            self.y_cross.lift_to(ctx2),
            self.y_plain.lift_to(ctx2),
            self.y_den.lift_to(ctx2),
        )

    def serialize(self):
        return "\n".join(
            [
                "domain %s" % self.domain.serialize(),
                "codomain %s" % self.codomain.serialize(),
                "ell %d" % self.ell,
                "kernel %s" % self.kernel.serialize(),
                "x_num %s" % self.x_num.serialize(),
                "x_den %s" % self.x_den.serialize(),
                "y_cross %s" % self.y_cross.serialize(),
                "y_plain %s" % self.y_plain.serialize(),
                "y_den %s" % self.y_den.serialize(),
            ]
        )

    def check_morphism(self, rng, pairs=2, max_ext=3):
        """Spot-check: images satisfy the codomain equation and the map is
        additive, over the base field and one small extension."""
        for ext in (1, max_ext):
            if ext == 1:
                E1, E2, phi = self.domain, self.codomain, self
            else:
                big = extension_ctx(self.domain.ctx, ext)
                E1 = self.domain.lift_to(big)
                E2 = self.codomain.lift_to(big)
                phi = self.lift_to(big)
            for _ in range(pairs):
                P = E1.random_point(rng)
                Q = E1.random_point(rng)
                iP, iQ = phi.apply(P), phi.apply(Q)
                if not (E2.on_curve(iP) and E2.on_curve(iQ)):
                    return False
                if phi.apply(E1.add(P, Q)) != E2.add(iP, iQ):
                    return False
        return True


_EXT_CACHE = {}


def extension_ctx(ctx, ext):
    """A cached degree-ext extension of ctx (deterministic modulus)."""
    key = (id(ctx), ext)
    got = _EXT_CACHE.get(key)
    if got is None:
        from . import factor as _factor

        rng = np.random.default_rng([0xE77, ctx.p, ctx.deg_abs, ext])
        f = _factor.random_monic_irreducible(ctx, ext, rng)
        got = ctx.extend(f.cmat, name="ext%d" % ext)
        _EXT_CACHE[key] = got
    return got


def _monomial(ctx, c, k):
    out = np.zeros((k + 1, ctx.deg_abs), dtype=np.int64)
    out[k] = c.vec
    return Poly(ctx, out)


def _canonical_as_root(ctx, theta):
    """Canonical z with z^p - z = theta (constant coordinate zero), or None."""
    sol = _as_solver(ctx).solve(theta.vec)
    if sol is None:
        return None
    sol = sol.copy()
    sol[0] = 0
    return FieldElement(ctx, sol)


def _solve_quadratic_char2(v, W):
    """u with u^2 + v*u + W = 0 over F_q[x] (char 2), or None.

    Leading-coefficient recursion: each step cancels the top term of the
    residual R = W + u^2 + v*u.  When deg R = 2 deg v the step is a scalar
    quadratic with two roots; both branches are tried."""
    ctx = v.ctx
    dv = v.degree
    vlc = FieldElement(ctx, v.lc())

    def attempt(flip):
        u = Poly.zero(ctx)
        R = W
        branched = False
        while not R.is_zero():
            s = R.degree
            rlc = FieldElement(ctx, R.lc())
            if s > 2 * dv:
                if s % 2:
                    return None
                t = _monomial(ctx, rlc.pth_root(), s // 2)
            elif s == 2 * dv:
                z = _canonical_as_root(ctx, rlc / (vlc * vlc))
                if z is None:
                    return None
                if flip and not branched:
                    z = z + ctx.one()
                branched = True
                t = _monomial(ctx, z * vlc, dv)
            else:
                if s < dv:
                    return None
                t = _monomial(ctx, rlc / vlc, s - dv)
            u = u + t
            R = R + t * t + v * t
            if not R.is_zero() and R.degree >= s:
                return None
        return u

    for flip in (False, True):
        u = attempt(flip)
        if u is not None and (u * u + v * u + W).is_zero():
            return u
    return None


def velu(E, kernel, check=True):
    """Separable isogeny with the given monic kernel polynomial (degree
    (ell-1)/2 for odd ell >= 3), onto a codomain in the same short form.

    The x-map is x plus, over the kernel abscissae x_Q, the sum of
    t_Q/(x-x_Q) + u_Q/(x-x_Q)^2, assembled with remainder arithmetic
    only; the y-map is the normalised one (odd p: y * X'(x); char 2:
    y*X/x + X*e(x) with e solving the transported curve equation)."""
    ctx = E.ctx
    h = kernel.monic()
    n = h.degree
    ell = 2 * n + 1
    hp = h.derivative()
    x = Poly.x(ctx)
    p = E.p

    if p == 2:
        a, b = E.a, E.b
        part1 = (x * hp) % h
        part2 = ((x * x) * hp) % h
        g = x * h * h + part1 * h + part2 * hp + part2.derivative() * h
        if not (x * g.derivative() + g).is_zero():
            raise AssertionError("normalisation identity x*X' = X failed")
        ps = power_sums(h, 2)
        p1 = FieldElement(ctx, ps[1])
        a4r = p1
        a6r = b + p1
        s = a4r  # Y -> Y + s turns the codomain back into the short form
        E2 = Curve(ctx, a, a6r + s * s)
        x_den = h * h
        y_den = x * x_den * h
        y_cross = g * h
        f2 = E.f_poly()
        xx = x * x
        W = (
            xx * g**3
            + (xx * g * g * h * h).scale(a.vec)
            + (xx * g * h**4).scale(a4r.vec)
            + (xx * h**6).scale(a6r.vec)
            + f2 * g * g * h * h
        )
        u = _solve_quadratic_char2(x * g * h, W)
        if u is None:
            raise ValueError("no rational y-map: not a valid isogeny kernel")
        y_plain = u + y_den.scale(s.vec)
        phi = IsogenyMap(E, E2, ell, h, g, x_den, y_cross, y_plain, y_den)
    else:
        a2, a4, a6 = E.coefficients()
        f = E.f_poly()
        T = Poly.from_coeffs(ctx, [(a4 * 2).vec, (a2 * 4).vec, ctx.from_int(6)])
        U = f * 4
        part1 = (T * hp) % h
        part2 = (U * hp) % h
        g = x * h * h + part1 * h + part2 * hp - part2.derivative() * h
        ps = power_sums(h, 4)
        p1, p2, p3 = (FieldElement(ctx, ps[i]) for i in (1, 2, 3))
        nval = ctx.element(n)
        v = p2 * 6 + a2 * p1 * 4 + a4 * nval * 2
        w = p3 * 10 + a2 * p2 * 8 + a4 * p1 * 6 + a6 * nval * 4
        a4r = a4 - v * 5
        a6r = a6 - a2 * v * 4 - w * 7
        if p == 3:
            s = a4r / a2  # x -> x - s removes the linear term again
            g = g - (h * h).scale(s.vec)
            E2 = Curve(ctx, a2, s**3 + a2 * s * s + a4r * s + a6r)
        else:
            E2 = Curve(ctx, a4r, a6r)
        x_den = h * h
        y_cross = g.derivative() * h - g * hp * 2
        y_den = x_den * h
        y_plain = Poly.zero(ctx)
        phi = IsogenyMap(E, E2, ell, h, g, x_den, y_cross, y_plain, y_den)

    if not (phi.x_num.degree == ell and phi.x_den.degree == ell - 1):
        raise AssertionError("isogeny degree bookkeeping failed")
    if check:
        rng = np.random.default_rng(0x5E10)
        if not phi.check_morphism(rng):
            raise AssertionError("isogeny failed the random-point morphism check")
    return phi


# ---------------------------------------------------------------------------
# isomorphisms


class Isomorphism:
    """Form-preserving isomorphism: odd p is (x,y) -> (u^2 x, u^3 y);
    characteristic 2 is (x,y) -> (x, y + s*x)."""

    __slots__ = ("domain", "codomain", "u", "s")

    def __init__(self, domain, codomain, u=None, s=None):
        self.domain = domain
        self.codomain = codomain
        self.u = u
        self.s = s

    def apply(self, P):
        if P is None:
            return None
        x, y = P
        if self.domain.p == 2:
            return (x, y + self.s * x)
        u = self.u
        return (x * u * u, y * u**3)

    def compose_isogeny(self, phi):
        """The isogeny phi followed by this isomorphism."""
        assert phi.codomain == self.domain
        if self.domain.p == 2:
            extra = (Poly.x(phi.domain.ctx) * phi.x_num * phi.kernel).scale(self.s.vec)
            return IsogenyMap(
                phi.domain,
                self.codomain,
                phi.ell,
                phi.kernel,
                phi.x_num,
                phi.x_den,
                phi.y_cross,
                phi.y_plain + extra,
                phi.y_den,
            )
        u = self.u
        u2 = u * u
        u3 = u2 * u
        return IsogenyMap(
            phi.domain,
            self.codomain,
            phi.ell,
            phi.kernel,
            phi.x_num.scale(u2.vec),
            phi.x_den,
            phi.y_cross.scale(u3.vec),
            phi.y_plain.scale(u3.vec),
            phi.y_den,
        )


def find_isomorphism(E1, E2):
    """Isomorphism E1 -> E2 over their common field, or NotIsomorphic
    (in particular for nontrivial twists)."""
    from . import factor as _factor

    if E1.ctx is not E2.ctx:
        raise ValueError("curves live over different contexts")
    ctx = E1.ctx
    p = E1.p
    if p == 2:
        if E1.b != E2.b:
            raise NotIsomorphic("binary curves with different b are never isomorphic")
        theta = E1.a + E2.a
        if theta.trace_to_prime() != 0:
            raise NotIsomorphic("a-coefficients differ by a trace-one class (twist)")
        return Isomorphism(E1, E2, s=_canonical_as_root(ctx, theta))
    if p == 3:
        u2 = E2.a / E1.a
        if u2**3 != E2.b / E1.b:
            raise NotIsomorphic("coefficient ratios are inconsistent")
        u = _factor.sqrt_element(u2)
        if u is None:
            raise NotIsomorphic("scaling class is a nonsquare (twist)")
        return Isomorphism(E1, E2, u=u)
    if E1.a.is_zero() != E2.a.is_zero() or E1.b.is_zero() != E2.b.is_zero():
        raise NotIsomorphic("exactly one curve has a vanishing coefficient")
    if not E1.a.is_zero() and not E1.b.is_zero():
        candidates = [(E2.b / E1.b) / (E2.a / E1.a)]
    elif E1.a.is_zero():
        # j = 0: u^2 runs over the cube roots of b2/b1 in the field
        ratio = E2.b / E1.b
        cmat = np.zeros((4, ctx.deg_abs), dtype=np.int64)
        cmat[0] = (-ratio.vec) % ctx.p
        cmat[3] = ctx.one_vec()
        candidates = [FieldElement(ctx, vec) for vec in _factor.roots(Poly(ctx, cmat))]
    else:
        # j = 1728: u^2 runs over the square roots of a2/a1
        ratio = E2.a / E1.a
        cmat = np.zeros((3, ctx.deg_abs), dtype=np.int64)
        cmat[0] = (-ratio.vec) % ctx.p
        cmat[2] = ctx.one_vec()
        candidates = [FieldElement(ctx, vec) for vec in _factor.roots(Poly(ctx, cmat))]
    for u2 in candidates:
        if E1.a * u2 * u2 != E2.a or E1.b * u2**3 != E2.b:
            continue
        u = _factor.sqrt_element(u2)
        if u is None:
            continue
        return Isomorphism(E1, E2, u=u)
    raise NotIsomorphic("no base-field scaling matches (twist or distinct j)")


# ---------------------------------------------------------------------------
# point counting and rational kernels


def count_points(E):
    """#E(F_q) by direct abscissa scan (intended for q <= 4096)."""
    ctx = E.ctx
    q = ctx.order
    if q > 4096:
        raise ValueError("exhaustive point count capped at q = 4096")
    total = 1
    if E.p == 2:
        a, b = E.a, E.b
        for vec in _all_vecs(ctx):
            x = FieldElement(ctx, vec)
            if x.is_zero():
                total += 1
                continue
            rhs = (x**3 + a * x * x + b) / (x * x)
            total += 2 if rhs.trace_to_prime() == 0 else 0
        return total
    a2, a4, a6 = E.coefficients()
    half = (q - 1) // 2
    for vec in _all_vecs(ctx):
        x = FieldElement(ctx, vec)
        rhs = x**3 + a2 * x * x + a4 * x + a6
        if rhs.is_zero():
            total += 1
        elif rhs**half == ctx.one():
            total += 2
    return total


def _all_vecs(ctx):
    n = ctx.deg_abs
    p = ctx.p
    vec = np.zeros(n, dtype=np.int64)
    for idx in range(p**n):
        k = idx
        for j in range(n):
            vec[j] = k % p
            k //= p
        yield vec


def trace_of_frobenius(E):
    return E.ctx.order + 1 - count_points(E)


def count_points_ext(E, m, t1=None):
    """#E(F_{q^m}) from the trace over F_q via the Frobenius recurrence."""
    q = E.ctx.order
    if t1 is None:
        t1 = trace_of_frobenius(E)
    tm_prev, tm = 2, t1  # t_0 = 2
    for _ in range(m - 1):
        tm_prev, tm = tm, t1 * tm - q * tm_prev
    return q**m + 1 - tm


def is_ordinary(E):
    if E.p == 2:
        return True
    return not hasse_invariant(E).is_zero()


def _sqrt_mod(a, ell):
    a %= ell
    for s in range(ell):
        if s * s % ell == a:
            return s
    return None


def multiplicative_order(lam, ell):
    o, acc = 1, lam % ell
    while acc != 1:
        acc = acc * lam % ell
        o += 1
    return o


def frobenius_eigenvalues_mod(t, q, ell):
    """Roots of X^2 - t X + q mod ell, smallest multiplicative order
    first, or None when the polynomial is irreducible."""
    disc = (t * t - 4 * q) % ell
    inv2 = pow(2, ell - 2, ell)
    if disc == 0:
        lam = t * inv2 % ell
        return [lam] if lam else None
    s = _sqrt_mod(disc, ell)
    if s is None:
        return None
    lams = sorted({(t + s) * inv2 % ell, (t - s) * inv2 % ell})
    lams = [lam for lam in lams if lam]
    if not lams:
        return None
    return sorted(lams, key=lambda lam: multiplicative_order(lam, ell))


def kernel_from_point(E, ell, seed=0, eigenvalue=None):
    """Monic kernel polynomial over F_q of a Galois-stable cyclic
    ell-subgroup, its generating point over the minimal extension, and
    the observed Frobenius eigenvalue.

    By default the eigenvalue of smallest multiplicative order is
    chosen (cheapest extension); pass ``eigenvalue`` to target the
    other eigenline when Frobenius has two distinct eigenvalues.

    Raises NoRationalKernel when Frobenius has no eigenvalue mod ell."""
    from .factor import _is_prime

    if ell < 3 or ell % 2 == 0 or ell == E.p or not _is_prime(ell):
        raise ValueError("ell must be an odd prime different from p")
    ctx = E.ctx
    q = ctx.order
    t = trace_of_frobenius(E)
    lams = frobenius_eigenvalues_mod(t, q, ell)
    if not lams:
        raise NoRationalKernel(
            "Frobenius has no eigenvalue mod %d: no Galois-stable cyclic subgroup" % ell
        )
    if eigenvalue is None:
        lam = lams[0]
        other = lams[-1]
    else:
        if eigenvalue not in lams:
            raise ValueError("eigenvalue is not a Frobenius eigenvalue mod ell")
        lam = eigenvalue
        other = next((mu for mu in lams if mu != lam), lam)
    m = multiplicative_order(lam, ell)
    big = extension_ctx(ctx, m) if m > 1 else ctx
    Eb = E.lift_to(big)
    Nm = count_points_ext(E, m, t1=t)
    assert Nm % ell == 0
    rest = Nm
    while rest % ell == 0:
        rest //= ell
    dd = ctx.deg_abs

    def frob_q(P):
        return (P[0].frobenius(dd), P[1].frobenius(dd))

    rng = np.random.default_rng([0x6E57, ell, seed])
    n = (ell - 1) // 2
    for _ in range(256):
        R = Eb.random_point(rng)
        S = Eb.mul(rest, R)
        if S is None:
            continue
        nxt = Eb.mul(ell, S)
        while nxt is not None:
            S, nxt = nxt, Eb.mul(ell, nxt)
        # project onto the Frobenius eigenline
        sS = frob_q(S)
        if other != lam:
            S = Eb.add(sS, Eb.neg(Eb.mul(other, S)))
            if S is None:
                continue
        else:
            Sp = Eb.add(sS, Eb.neg(Eb.mul(lam, S)))
            if Sp is not None:
                S = Sp
        sS = frob_q(S)
        mults = [None, S]
        for _i in range(2, ell):
            mults.append(Eb.add(mults[-1], S))
        lam_obs = next((i for i in range(1, ell) if mults[i] == sS), None)
        if lam_obs is None or lam_obs != lam:
            continue
        factors = [
            Poly.from_coeffs(big, [(-mults[i][0]).vec, big.one_vec()]) for i in range(1, n + 1)
        ]
        kernel_big = prod_list(big, factors)
        kernel = kernel_big.down_to(ctx) if big is not ctx else kernel_big
        return kernel, S, lam_obs
    raise NoRationalKernel("failed to locate an eigenpoint of order %d" % ell)


def random_ordinary_curve(ctx, rng):
    """A uniformly sampled valid (ordinary, nonsingular) curve."""
    while True:
        try:
            E = Curve(ctx, ctx.random_element(rng), ctx.random_element(rng))
        except ValueError:
            continue
        if is_ordinary(E):
            return E
