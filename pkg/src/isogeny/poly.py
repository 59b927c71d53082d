"""Univariate polynomial algebra over ``FieldCtx`` coefficients.

A polynomial is a ``Poly`` wrapping a (deg+1, N) int64 matrix of flat
coefficient vectors, ascending in X, trimmed, entries reduced mod p.

Products run on raw unreduced convolution stacks: the X-direction uses
Kronecker substitution (packing the entire bivariate into one integer)
when coefficient growth permits, otherwise a short loop of exact float64
matmuls, with Karatsuba splitting above a size threshold configurable via
the ISOG_THRESH_KARATSUBA environment variable (default 32).
"""

from __future__ import annotations

import os

import numpy as np

from .field import FieldElement

DEFAULT_KARATSUBA_THRESHOLD = 32


class NoRationalFraction(ValueError):
    """Rational function reconstruction failed within the degree bounds."""


class NotASquare(ValueError):
    """The polynomial is not a square (up to a scalar factor)."""


class NonCoprimeModuli(ValueError):
    """CRT was asked to combine residues over non-coprime moduli."""


def _threshold():
    try:
        return int(os.environ.get("ISOG_THRESH_KARATSUBA", DEFAULT_KARATSUBA_THRESHOLD))
    except ValueError:
        return DEFAULT_KARATSUBA_THRESHOLD


def _trim_rows(cmat):
    nz = np.nonzero(np.any(cmat, axis=1))[0]
    if nz.size == 0:
        return cmat[:0]
    return cmat[: int(nz[-1]) + 1]


class Poly:
    __slots__ = ("ctx", "cmat")

    def __init__(self, ctx, cmat, trim=True):
        self.ctx = ctx
        cmat = np.asarray(cmat, dtype=np.int64)
        if cmat.ndim != 2 or cmat.shape[1] != ctx.deg_abs:
            raise ValueError("coefficient matrix shape mismatch")
        cmat = cmat % ctx.p
        if trim:
            cmat = _trim_rows(cmat)
        self.cmat = cmat

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, np.zeros((0, ctx.deg_abs), dtype=np.int64), trim=False)

    @classmethod
    def one(cls, ctx):
        return cls.const(ctx, ctx.one_vec())

    @classmethod
    def xpow(cls, ctx, k, scale=None):
        cmat = np.zeros((k + 1, ctx.deg_abs), dtype=np.int64)
        cmat[k] = ctx.one_vec() if scale is None else _as_vec(ctx, scale)
        return cls(ctx, cmat)

    @classmethod
    def x(cls, ctx):
        return cls.xpow(ctx, 1)

    @classmethod
    def const(cls, ctx, value):
        return cls(ctx, _as_vec(ctx, value).reshape(1, -1))

    @classmethod
    def from_coeffs(cls, ctx, coeffs):
        """Build from a list of scalars (ints / FieldElements / vectors)."""
        if not coeffs:
            return cls.zero(ctx)
        cmat = np.stack([_as_vec(ctx, c) for c in coeffs])
        return cls(ctx, cmat)

    @classmethod
    def from_roots(cls, ctx, roots):
        leaves = [
            cls(ctx, np.stack([(-_as_vec(ctx, r)) % ctx.p, ctx.one_vec()]), trim=False)
            for r in roots
        ]
        return prod_list(ctx, leaves)

    # -- basic structure -------------------------------------------------

    @property
    def degree(self):
        return self.cmat.shape[0] - 1

    def is_zero(self):
        return self.cmat.shape[0] == 0

    def is_one(self):
        return self.degree == 0 and np.array_equal(self.cmat[0], self.ctx.one_vec())

    def coeff(self, k):
        if 0 <= k <= self.degree:
            return self.cmat[k]
        return self.ctx.zero_vec()

    def coeff_elt(self, k):
        return FieldElement(self.ctx, self.coeff(k))

    def lc(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.cmat[-1]

    def is_monic(self):
        return not self.is_zero() and np.array_equal(self.lc(), self.ctx.one_vec())

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _as_poly(self.ctx, other)
        n = max(self.cmat.shape[0], other.cmat.shape[0])
        out = np.zeros((n, self.ctx.deg_abs), dtype=np.int64)
        out[: self.cmat.shape[0]] = self.cmat
        out[: other.cmat.shape[0]] = (
            out[: other.cmat.shape[0]] + other.cmat
        ) % self.ctx.p
        return Poly(self.ctx, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(self.ctx, other)
        n = max(self.cmat.shape[0], other.cmat.shape[0])
        out = np.zeros((n, self.ctx.deg_abs), dtype=np.int64)
        out[: self.cmat.shape[0]] = self.cmat
        out[: other.cmat.shape[0]] = (
            out[: other.cmat.shape[0]] - other.cmat
        ) % self.ctx.p
        return Poly(self.ctx, out)

    def __rsub__(self, other):
        return _as_poly(self.ctx, other) - self

    def __neg__(self):
        return Poly(self.ctx, (-self.cmat) % self.ctx.p, trim=False)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, FieldElement)) or (
            isinstance(other, np.ndarray) and other.ndim == 1
        ):
            return self.scale(other)
        other = _as_poly(self.ctx, other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.ctx)
        raw = _mul_raw(self.ctx, self.cmat, other.cmat, _threshold())
        return Poly(self.ctx, self.ctx.reduce_many(raw))

    __rmul__ = __mul__

    def scale(self, c):
        vec = _as_vec(self.ctx, c)
        if self.is_zero():
            return self
        if not np.any(vec):
            return Poly.zero(self.ctx)
        tiled = np.broadcast_to(vec, self.cmat.shape)
        return Poly(self.ctx, self.ctx.mul_many(self.cmat, tiled))

    def __pow__(self, e):
        acc = Poly.one(self.ctx)
        base = self
        e = int(e)
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def divmod_poly(self, other):
        other = _as_poly(self.ctx, other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ctx = self.ctx
        p = ctx.p
        db = other.degree
        if self.degree < db:
            return Poly.zero(ctx), self
        lead_inv = None
        if not other.is_monic():
            lead_inv = ctx.inv_vec(other.lc())
        rem = self.cmat.copy()
        qrows = np.zeros((self.degree - db + 1, ctx.deg_abs), dtype=np.int64)
        bl = other.cmat[:db]
        da = self.degree
        while da >= db:
            c = rem[da]
            if np.any(c):
                if lead_inv is not None:
                    c = ctx.mul_vec(c, lead_inv)
                qrows[da - db] = c
                if db:
                    tiled = np.broadcast_to(c, (db, ctx.deg_abs))
                    rem[da - db : da] = (
                        rem[da - db : da] - ctx.mul_many(tiled, bl)
                    ) % p
                rem[da] = 0
            da -= 1
            while da >= db and not np.any(rem[da]):
                rem[da] = 0
                da -= 1
        return Poly(ctx, qrows), Poly(ctx, rem[:db] if db else rem[:0])

    def __floordiv__(self, other):
        return self.divmod_poly(other)[0]

    def __mod__(self, other):
        return self.divmod_poly(other)[1]

    def monic(self):
        if self.is_zero() or self.is_monic():
            return self
        inv = self.ctx.inv_vec(self.lc())
        return self.scale(inv)

    def derivative(self):
        if self.degree < 1:
            return Poly.zero(self.ctx)
        ks = (np.arange(1, self.degree + 1) % self.ctx.p).reshape(-1, 1)
        return Poly(self.ctx, self.cmat[1:] * ks % self.ctx.p)

    # -- evaluation / composition -----------------------------------------

    def eval_vec(self, x):
        """Evaluate at one point (flat vector in our ctx), Horner."""
        ctx = self.ctx
        if self.is_zero():
            return ctx.zero_vec()
        acc = self.cmat[-1].copy()
        for k in range(self.degree - 1, -1, -1):
            acc = (ctx.mul_vec(acc, x) + self.cmat[k]) % ctx.p
        return acc

    def eval_elt(self, x):
        vec = x.vec if isinstance(x, FieldElement) else _as_vec(self.ctx, x)
        return FieldElement(self.ctx, self.eval_vec(vec))

    def eval_many(self, xs):
        """Evaluate at a (k, N) stack of points; returns (k, N)."""
        ctx = self.ctx
        xs = np.asarray(xs, dtype=np.int64)
        k = xs.shape[0]
        if self.is_zero():
            return np.zeros((k, ctx.deg_abs), dtype=np.int64)
        acc = np.broadcast_to(self.cmat[-1], (k, ctx.deg_abs)).copy()
        for i in range(self.degree - 1, -1, -1):
            acc = ctx.mul_many(acc, xs)
            acc = (acc + self.cmat[i]) % ctx.p
        return acc

    def compose(self, inner):
        """self(inner) by Horner (no modulus)."""
        inner = _as_poly(self.ctx, inner)
        acc = Poly.zero(self.ctx)
        for k in range(self.degree, -1, -1):
            acc = acc * inner + Poly.const(self.ctx, self.coeff(k))
        return acc

    # -- coefficient maps ---------------------------------------------------

    def map_rows(self, mat, new_ctx=None):
        """Apply an F_p-linear map (rows @ mat.T) to every coefficient."""
        ctx = new_ctx or self.ctx
        if self.is_zero():
            return Poly.zero(ctx)
        from ._linalg import matmul_mod

        return Poly(ctx, matmul_mod(self.cmat, np.asarray(mat).T, ctx.p))

    def lift_to(self, big_ctx):
        if big_ctx is self.ctx:
            return self
        if self.is_zero():
            return Poly.zero(big_ctx)
        return Poly(big_ctx, big_ctx.lift_many_from(self.ctx, self.cmat))

    def down_to(self, small_ctx):
        if small_ctx is self.ctx:
            return self
        if self.is_zero():
            return Poly.zero(small_ctx)
        return Poly(small_ctx, self.ctx.down_cast_many(self.cmat, small_ctx))

    def frobenius_coeffs(self, e=1):
        """Apply x -> x**(p**e) to every coefficient."""
        if self.is_zero():
            return self
        return self.map_rows(self.ctx.sigma_mat(e))

    def pth_root_coeffs(self):
        if self.is_zero():
            return self
        return self.map_rows(self.ctx.frob_inv_mat())

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ctx is other.ctx and np.array_equal(self.cmat, other.cmat)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.cmat.tobytes()))

    def reverse(self, n=None):
        """Coefficient reversal x**n * f(1/x) (n defaults to deg f)."""
        if n is None:
            n = self.degree
        out = np.zeros((n + 1, self.ctx.deg_abs), dtype=np.int64)
        take = min(n + 1, self.cmat.shape[0])
        out[:take] = self.cmat[:take]
        return Poly(self.ctx, out[::-1])

    def serialize(self):
        """Textual form ``[c0,c1,...,cn]`` with each coefficient in its
        field's textual form."""
        return "[" + ",".join(self.ctx.serialize_vec(row) for row in self.cmat) + "]"

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for k in range(min(self.degree, 3) + 1):
            terms.append("(%s)*X^%d" % (self.ctx.serialize_vec(self.coeff(k)), k))
        if self.degree > 3:
            terms.append("...+(%s)*X^%d" % (self.ctx.serialize_vec(self.lc()), self.degree))
        return "Poly(%s)" % " + ".join(terms)


def _as_vec(ctx, value):
    if isinstance(value, FieldElement):
        if value.ctx is not ctx:
            raise ValueError("scalar from a different context")
        return value.vec
    if isinstance(value, (int, np.integer)):
        return ctx.from_int(int(value))
    vec = np.asarray(value, dtype=np.int64) % ctx.p
    if vec.shape != (ctx.deg_abs,):
        raise ValueError("bad scalar vector shape")
    return vec


def _as_poly(ctx, value):
    if isinstance(value, Poly):
        if value.ctx is not ctx:
            raise ValueError("polynomial from a different context")
        return value
    return Poly.const(ctx, _as_vec(ctx, value))


# ---------------------------------------------------------------------------
# raw multiplication kernels


def _mul_base(ctx, a, b):
    """Raw product of coefficient stacks -> (ra+rb-1, 2N-1) mod p."""
    n = ctx.deg_abs
    p = ctx.p
    ra, rb = a.shape[0], b.shape[0]
    width = 2 * n - 1
    bound = n * (p - 1) * (p - 1) * (min(ra, rb) + 1)
    if bound < (1 << 16):
        return _mul_kron2(a, b, n, p, 2)
    if bound < (1 << 32):
        return _mul_kron2(a, b, n, p, 4)
    # exact float64 matmul fallback, looping over the shorter operand
    if rb > ra:
        a, b = b, a
        ra, rb = rb, ra
    out = np.zeros((ra + rb - 1, width), dtype=np.int64)
    for j in range(rb):
        out[j : j + ra] += ctx.conv_many(a, np.broadcast_to(b[j], (ra, n)))
        out[j : j + ra] %= p
    return out % p


def _mul_kron2(a, b, n, p, limb):
    """Bivariate Kronecker: pack whole stacks into integers and multiply."""
    dt = "<u2" if limb == 2 else "<u4"
    width = 2 * n - 1
    ra, rb = a.shape[0], b.shape[0]

    def pack(m):
        rows = m.shape[0]
        buf = np.zeros((rows, width), dtype=dt)
        buf[:, :n] = m.astype(dt)
        return int.from_bytes(buf.tobytes(), "little")

    ia, ib = pack(a), pack(b)
    rows_out = ra + rb - 1
    total = limb * rows_out * width
    raw = (ia * ib).to_bytes(total + 8, "little")[:total]
    out = np.frombuffer(raw, dtype=dt).astype(np.int64).reshape(rows_out, width)
    return out % p


def _mul_raw(ctx, a, b, thresh):
    """Raw (T-reduced, X-unreduced is the other way: T-direction raw)
    product: returns (ra+rb-1, 2N-1) entries mod p, X fully convolved."""
    ra, rb = a.shape[0], b.shape[0]
    n = ctx.deg_abs
    if ra == 0 or rb == 0:
        return np.zeros((0, 2 * n - 1), dtype=np.int64)
    if min(ra, rb) <= 2 or max(ra, rb) <= thresh:
        return _mul_base(ctx, a, b)
    p = ctx.p
    h = (max(ra, rb) + 1) // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    width = 2 * n - 1
    out = np.zeros((ra + rb - 1, width), dtype=np.int64)
    if a1.shape[0] == 0:
        lo = _mul_raw(ctx, a, b0, thresh)
        hi = _mul_raw(ctx, a, b1, thresh)
        out[: lo.shape[0]] += lo
        out[h : h + hi.shape[0]] += hi
        return out % p
    if b1.shape[0] == 0:
        lo = _mul_raw(ctx, a0, b, thresh)
        hi = _mul_raw(ctx, a1, b, thresh)
        out[: lo.shape[0]] += lo
        out[h : h + hi.shape[0]] += hi
        return out % p
    z0 = _mul_raw(ctx, a0, b0, thresh)
    z2 = _mul_raw(ctx, a1, b1, thresh)
    sa = _padded_add(a0, a1, p)
    sb = _padded_add(b0, b1, p)
    z1 = _mul_raw(ctx, sa, sb, thresh)
    z1p = np.zeros((z1.shape[0], width), dtype=np.int64)
    z1p += z1
    z1p[: z0.shape[0]] -= z0
    z1p[: z2.shape[0]] -= z2
    out[: z0.shape[0]] += z0
    out[h : h + z1p.shape[0]] += z1p
    out[2 * h : 2 * h + z2.shape[0]] += z2
    return out % p


def _padded_add(a, b, p):
    n = max(a.shape[0], b.shape[0])
    out = np.zeros((n, a.shape[1]), dtype=np.int64)
    out[: a.shape[0]] = a
    out[: b.shape[0]] = (out[: b.shape[0]] + b) % p
    return out


# ---------------------------------------------------------------------------
# gcd, xgcd, rational reconstruction


def poly_gcd(a, b):
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def poly_xgcd(a, b):
    """Returns (g, s, t) monic g with s*a + t*b = g."""
    ctx = a.ctx
    r0, r1 = a, b
    s0, s1 = Poly.one(ctx), Poly.zero(ctx)
    t0, t1 = Poly.zero(ctx), Poly.one(ctx)
    while not r1.is_zero():
        q, r = r0.divmod_poly(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = ctx.inv_vec(r0.lc())
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def poly_invmod(a, m):
    g, s, _ = poly_xgcd(a % m, m)
    if g.degree != 0:
        raise ZeroDivisionError("polynomial not invertible modulo given modulus")
    return s % m


def rational_reconstruction(value, modulus, num_bound, den_bound):
    """Find (g, h), h monic, with g = h*value mod modulus, deg g <= num_bound,
    deg h <= den_bound and gcd(g, h) = 1.  Raises NoRationalFraction."""
    ctx = value.ctx
    r0, r1 = modulus, value % modulus
    t0, t1 = Poly.zero(ctx), Poly.one(ctx)
    while not r1.is_zero() and r1.degree > num_bound:
        q, r = r0.divmod_poly(r1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - q * t1
    g, h = r1, t1
    if g.is_zero() or h.is_zero():
        raise NoRationalFraction("degenerate remainder in reconstruction")
    if h.degree > den_bound:
        raise NoRationalFraction("denominator degree bound exceeded")
    inv = ctx.inv_vec(h.lc())
    g, h = g.scale(inv), h.scale(inv)
    if poly_gcd(g, h).degree != 0:
        raise NoRationalFraction("reconstructed fraction is not reduced")
    if poly_gcd(h, modulus).degree != 0:
        raise NoRationalFraction("denominator vanishes at an evaluation point")
    return g, h


# ---------------------------------------------------------------------------
# products, CRT, interpolation


def prod_list(ctx, polys):
    """Balanced product of a list of polynomials."""
    if not polys:
        return Poly.one(ctx)
    layer = list(polys)
    while len(layer) > 1:
        nxt = []
        for i in range(0, len(layer) - 1, 2):
            nxt.append(layer[i] * layer[i + 1])
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


class ProductTree:
    """Balanced subproduct tree over a list of polynomials.

    levels[0] is the leaf list; each next level holds pairwise products
    (odd tail carried up); levels[-1][0] is the full product.
    """

    def __init__(self, ctx, polys):
        self.ctx = ctx
        if not polys:
            self.levels = [[Poly.one(ctx)]]
            return
        self.levels = [list(polys)]
        while len(self.levels[-1]) > 1:
            layer = self.levels[-1]
            nxt = [layer[i] * layer[i + 1] for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            self.levels.append(nxt)

    @property
    def root(self):
        return self.levels[-1][0]


def product_tree(ctx, polys):
    return ProductTree(ctx, polys)


def crt_pair(a1, m1, a2, m2):
    """Combine a1 mod m1 and a2 mod m2 (coprime moduli)."""
    try:
        inv = poly_invmod(m1, m2)
    except ZeroDivisionError:
        raise NonCoprimeModuli("moduli share a common factor") from None
    diff = (a2 - a1) % m2
    lift = (diff * inv) % m2
    return a1 + m1 * lift, m1 * m2


def crt_combine(pairs):
    """CRT over a list of (residue, modulus) with pairwise coprime moduli."""
    a, m = pairs[0]
    a = a % m
    for a2, m2 in pairs[1:]:
        a, m = crt_pair(a, m, a2 % m2, m2)
    return a, m


crt_list = crt_combine


def interpolate_classic(ctx, xs, ys):
    """Lagrange interpolation: xs, ys are (k, N) stacks, xs distinct."""
    k = xs.shape[0]
    seen = {tuple(int(c) for c in row) for row in xs}
    if len(seen) != k:
        raise ValueError("duplicate abscissae in interpolation input")
    master = Poly.from_roots(ctx, list(xs))
    dm = master.derivative()
    denoms = dm.eval_many(xs)
    # all quotients master/(X - x_i) at once by vectorised synthetic division
    n = master.degree
    q = np.zeros((k, n, ctx.deg_abs), dtype=np.int64)
    q[:, n - 1] = master.coeff(n)
    for j in range(n - 1, 0, -1):
        q[:, j - 1] = (ctx.mul_many(xs, q[:, j]) + master.coeff(j)) % ctx.p
    weights = np.stack([ctx.inv_vec(d) for d in denoms])
    coefs = ctx.mul_many(ys, weights)  # y_i / M'(x_i)
    # A[j] = sum_i coefs[i] * q[i, j]: contract over i with raw convolutions
    out_raw = np.zeros((n, 2 * ctx.deg_abs - 1), dtype=np.int64)
    for v in range(ctx.deg_abs):
        g = np.tensordot(coefs[:, v], q, axes=(0, 0))  # (n, N)
        out_raw[:, v : v + ctx.deg_abs] += g
        out_raw %= ctx.p
    return Poly(ctx, ctx.reduce_many(out_raw))


interpolate = interpolate_classic


# ---------------------------------------------------------------------------
# modular composition


def modcomp_horner(a, f, modulus):
    """a(f) mod modulus by Horner."""
    ctx = a.ctx
    acc = Poly.zero(ctx)
    for k in range(a.degree, -1, -1):
        acc = (acc * f + Poly.const(ctx, a.coeff(k))) % modulus
    return acc


def modcomp_brent_kung(a, f, modulus):
    """a(f) mod modulus via baby-step/giant-step."""
    ctx = a.ctx
    if a.is_zero():
        return Poly.zero(ctx)
    d = a.degree
    if d < 4:
        return modcomp_horner(a, f, modulus)
    s = int(np.ceil(np.sqrt(d + 1)))
    f = f % modulus
    dm = max(modulus.degree, 1)
    n = ctx.deg_abs
    # baby steps: f^0 .. f^(s-1) mod modulus, stored as (s, dm, N)
    baby = np.zeros((s, dm, n), dtype=np.int64)
    cur = Poly.one(ctx)
    for t in range(s):
        baby[t, : cur.cmat.shape[0]] = cur.cmat
        if t + 1 < s:
            cur = (cur * f) % modulus
    fs = (cur * f) % modulus  # f^s mod modulus
    nblocks = (d + 1 + s - 1) // s
    acc = Poly.zero(ctx)
    width = 2 * n - 1
    for j in range(nblocks - 1, -1, -1):
        rows = a.cmat[j * s : (j + 1) * s]
        nb = rows.shape[0]
        raw = np.zeros((dm, width), dtype=np.int64)
        for v in range(n):
            g = np.tensordot(rows[:, v], baby[:nb], axes=(0, 0))  # (dm, N)
            raw[:, v : v + n] += g
            raw %= ctx.p
        block = Poly(ctx, ctx.reduce_many(raw))
        acc = (acc * fs + block) % modulus
    return acc


# ---------------------------------------------------------------------------
# squarefree structure, square roots, power sums


def pth_root_poly(f):
    """p-th root of a polynomial that is a p-th power."""
    ctx = f.ctx
    p = ctx.p
    if f.is_zero():
        return f
    if f.degree % p:
        raise ValueError("degree not divisible by p")
    rows = f.cmat[::p]
    if np.any(np.delete(f.cmat, np.arange(0, f.degree + 1, p), axis=0)):
        raise ValueError("polynomial is not a p-th power")
    return Poly(ctx, rows).pth_root_coeffs()


def squarefree_decomposition(f):
    """Monic f -> dict {multiplicity: monic squarefree factor}."""
    ctx = f.ctx
    p = ctx.p
    out = {}
    if f.degree <= 0:
        return out
    df = f.derivative()
    if df.is_zero():
        inner = squarefree_decomposition(pth_root_poly(f))
        return {e * p: g for e, g in inner.items()}
    g1 = poly_gcd(f, df)
    w = f // g1
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, g1)
        z = w // y
        if z.degree > 0:
            out[i] = z.monic()
        w = y
        g1 = g1 // y
        i += 1
    if g1.degree > 0:
        for e, g in squarefree_decomposition(pth_root_poly(g1.monic())).items():
            out[e * p] = (out[e * p] * g).monic() if e * p in out else g
    return out


def radical(f):
    """Product of the distinct irreducible factors of monic f."""
    parts = squarefree_decomposition(f.monic())
    ctx = f.ctx
    return prod_list(ctx, [g for _, g in sorted(parts.items())])


def sqrt_poly(f):
    """Monic D with c * D**2 == f for the scalar c = lc(f).

    Raises NotASquare when no such D exists (the square test is applied
    to f normalised monic, so a scalar factor never blocks it).
    """
    ctx = f.ctx
    if f.is_zero():
        raise NotASquare("zero polynomial")
    if f.degree % 2:
        raise NotASquare("odd degree")
    fm = f.monic()
    if ctx.p == 2:
        if np.any(fm.cmat[1::2]):
            raise NotASquare("odd-degree coefficients present")
        root = Poly(ctx, fm.cmat[::2]).pth_root_coeffs()
        if (root * root) == fm:
            return root
        raise NotASquare("even part is not a square")
    parts = squarefree_decomposition(fm)
    if any(e % 2 for e in parts):
        raise NotASquare("odd multiplicity in squarefree decomposition")
    root = Poly.one(ctx)
    for e, g in parts.items():
        root = root * g ** (e // 2)
    root = root.monic()
    if (root * root) == fm:
        return root
    raise NotASquare("square of candidate root does not match")


def parse_poly(ctx, text):
    """Inverse of Poly.serialize for coefficients over ctx."""
    import ast

    obj = ast.literal_eval(text.strip())
    if not isinstance(obj, list):
        raise ValueError("polynomial text must be a bracketed coefficient list")
    if not obj:
        return Poly.zero(ctx)
    rows = np.stack([ctx.element(item).vec for item in obj])
    return Poly(ctx, rows)


def power_sums(f, count):
    """Newton power sums of the roots of monic f, as a (count, N) stack."""
    ctx = f.ctx
    p = ctx.p
    n = f.degree
    a = f.cmat  # a[k] = coefficient of X^k, a[n] = 1
    out = np.zeros((count, ctx.deg_abs), dtype=np.int64)
    if count == 0:
        return out
    out[0] = ctx.from_int(n)
    for k in range(1, count):
        if k <= n:
            acc = (k % p) * a[n - k] % p
        else:
            acc = ctx.zero_vec()
        upper = min(k - 1, n)
        for i in range(1, upper + 1):
            acc = (acc + ctx.mul_vec(a[n - i], out[k - i])) % p
        out[k] = (-acc) % p
    return out
