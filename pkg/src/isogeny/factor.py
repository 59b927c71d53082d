"""Factorisation of polynomials over ``FieldCtx`` coefficients.

Distinct-degree splitting followed by Cantor-Zassenhaus equal-degree
splitting (quadratic-residue exponent for odd characteristic, absolute
trace maps in characteristic 2).  Also provides root extraction, canonical
root ordering, irreducibility tests, and adjoining roots of irreducible
polynomials to a context.
"""

from __future__ import annotations

import numpy as np

from .field import FieldElement
from .poly import Poly, poly_gcd, squarefree_decomposition


def _vec_key(vec):
    return tuple(int(c) for c in vec)


def sort_vecs(vecs):
    return sorted(vecs, key=_vec_key)


def _rng_or_default(rng):
    return rng if rng is not None else np.random.default_rng(0xD5EED)


def poly_powmod(a, e, modulus):
    """a**e mod modulus with a Python-int exponent."""
    ctx = a.ctx
    acc = Poly.one(ctx)
    base = a % modulus
    e = int(e)
    while e:
        if e & 1:
            acc = (acc * base) % modulus
        base = (base * base) % modulus
        e >>= 1
    return acc


def _xq_mod(modulus):
    """X**q mod modulus, q the order of the coefficient field."""
    ctx = modulus.ctx
    return poly_powmod(Poly.x(ctx), ctx.order, modulus)


def distinct_degree_split(f):
    """Monic squarefree f -> list of (d, product of irreducible factors
    of degree d), ascending in d."""
    ctx = f.ctx
    out = []
    rem = f.monic()
    h = Poly.x(ctx)
    d = 0
    while rem.degree > 0:
        d += 1
        if 2 * d > rem.degree:
            out.append((rem.degree, rem))
            break
        h = poly_powmod(h, ctx.order, rem)
        g = poly_gcd(h - Poly.x(ctx), rem)
        if g.degree > 0:
            out.append((d, g))
            rem = rem // g
            h = h % rem
    return out


def equal_degree_split(f, e, rng=None):
    """Split monic squarefree f whose irreducible factors all have degree
    e, returning the factors in canonical order."""
    ctx = f.ctx
    rng = _rng_or_default(rng)

    def split(g):
        if g.degree == e:
            return [g]
        while True:
            a = Poly(
                ctx,
                np.stack([ctx.random_vec(rng) for _ in range(g.degree)]),
            )
            if a.degree < 1:
                continue
            if ctx.p == 2:
                k = ctx.deg_abs * e
                b = a % g
                t = b
                for _ in range(k - 1):
                    b = (b * b) % g
                    t = t + b
                cand = poly_gcd(t, g)
            else:
                m = (ctx.order**e - 1) // 2
                b = poly_powmod(a, m, g)
                cand = poly_gcd(b - Poly.one(ctx), g)
            if 0 < cand.degree < g.degree:
                return split(cand) + split(g // cand)

    factors = split(f.monic())
    return sorted(factors, key=lambda h: (h.degree, _vec_key(h.cmat.reshape(-1))))


def factor_monic(f, rng=None):
    """Full factorisation of monic f: list of (irreducible monic, mult),
    canonically ordered."""
    out = []
    for mult, part in sorted(squarefree_decomposition(f.monic()).items()):
        for d, g in distinct_degree_split(part):
            for h in equal_degree_split(g, d, rng):
                out.append((h, mult))
    return sorted(
        out, key=lambda fm: (fm[0].degree, _vec_key(fm[0].cmat.reshape(-1)), fm[1])
    )


def roots(f, rng=None):
    """Distinct roots of f in its own coefficient field, canonical order."""
    ctx = f.ctx
    f = radical_part(f)
    lin = poly_gcd(_xq_mod(f) - Poly.x(ctx), f)
    if lin.degree == 0:
        return []
    vals = []
    for g in equal_degree_split(lin, 1, rng):
        vals.append((-g.coeff(0)) % ctx.p)
    return sort_vecs(vals)


def radical_part(f):
    from .poly import radical

    return radical(f.monic())


def is_irreducible_poly(f):
    ctx = f.ctx
    n = f.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    f = f.monic()
    x = Poly.x(ctx)

    def xq_tower(j):
        h = x
        for _ in range(j):
            h = poly_powmod(h, ctx.order, f)
        return h

    if not ((xq_tower(n) - x) % f).is_zero():
        return False
    for r in sorted({r for r in range(2, n + 1) if n % r == 0 and _is_prime(r)}):
        g = poly_gcd(xq_tower(n // r) - x, f)
        if g.degree != 0:
            return False
    return True


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def random_monic_irreducible(ctx, n, rng=None):
    rng = _rng_or_default(rng)
    while True:
        cmat = np.zeros((n + 1, ctx.deg_abs), dtype=np.int64)
        cmat[:n] = np.stack([ctx.random_vec(rng) for _ in range(n)])
        cmat[n] = ctx.one_vec()
        f = Poly(ctx, cmat)
        if is_irreducible_poly(f):
            return f


def adjoin_root(ctx, f, name=None):
    """Adjoin a root of monic irreducible f: returns (ctx2, root element).

    For deg f == 1 the root already lies in ctx and ctx2 is ctx."""
    f = f.monic()
    if f.degree == 1:
        return ctx, FieldElement(ctx, (-f.coeff(0)) % ctx.p)
    ctx2 = ctx.extend(f.cmat, name=name)
    return ctx2, FieldElement(ctx2, ctx2.gen_vec())


def min_degree_root_field(x, n, rng=None, name=None):
    """Smallest-degree field extension containing an n-th root of x
    (n coprime to p): returns (ctx2, root).  Canonical choice: the
    lexicographically least factor of minimal degree of Y**n - x."""
    ctx = x.ctx
    if n % ctx.p == 0:
        raise ValueError("n must be coprime to the characteristic")
    cmat = np.zeros((n + 1, ctx.deg_abs), dtype=np.int64)
    cmat[0] = (-x.vec) % ctx.p
    cmat[n] = ctx.one_vec()
    f = Poly(ctx, cmat)
    facs = factor_monic(f, rng)
    best = facs[0][0]
    return adjoin_root(ctx, best, name=name)


def sqrt_element(x, rng=None):
    """Square root of x in its own field, or None (odd p: may not exist;
    p = 2: always exists)."""
    ctx = x.ctx
    if ctx.p == 2:
        return x.pth_root()
    cmat = np.zeros((3, ctx.deg_abs), dtype=np.int64)
    cmat[0] = (-x.vec) % ctx.p
    cmat[2] = ctx.one_vec()
    f = Poly(ctx, cmat)
    rs = roots(f, rng)
    if not rs:
        return None
    return FieldElement(ctx, rs[0])
