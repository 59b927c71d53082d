"""Finite-field contexts with a flat internal representation.

A ``FieldCtx`` models F_p[T]/(M(T)) for a monic irreducible M of degree N:
every element is a length-N coefficient vector over F_p in the power basis
of a distinguished generator.  Contexts built as extensions of other
contexts additionally carry change-of-basis matrices between this flat
basis and the nested basis {b_i * w**j} (b_i the base's flat basis, w the
adjoined root), so a tower of extensions is presented structurally while
all arithmetic runs on flat vectors of the top field.

Multiplication packs coefficient vectors into Python integers (Kronecker
substitution) for large degrees and uses ``np.convolve`` for small ones;
both are exact.  Matrix work goes through float64 BLAS, which is exact for
these operand sizes (entries < p <= 7, dimensions < 2**11).
"""

from __future__ import annotations

import ast

import numpy as np

from ._linalg import inv_mod, left_inverse, matmul_mod, matvec_mod

DEGREE_CAP = 1 << 16

_CTX_RNG_SEED = 0xC0FFEE


def _trim(a):
    """Degree of a coefficient vector (-1 for zero)."""
    nz = np.nonzero(a)[0]
    return -1 if nz.size == 0 else int(nz[-1])


def _poly_divmod_fp(a, b, p):
    """Schoolbook division of F_p[X] coefficient vectors (ascending)."""
    a = a.copy() % p
    db = _trim(b)
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(int(b[db]), p - 2, p)
    da = _trim(a)
    q = np.zeros(max(da - db + 1, 1), dtype=np.int64)
    while da >= db:
        c = a[da] * inv_lead % p
        q[da - db] = c
        a[da - db : da + 1] = (a[da - db : da + 1] - c * b[: db + 1]) % p
        da = _trim(a)
    return q, a


def _poly_xgcd_fp(a, b, p):
    """Extended GCD in F_p[X]: returns (g, s, t) with s*a + t*b = g."""
    r0, r1 = a.copy() % p, b.copy() % p
    s0 = np.array([1], dtype=np.int64)
    s1 = np.array([0], dtype=np.int64)
    t0 = np.array([0], dtype=np.int64)
    t1 = np.array([1], dtype=np.int64)

    def _sub_mul(u, q, v):
        # u - q*v with ascending coefficient vectors
        prod = np.convolve(q, v) % p
        n = max(len(u), len(prod))
        out = np.zeros(n, dtype=np.int64)
        out[: len(u)] = u
        out[: len(prod)] = (out[: len(prod)] - prod) % p
        return out

    while _trim(r1) >= 0:
        q, r = _poly_divmod_fp(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _sub_mul(s0, q, s1)
        t0, t1 = t1, _sub_mul(t0, q, t1)
    return r0, s0, t0


def _poly_mulmod_fp(a, b, mod, p):
    c = np.convolve(a, b) % p
    _, r = _poly_divmod_fp(c, mod, p)
    out = np.zeros(len(mod) - 1, dtype=np.int64)
    out[: len(r)] = r[: len(mod) - 1]
    return out


def _is_irreducible_fp(f, p):
    """Rabin irreducibility test for monic f in F_p[X], small degree."""
    d = _trim(f)
    if d <= 0:
        return False
    if d == 1:
        return True
    x = np.array([0, 1], dtype=np.int64)

    def frob_pow(v, times):
        # v**(p**times) mod f, via repeated p-th powers
        for _ in range(times):
            acc = np.array([1], dtype=np.int64)
            for bit in bin(p)[2:]:
                acc = _poly_mulmod_fp(acc, acc, f, p)
                if bit == "1":
                    acc = _poly_mulmod_fp(acc, v, f, p)
            v = acc
        return v

    xq = frob_pow(x.copy(), d)
    diff = xq.copy()
    diff[1] = (diff[1] - 1) % p
    if _trim(diff) >= 0:
        return False
    for r in {q for q in range(2, d + 1) if d % q == 0 and _is_prime(q)}:
        xe = frob_pow(x.copy(), d // r)
        diff = xe.copy()
        diff[1] = (diff[1] - 1) % p
        g, _, _ = _poly_xgcd_fp(f, diff, p)
        if _trim(g) != 0:
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


class FieldCtx:
    """Arithmetic context for F_p[T]/(M(T)).

    Do not call directly; use ``make_field``, ``FieldCtx.prime`` or
    ``ctx.extend``.
    """

    def __init__(self):
        self.p = None
        self.base = None  # FieldCtx below in the construction chain
        self.rel_rows = None  # (m+1, n_base) coefficients of w's min poly
        self.deg_rel = None
        self.deg_abs = None
        self.flat_mod = None  # (N+1,) monic minimal polynomial of T
        self.to_nested = None  # flat coords -> nested coords
        self.from_nested = None
        self.emb_base_mat = None  # (N, n_base): base flat -> our flat
        self.gen_flat = None  # flat coords of the adjoined root w
        self.name = None
        self._redmat = None  # (N, N-1): columns are X**(N+j) mod M
        self._limb = None  # Kronecker limb width in bytes
        self._frob = None
        self._frob_inv = None
        self._sigma = {}
        self._trace_vec = None
        self._emb_edges = []  # registered (dst_ctx, matrix) pairs
        self._emb_cache = {}
        self._sec_cache = {}

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def prime(cls, p):
        ctx = cls()
        ctx.p = p
        ctx.deg_rel = 1
        ctx.deg_abs = 1
        ctx.flat_mod = np.array([0, 1], dtype=np.int64)
        ctx.to_nested = np.eye(1, dtype=np.int64)
        ctx.from_nested = np.eye(1, dtype=np.int64)
        ctx.name = "F_%d" % p
        ctx._finish()
        return ctx

    def extend(self, rel_rows, name=None):
        """Adjoin a root w of the monic polynomial with the given base
        coefficients (rows ascending, each a base flat vector).  The
        polynomial must be irreducible over this field."""
        p = self.p
        rel_rows = np.asarray(rel_rows, dtype=np.int64) % p
        m = rel_rows.shape[0] - 1
        n = self.deg_abs
        if rel_rows.shape[1] != n:
            raise ValueError("relative modulus rows must have base degree")
        if m < 2:
            raise ValueError("extension degree must be at least 2")
        if not np.array_equal(rel_rows[m], self.one_vec()):
            raise ValueError("relative modulus must be monic")
        big_n = m * n
        if big_n > DEGREE_CAP:
            raise ValueError("absolute degree %d exceeds cap" % big_n)

        neg_c = (-rel_rows[:m]) % p  # (m, n)

        def mul_by_t(x, shift):
            # x: (m, n) nested blocks; returns (w + shift) * x
            y = np.zeros_like(x)
            y[1:] = x[:-1]
            top = np.broadcast_to(x[m - 1], (m, n))
            y = (y + self.mul_many(neg_c, top)) % p
            if shift is not None:
                sh = np.broadcast_to(shift, (m, n))
                y = (y + self.mul_many(sh, x)) % p
            return y

        candidates = [None]
        pool = []
        if n > 1:
            gen = np.zeros(n, dtype=np.int64)
            gen[1] = 1
            pool.append(gen)
        if self.deg_abs == 1 or p ** n <= 64:
            for val in range(1, p ** min(n, 7)):
                vec = np.zeros(n, dtype=np.int64)
                k = 0
                while val:
                    vec[k] = val % p
                    val //= p
                    k += 1
                pool.append(vec)
        rng = np.random.default_rng(_CTX_RNG_SEED)
        candidates.extend(pool)

        def gen_random():
            while True:
                yield rng.integers(0, p, size=n).astype(np.int64)

        rand_iter = gen_random()
        tried = 0
        pow_mat = None
        shift_used = None
        while tried < 200:
            shift = candidates[tried] if tried < len(candidates) else next(rand_iter)
            tried += 1
            cols = np.zeros((big_n, big_n), dtype=np.int64)
            cur = np.zeros((m, n), dtype=np.int64)
            cur[0, 0] = 1
            cols[:, 0] = cur.reshape(-1)
            ok = True
            last = cur
            for k in range(1, big_n):
                last = mul_by_t(last, shift)
                cols[:, k] = last.reshape(-1)
            try:
                inv = inv_mod(cols, p)
            except Exception:
                ok = False
            if ok:
                pow_mat = cols
                pow_inv = inv
                shift_used = shift
                top_next = mul_by_t(last, shift).reshape(-1)
                break
        if pow_mat is None:
            raise RuntimeError("no primitive element found for extension")

        ctx = FieldCtx()
        ctx.p = p
        ctx.base = self
        ctx.rel_rows = rel_rows
        ctx.deg_rel = m
        ctx.deg_abs = big_n
        ctx.to_nested = pow_mat
        ctx.from_nested = pow_inv
        ctx.emb_base_mat = pow_inv[:, :n].copy()
        # nested coords of w are e_n; of t = w + shift likewise shifted
        ctx.gen_flat = pow_inv[:, n].copy()
        t_top = matvec_mod(pow_inv, top_next, p)  # t**N in flat coords
        mod = np.zeros(big_n + 1, dtype=np.int64)
        mod[:big_n] = (-t_top) % p
        mod[big_n] = 1
        ctx.flat_mod = mod
        ctx.name = name or "%s[deg %d]" % (self.name, m)
        ctx._shift_used = shift_used
        ctx._finish()
        return ctx

    def _finish(self):
        p, n = self.p, self.deg_abs
        # Kronecker limb width: product coefficients are < N * (p-1)**2
        bound = n * (p - 1) * (p - 1)
        self._limb = 2 if bound < (1 << 16) else 4
        if bound >= (1 << 32):
            raise ValueError("degree too large for packed multiplication")
        # reduction matrix: columns are X**(N+j) mod M for j < N-1
        if n > 1:
            red = np.zeros((n, n - 1), dtype=np.int64)
            cur = (-self.flat_mod[:n]) % p
            red[:, 0] = cur
            for j in range(1, n - 1):
                nxt = np.zeros(n, dtype=np.int64)
                nxt[1:] = cur[:-1]
                nxt = (nxt + cur[n - 1] * red[:, 0]) % p
                red[:, j] = nxt
                cur = nxt
            self._redmat = red
        else:
            self._redmat = np.zeros((1, 0), dtype=np.int64)

    # ------------------------------------------------------------------
    # basic vectors

    def zero_vec(self):
        return np.zeros(self.deg_abs, dtype=np.int64)

    def one_vec(self):
        v = np.zeros(self.deg_abs, dtype=np.int64)
        v[0] = 1
        return v

    def from_int(self, k):
        v = np.zeros(self.deg_abs, dtype=np.int64)
        v[0] = k % self.p
        return v

    def gen_vec(self):
        """Flat coordinates of the presentation generator (the adjoined
        root for extensions, T itself for fields made from a modulus)."""
        if self.base is None:
            return self.one_vec()
        return self.gen_flat.copy()

    def random_vec(self, rng):
        return np.asarray(rng.integers(0, self.p, size=self.deg_abs), dtype=np.int64)

    # ------------------------------------------------------------------
    # arithmetic on flat vectors

    def add_vec(self, a, b):
        return (a + b) % self.p

    def sub_vec(self, a, b):
        return (a - b) % self.p

    def neg_vec(self, a):
        return (-a) % self.p

    def _kron_mul(self, a, b):
        lb = self._limb
        dt = "<u2" if lb == 2 else "<u4"
        n = self.deg_abs
        ia = int.from_bytes(a.astype(dt).tobytes(), "little")
        ib = int.from_bytes(b.astype(dt).tobytes(), "little")
        raw = (ia * ib).to_bytes(lb * (2 * n - 1) + 8, "little")
        conv = np.frombuffer(raw[: lb * (2 * n - 1)], dtype=dt).astype(np.int64)
        return conv

    def mul_vec(self, a, b):
        n = self.deg_abs
        if n == 1:
            return a * b % self.p
        if n >= 32:
            conv = self._kron_mul(a, b)
        else:
            conv = np.convolve(a, b)
        return self.reduce_conv(conv)

    def reduce_conv(self, conv):
        """Reduce a raw convolution (length <= 2N-1) mod the flat modulus."""
        n = self.deg_abs
        if len(conv) <= n:
            out = np.zeros(n, dtype=np.int64)
            out[: len(conv)] = conv % self.p
            return out
        lo = conv[:n]
        hi = conv[n:]
        return (lo + matvec_mod(self._redmat[:, : len(hi)], hi, self.p)) % self.p

    def mul_many(self, amat, bmat):
        """Row-wise products of two (k, N) stacks of flat vectors."""
        n = self.deg_abs
        p = self.p
        amat = np.asarray(amat, dtype=np.int64)
        bmat = np.asarray(bmat, dtype=np.int64)
        if n == 1:
            return amat * bmat % p
        k = amat.shape[0]
        if k == 0:
            return np.zeros((0, n), dtype=np.int64)
        conv = self.conv_many(amat, bmat)
        return self.reduce_many(conv)

    def conv_many(self, amat, bmat):
        """Row-wise raw convolutions, (k, N) x (k, N) -> (k, 2N-1)."""
        n = self.deg_abs
        k = amat.shape[0]
        out = np.empty((k, 2 * n - 1), dtype=np.int64)
        if n >= 32:
            for i in range(k):
                out[i] = self._kron_mul(amat[i], bmat[i])
        else:
            for i in range(k):
                out[i] = np.convolve(amat[i], bmat[i])
        return out

    def reduce_many(self, conv):
        """Reduce a (k, L) stack of raw convolutions mod the flat modulus."""
        n = self.deg_abs
        p = self.p
        if conv.shape[1] <= n:
            out = np.zeros((conv.shape[0], n), dtype=np.int64)
            out[:, : conv.shape[1]] = conv % p
            return out
        lo = conv[:, :n]
        hi = conv[:, n:]
        red = self._redmat[:, : hi.shape[1]]
        return (lo + matmul_mod(hi, red.T, p)) % p

    def inv_vec(self, a):
        p = self.p
        if self.deg_abs == 1:
            v = int(a[0]) % p
            if v == 0:
                raise ZeroDivisionError("inversion of zero")
            return np.array([pow(v, p - 2, p)], dtype=np.int64)
        g, _, t = _poly_xgcd_fp(self.flat_mod, a % p, p)
        if _trim(g) != 0:
            raise ZeroDivisionError("inversion of zero (or modulus not prime)")
        scale = pow(int(g[0]), p - 2, p)
        out = np.zeros(self.deg_abs, dtype=np.int64)
        tt = (t * scale) % p
        out[: min(len(tt), self.deg_abs)] = tt[: self.deg_abs]
        return out

    def pow_vec(self, a, e):
        if e < 0:
            return self.pow_vec(self.inv_vec(a), -e)
        acc = self.one_vec()
        base = a % self.p
        while e:
            if e & 1:
                acc = self.mul_vec(acc, base)
            base = self.mul_vec(base, base)
            e >>= 1
        return acc

    def is_zero(self, a):
        return not np.any(a % self.p)

    # ------------------------------------------------------------------
    # Frobenius, traces

    def frob_mat(self):
        """Matrix of x -> x**p on flat coordinates."""
        if self._frob is None:
            n = self.deg_abs
            if n == 1:
                self._frob = np.eye(1, dtype=np.int64)
            else:
                g = self.pow_vec(self._x_vec(), self.p)
                cols = np.zeros((n, n), dtype=np.int64)
                cur = self.one_vec()
                cols[:, 0] = cur
                for k in range(1, n):
                    cur = self.mul_vec(cur, g)
                    cols[:, k] = cur
                self._frob = cols
        return self._frob

    def frob_inv_mat(self):
        if self._frob_inv is None:
            if self.deg_abs == 1:
                self._frob_inv = np.eye(1, dtype=np.int64)
            else:
                self._frob_inv = self.sigma_mat(self.deg_abs - 1)
        return self._frob_inv

    def _x_vec(self):
        v = np.zeros(self.deg_abs, dtype=np.int64)
        v[1] = 1
        return v

    def sigma_mat(self, e):
        """Matrix of x -> x**(p**e) on flat coordinates."""
        n = self.deg_abs
        e %= n
        if e == 0:
            return np.eye(n, dtype=np.int64)
        if e not in self._sigma:
            if e == 1:
                self._sigma[1] = self.frob_mat()
            else:
                frob = self.frob_mat()
                v = self._x_vec()
                for _ in range(e):
                    v = matvec_mod(frob, v, self.p)
                cols = np.zeros((n, n), dtype=np.int64)
                cur = self.one_vec()
                cols[:, 0] = cur
                for k in range(1, n):
                    cur = self.mul_vec(cur, v)
                    cols[:, k] = cur
                self._sigma[e] = cols
        return self._sigma[e]

    def apply_sigma(self, a, e):
        return matvec_mod(self.sigma_mat(e), a, self.p)

    def trace_vec(self):
        """Vector of absolute traces of the flat basis powers T**k."""
        if self._trace_vec is None:
            n, p = self.deg_abs, self.p
            c = self.flat_mod
            ps = np.zeros(n, dtype=np.int64)
            ps[0] = n % p
            for k in range(1, n):
                acc = k * c[n - k] % p
                for i in range(1, k):
                    acc = (acc + c[n - i] * ps[k - i]) % p
                ps[k] = (-acc) % p
            self._trace_vec = ps
        return self._trace_vec

    def trace_to_prime(self, a):
        """Absolute trace down to F_p, as a Python int."""
        return int(np.dot(self.trace_vec(), a % self.p) % self.p)

    def trace_to(self, sub, a):
        """Relative trace to a subfield context, returned in that context."""
        n_sub = sub.deg_abs
        if self.deg_abs % n_sub:
            raise ValueError("not a subfield by degree")
        steps = self.deg_abs // n_sub
        acc = a % self.p
        cur = a % self.p
        for _ in range(steps - 1):
            cur = self.apply_sigma(cur, n_sub)
            acc = (acc + cur) % self.p
        return self.down_cast(acc, sub)

    # ------------------------------------------------------------------
    # embeddings between contexts

    def base_chain(self):
        out = [self]
        cur = self
        while cur.base is not None:
            cur = cur.base
            out.append(cur)
        return out

    def register_embedding(self, dst, mat):
        """Record an F_p-linear field embedding self -> dst (flat coords)."""
        mat = np.asarray(mat, dtype=np.int64) % self.p
        self._emb_edges.append((dst, mat))
        self._emb_cache[id(dst)] = mat

    def embedding_to(self, dst, _active=None):
        """(N_dst, N_src) matrix of a field embedding self -> dst.

        Resolved along construction ancestry (self in dst's base chain)
        composed with explicitly registered embeddings.
        """
        if dst is self:
            return np.eye(self.deg_abs, dtype=np.int64)
        key = id(dst)
        if key in self._emb_cache:
            return self._emb_cache[key]
        chain = dst.base_chain()
        if self in chain:
            mat = np.eye(self.deg_abs, dtype=np.int64)
            idx = chain.index(self)
            for node in reversed(chain[:idx]):
                mat = matmul_mod(node.emb_base_mat, mat, self.p)
            self._emb_cache[key] = mat
            return mat
        if _active is None:
            _active = set()
        pair = (id(self), id(dst))
        if pair in _active:
            raise KeyError("embedding cycle at %s -> %s" % (self.name, dst.name))
        _active.add(pair)
        for mid, edge in self._emb_edges:
            try:
                upper = mid.embedding_to(dst, _active)
            except KeyError:
                continue
            mat = matmul_mod(upper, edge, self.p)
            self._emb_cache[key] = mat
            return mat
        raise KeyError("no embedding from %s to %s" % (self.name, dst.name))

    def lift_from(self, sub, a):
        """Image in this context of a flat vector over a subfield context."""
        if sub is self:
            return a % self.p
        return matvec_mod(sub.embedding_to(self), a, self.p)

    def lift_many_from(self, sub, amat):
        if sub is self:
            return amat % self.p
        emb = sub.embedding_to(self)
        return matmul_mod(amat, emb.T, self.p)

    def project_to_base(self, a):
        """Express an element in the construction base; raises ValueError
        if it does not lie there."""
        n = self.base.deg_abs
        nested = matvec_mod(self.to_nested, a, self.p)
        if np.any(nested[n:]):
            bad = int(np.nonzero(nested[n:])[0][0]) + n
            raise ValueError("element not in base field (nested coord %d)" % bad)
        return nested[:n]

    def project_many_to_base(self, amat):
        n = self.base.deg_abs
        nested = matmul_mod(amat, self.to_nested.T, self.p)
        if np.any(nested[:, n:]):
            row = int(np.nonzero(np.any(nested[:, n:], axis=1))[0][0])
            raise ValueError("row %d not in base field" % row)
        return nested[:, :n]

    def down_cast(self, a, dst):
        """Express an element of this context in a smaller context."""
        if dst is self:
            return a % self.p
        chain = self.base_chain()
        if dst in chain:
            cur = self
            vec = a
            while cur is not dst:
                vec = cur.project_to_base(vec)
                cur = cur.base
            return vec
        key = id(dst)
        if key not in self._sec_cache:
            emb = dst.embedding_to(self)
            self._sec_cache[key] = left_inverse(emb, self.p)
        sec = self._sec_cache[key]
        vec = matvec_mod(sec, a, self.p)
        back = matvec_mod(dst.embedding_to(self), vec, self.p)
        if not np.array_equal(back, a % self.p):
            raise ValueError("element does not lie in target subfield")
        return vec

    def down_cast_many(self, amat, dst):
        if dst is self:
            return amat % self.p
        chain = self.base_chain()
        if dst in chain:
            cur = self
            mat = amat
            while cur is not dst:
                mat = cur.project_many_to_base(mat)
                cur = cur.base
            return mat
        return np.stack([self.down_cast(row, dst) for row in amat])

    # ------------------------------------------------------------------
    # serialization

    def serialize_vec(self, a):
        if self.base is None:
            return str(int(a[0]) % self.p)
        nested = matvec_mod(self.to_nested, a, self.p)
        n = self.base.deg_abs
        parts = [
            self.base.serialize_vec(nested[j * n : (j + 1) * n])
            for j in range(self.deg_rel)
        ]
        return "[" + ",".join(parts) + "]"

    def parse_vec(self, text):
        obj = ast.literal_eval(text) if isinstance(text, str) else text
        return self._from_obj(obj)

    def _from_obj(self, obj):
        if isinstance(obj, int):
            return self.from_int(obj)
        if self.base is None:
            raise ValueError("nested literal for a prime-field element")
        if len(obj) > self.deg_rel:
            raise ValueError("element literal too long for field")
        n = self.base.deg_abs
        nested = np.zeros(self.deg_abs, dtype=np.int64)
        for j, sub in enumerate(obj):
            nested[j * n : (j + 1) * n] = self.base._from_obj(sub)
        return matvec_mod(self.from_nested, nested, self.p)

    # ------------------------------------------------------------------

    def element(self, value):
        if isinstance(value, FieldElement):
            if value.ctx is self:
                return value
            return FieldElement(self, self.lift_from(value.ctx, value.vec))
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, self.from_int(int(value)))
        if isinstance(value, str) or isinstance(value, list):
            return FieldElement(self, self.parse_vec(value))
        vec = np.asarray(value, dtype=np.int64) % self.p
        if vec.shape != (self.deg_abs,):
            raise ValueError("bad coefficient vector length")
        return FieldElement(self, vec)

    def zero(self):
        return FieldElement(self, self.zero_vec())

    def one(self):
        return FieldElement(self, self.one_vec())

    def gen(self):
        return FieldElement(self, self.gen_vec())

    def random_element(self, rng):
        return FieldElement(self, self.random_vec(rng))

    @property
    def order(self):
        return self.p ** self.deg_abs

    def __repr__(self):
        return "<FieldCtx %s (p=%d, deg %d)>" % (self.name, self.p, self.deg_abs)


class FieldElement:
    """Element of a ``FieldCtx`` (wraps a flat vector; treat as immutable)."""

    __slots__ = ("ctx", "vec", "_hash")

    def __init__(self, ctx, vec):
        self.ctx = ctx
        self.vec = np.asarray(vec, dtype=np.int64)
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is self.ctx:
                return other.vec
            raise ValueError(
                "mixed contexts: %s vs %s" % (self.ctx.name, other.ctx.name)
            )
        if isinstance(other, (int, np.integer)):
            return self.ctx.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.add_vec(self.vec, ov))

    __radd__ = __add__

    def __sub__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub_vec(self.vec, ov))

    def __rsub__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub_vec(ov, self.vec))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg_vec(self.vec))

    def __mul__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul_vec(self.vec, ov))

    __rmul__ = __mul__

    def __truediv__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul_vec(self.vec, self.ctx.inv_vec(ov)))

    def __rtruediv__(self, other):
        ov = self._coerce(other)
        if ov is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul_vec(ov, self.ctx.inv_vec(self.vec)))

    def __pow__(self, e):
        return FieldElement(self.ctx, self.ctx.pow_vec(self.vec, int(e)))

    def inverse(self):
        return FieldElement(self.ctx, self.ctx.inv_vec(self.vec))

    def frobenius(self, e=1):
        return FieldElement(self.ctx, self.ctx.apply_sigma(self.vec, e))

    def pth_root(self):
        return FieldElement(
            self.ctx, matvec_mod(self.ctx.frob_inv_mat(), self.vec, self.ctx.p)
        )

    def trace_to_prime(self):
        return self.ctx.trace_to_prime(self.vec)

    def is_zero(self):
        return self.ctx.is_zero(self.vec)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx:
                return False
            return np.array_equal(self.vec, other.vec)
        if isinstance(other, (int, np.integer)):
            return np.array_equal(self.vec, self.ctx.from_int(int(other)))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.ctx), self.vec.tobytes()))
        return self._hash

    def serialize(self):
        return self.ctx.serialize_vec(self.vec)

    def __repr__(self):
        return self.serialize()


def _sample_irreducible_fp(p, degree, seed):
    """Deterministically sample a monic irreducible of the given degree."""
    rng = np.random.default_rng([0x15060, p, degree, seed])
    while True:
        coeffs = np.zeros(degree + 1, dtype=np.int64)
        coeffs[degree] = 1
        coeffs[:degree] = rng.integers(0, p, size=degree)
        if _is_irreducible_fp(coeffs, p):
            return coeffs


def make_field(p, degree=None, seed=0, modulus=None, name=None):
    """Build F_q with q = p^degree.

    The defining modulus is a monic irreducible sampled deterministically
    from (p, degree, seed); pass ``modulus`` (ascending integer
    coefficients) to pin it explicitly instead.  degree None or 1 gives
    the prime field.
    """
    prime = FieldCtx.prime(p)
    if modulus is None:
        if degree is None or degree == 1:
            return prime
        if degree <= 0:
            raise ValueError("degree must be positive")
        coeffs = _sample_irreducible_fp(p, int(degree), seed)
    else:
        coeffs = np.asarray(modulus, dtype=np.int64) % p
        d = _trim(coeffs)
        if d <= 0:
            raise ValueError("modulus must have positive degree")
        if int(coeffs[d]) != 1:
            raise ValueError("modulus must be monic")
        coeffs = coeffs[: d + 1]
        if degree is not None and degree != d:
            raise ValueError("modulus degree does not match requested degree")
        if d == 1:
            return prime
        if not _is_irreducible_fp(coeffs, p):
            raise ValueError("modulus is not irreducible mod %d" % p)
    d = len(coeffs) - 1
    rows = coeffs.reshape(-1, 1)
    ctx = prime.extend(rows, name=name or "F_%d^%d" % (p, d))
    return ctx


def frobenius_power(x, e):
    """e-fold p-power Frobenius of a field element (e may be negative)."""
    return x.frobenius(e)


def absolute_trace(x, down_to=None):
    """Trace of x down to F_p (default) or to a registered subfield."""
    if down_to is None or down_to.deg_abs == 1:
        t = x.trace_to_prime()
        prime = FieldCtx.prime(x.ctx.p)
        return prime.from_int(t) if down_to is not None else t
    return down_to.element(x.ctx.trace_to(down_to, x.vec))


def nth_root(x, n):
    """An n-th root of x, extending the field minimally when needed.

    Returns (root, ctx) where ctx is x's field when the root already
    lives there and a minimal extension otherwise.  The p-part of n is
    handled by inverse Frobenius (exact in a perfect field); the rest by
    picking the canonical smallest-degree factor of Y^n - x.
    """
    if n <= 0:
        raise ValueError("root index must be positive")
    ctx = x.ctx
    p = ctx.p
    while n % p == 0:
        x = x.pth_root()
        n //= p
    if n == 1:
        return x, ctx
    from . import factor as _factor

    ctx2, root = _factor.min_degree_root_field(x, n)
    return root, ctx2


def embed(x, target):
    """Image of x in the field ``target``.

    Uses the registered/ancestry embedding when available; otherwise finds
    one by mapping the generator of x's field to the canonical root of its
    minimal polynomial over ``target`` and registers it for reuse.
    """
    ctx = x.ctx
    if ctx is target:
        return x
    if ctx.p != target.p:
        raise ValueError("cannot embed between different characteristics")
    try:
        mat = ctx.embedding_to(target)
        return target.element(mat @ x.vec % ctx.p)
    except KeyError:
        pass
    if target.deg_abs % ctx.deg_abs != 0:
        raise ValueError(
            "no embedding of degree %d into degree %d" % (ctx.deg_abs, target.deg_abs)
        )
    from . import factor as _factor
    from .poly import Poly

    if ctx.deg_abs == 1:
        mat = np.zeros((target.deg_abs, 1), dtype=np.int64)
        mat[0, 0] = 1
    else:
        minpoly = Poly(
            target,
            np.array([[c] + [0] * (target.deg_abs - 1) for c in ctx.flat_mod], dtype=np.int64),
        )
        cands = _factor.roots(minpoly)
        if not cands:
            raise ValueError("defining polynomial has no root in target field")
        root = np.asarray(cands[0], dtype=np.int64)
        n = ctx.deg_abs
        mat = np.zeros((target.deg_abs, n), dtype=np.int64)
        acc = target.one_vec()
        for k in range(n):
            mat[:, k] = acc
            acc = target.mul_vec(acc, root)
    ctx.register_embedding(target, mat)
    return target.element(mat @ x.vec % ctx.p)
