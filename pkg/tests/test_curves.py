"""Curve arithmetic, point counting, torsion polynomials, and isogeny
construction, checked against brute-force oracles on small fields."""

import itertools

import numpy as np
import pytest

from isogeny.curves import (
    Curve,
    NoRationalKernel,
    NotIsomorphic,
    count_points,
    count_points_ext,
    division_polynomial,
    extension_ctx,
    find_isomorphism,
    frobenius_eigenvalues_mod,
    hasse_invariant,
    is_ordinary,
    kernel_from_point,
    p_torsion_polynomial,
    parse_curve,
    random_ordinary_curve,
    trace_of_frobenius,
    twist_point,
    twist_to_hasse_one,
    untwist_abscissa,
    untwist_point,
    velu,
    x_mul,
)
from isogeny.field import FieldElement, make_field
from isogeny.poly import parse_poly
from isogeny.tower import build_base


def all_elements(ctx):
    for tup in itertools.product(range(ctx.p), repeat=ctx.deg_abs):
        yield FieldElement(ctx, np.array(tup, dtype=np.int64))


def sample_curve(p, d, tag=0):
    ctx = make_field(p, d, seed=0)
    rng = np.random.default_rng([0xC0CE, p, d, tag])
    return random_ordinary_curve(ctx, rng), rng


@pytest.mark.parametrize("p,d", [(2, 4), (3, 2), (5, 2), (7, 1)])
def test_group_laws(p, d):
    E, rng = sample_curve(p, d)
    pts = [E.random_point(rng) for _ in range(4)]
    for P in pts:
        assert E.on_curve(P)
        assert E.add(P, None) == P and E.add(None, P) == P
        assert E.add(P, E.neg(P)) is None
    for P, Q in itertools.combinations(pts, 2):
        assert E.add(P, Q) == E.add(Q, P)
        assert E.on_curve(E.add(P, Q))
    P, Q, R = pts[:3]
    assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))


@pytest.mark.parametrize("p,d", [(2, 4), (3, 3), (5, 2)])
def test_scalar_multiplication_matches_repeated_addition(p, d):
    E, rng = sample_curve(p, d)
    P = E.random_point(rng)
    acc = None
    for n in range(0, 13):
        assert E.mul(n, P) == acc
        assert E.mul(-n, P) == E.neg(acc)
        acc = E.add(acc, P)


@pytest.mark.parametrize("p,d", [(2, 4), (3, 3), (5, 2), (7, 2)])
def test_x_only_ladder_matches_full_multiplication(p, d):
    E, rng = sample_curve(p, d)
    for _ in range(3):
        P = E.random_point(rng)
        for n in range(1, 14):
            Q = E.mul(n, P)
            got = x_mul(E, P[0], n)
            if Q is None:
                assert got is None
            else:
                assert got == Q[0]
    assert x_mul(E, P[0], 0) is None


@pytest.mark.parametrize("p,d", [(2, 3), (2, 4), (3, 2), (5, 2)])
def test_count_points_matches_naive_pair_enumeration(p, d):
    E, _ = sample_curve(p, d)
    total = 1  # the point at infinity
    for x in all_elements(E.ctx):
        for y in all_elements(E.ctx):
            if E.on_curve((x, y)):
                total += 1
    assert count_points(E) == total


@pytest.mark.parametrize("p,d", [(2, 3), (3, 2), (5, 1), (7, 1)])
def test_trace_satisfies_hasse_bound_and_extension_counts(p, d):
    E, _ = sample_curve(p, d)
    q = E.ctx.order
    t = trace_of_frobenius(E)
    assert t * t <= 4 * q
    assert t % p != 0  # ordinary curves have unit trace
    m = 2 if q**2 <= 4096 else 1
    big = extension_ctx(E.ctx, m)
    assert count_points_ext(E, m) == count_points(E.lift_to(big))


def test_ordinarity_detection_and_supersingular_rejection():
    ctx5 = make_field(5, 1, seed=0)
    ss = Curve(ctx5, ctx5.zero(), ctx5.one())  # j = 0 is supersingular mod 5
    assert hasse_invariant(ss).is_zero()
    assert not is_ordinary(ss)
    with pytest.raises(ValueError):
        p_torsion_polynomial(ss)
    ctx3 = make_field(3, 2, seed=0)
    with pytest.raises(ValueError):
        Curve(ctx3, ctx3.zero(), ctx3.one())  # a = 0 is supersingular mod 3
    E, _ = sample_curve(5, 2)
    assert is_ordinary(E)


@pytest.mark.parametrize("p,d,n", [(5, 2, 3), (7, 1, 3), (7, 1, 5), (3, 3, 7), (5, 2, 7)])
def test_division_polynomial_cuts_out_exact_torsion_abscissae(p, d, n):
    E, _ = sample_curve(p, d)
    psi = division_polynomial(E, n)
    for x in all_elements(E.ctx):
        is_root = not psi.eval_vec(x.vec).any()
        killed = x_mul(E, x, n) is None
        assert is_root == killed


@pytest.mark.parametrize("p,d", [(3, 3), (5, 2), (7, 2)])
def test_p_torsion_polynomial_degree_and_kill_property(p, d):
    E, _ = sample_curve(p, d)
    h = p_torsion_polynomial(E)
    assert h.is_monic() and h.degree == (p - 1) // 2
    for x in all_elements(E.ctx):
        if not h.eval_vec(x.vec).any():
            assert x_mul(E, x, p) is None


@pytest.mark.parametrize("p,d", [(3, 3), (5, 2), (7, 2)])
def test_hasse_normalising_twist_and_untwist(p, d):
    E, rng = sample_curve(p, d)
    tower, c, _r = build_base(E.ctx, hasse_invariant(E))
    u1 = tower.levels[0].ctx
    Et = twist_to_hasse_one(E, c, u1)
    assert hasse_invariant(Et) == u1.one()
    El = E.lift_to(u1)
    P = El.random_point(rng)
    Pt = twist_point(P, c)
    assert Et.on_curve(Pt)
    assert untwist_point(Pt, c) == P
    assert untwist_abscissa(Pt[0], c) == P[0]


def _instance(p, d, ell, tag=0):
    """A curve plus a rational ell-kernel on it, resampling as needed."""
    ctx = make_field(p, d, seed=0)
    rng = np.random.default_rng([0x1507, p, d, ell, tag])
    for _ in range(64):
        E = random_ordinary_curve(ctx, rng)
        try:
            kernel, S, lam = kernel_from_point(E, ell, seed=tag)
        except NoRationalKernel:
            continue
        return E, kernel, S, lam
    raise AssertionError("no rational kernel found in 64 curve samples")


@pytest.mark.parametrize("p,d,ell", [(2, 4, 5), (3, 3, 5), (5, 2, 7), (7, 2, 3)])
def test_kernel_from_point_shape_and_velu_morphism(p, d, ell):
    E, kernel, S, lam = _instance(p, d, ell)
    assert kernel.ctx is E.ctx
    assert kernel.is_monic() and kernel.degree == (ell - 1) // 2
    Eb = E.lift_to(S[0].ctx)
    assert Eb.on_curve(S)
    assert Eb.mul(ell, S) is None and S is not None
    dd = E.ctx.deg_abs
    assert (S[0].frobenius(dd), S[1].frobenius(dd)) == Eb.mul(lam, S)

    phi = velu(E, kernel)
    assert phi.ell == ell
    assert phi.x_num.degree == ell and phi.x_den.degree == ell - 1
    assert phi.x_den == kernel * kernel
    assert phi.check_morphism(np.random.default_rng([0xFA11, p, d, ell]))
    # the kernel generator really dies, and translating by it changes nothing
    phib = phi.lift_to(S[0].ctx)
    assert phib.apply(S) is None
    P = Eb.random_point(np.random.default_rng(3))
    assert phib.apply(Eb.add(P, S)) == phib.apply(P)


def test_isogenous_curves_have_equal_point_counts():
    E, kernel, _S, _lam = _instance(3, 2, 5)
    phi = velu(E, kernel)
    assert count_points(phi.codomain) == count_points(E)


def test_kernel_from_point_argument_validation_and_twist_rejection():
    E, _ = sample_curve(5, 2)
    with pytest.raises(ValueError):
        kernel_from_point(E, 4)
    with pytest.raises(ValueError):
        kernel_from_point(E, 5)
    q = E.ctx.order
    t = trace_of_frobenius(E)
    ell = next(
        ell
        for ell in (3, 5, 7, 11, 13, 17, 19, 23)
        if ell != 5 and frobenius_eigenvalues_mod(t, q, ell) is None
    )
    with pytest.raises(NoRationalKernel):
        kernel_from_point(E, ell)


def test_kernel_from_point_targets_a_chosen_eigenline():
    ctx = make_field(3, 3, seed=0)
    rng = np.random.default_rng([0xE16E, 3, 3])
    ell = 5
    q = ctx.order
    while True:
        E = random_ordinary_curve(ctx, rng)
        lams = frobenius_eigenvalues_mod(trace_of_frobenius(E), q, ell)
        if lams and len(lams) == 2:
            break
    default, _, lam_default = kernel_from_point(E, ell, seed=0)
    first, _, lam_first = kernel_from_point(E, ell, seed=0, eigenvalue=lams[0])
    second, S2, lam_second = kernel_from_point(E, ell, seed=0, eigenvalue=lams[1])
    assert lam_default == lam_first == lams[0]
    assert first.serialize() == default.serialize()
    assert lam_second == lams[1]
    assert second.serialize() != default.serialize()
    # the second eigenline carries its own honest degree-ell isogeny
    assert second.is_monic() and second.degree == (ell - 1) // 2
    phi = velu(E, second)
    assert phi.check_morphism(np.random.default_rng([0xE16E, 1]))
    assert phi.lift_to(S2[0].ctx).apply(S2) is None
    bogus = next(v for v in range(1, ell) if v not in lams)
    with pytest.raises(ValueError):
        kernel_from_point(E, ell, eigenvalue=bogus)


def test_find_isomorphism_round_trips_odd_characteristic():
    for p, d in [(3, 3), (5, 2), (7, 2)]:
        E, rng = sample_curve(p, d)
        u = E.ctx.element(E.ctx.random_vec(rng))
        while u.is_zero():
            u = E.ctx.element(E.ctx.random_vec(rng))
        if p == 3:
            E2 = Curve(E.ctx, E.a * u**2, E.b * u**6)
        else:
            E2 = Curve(E.ctx, E.a * u**4, E.b * u**6)
        iso = find_isomorphism(E, E2)
        P = E.random_point(rng)
        Q = iso.apply(P)
        assert E2.on_curve(Q)
        assert iso.apply(E.add(P, P)) == E2.add(Q, Q)


def test_find_isomorphism_binary_translation():
    E, rng = sample_curve(2, 4)
    s = E.ctx.element(E.ctx.random_vec(rng))
    E2 = Curve(E.ctx, E.a + s * s + s, E.b)
    iso = find_isomorphism(E, E2)
    P = E.random_point(rng)
    Q = iso.apply(P)
    assert E2.on_curve(Q)
    assert iso.apply(E.add(P, P)) == E2.add(Q, Q)


def test_nontrivial_twists_are_rejected():
    E, rng = sample_curve(5, 2)
    ctx = E.ctx
    half = (ctx.order - 1) // 2
    v = ctx.element(ctx.random_vec(rng))
    while v.is_zero() or v**half == ctx.one():
        v = ctx.element(ctx.random_vec(rng))
    twist = Curve(ctx, E.a * v**2, E.b * v**3)
    with pytest.raises(NotIsomorphic):
        find_isomorphism(E, twist)

    E2, _ = sample_curve(2, 4, tag=1)
    theta = E2.ctx.element(E2.ctx.random_vec(rng))
    while theta.trace_to_prime() == 0:
        theta = E2.ctx.element(E2.ctx.random_vec(rng))
    with pytest.raises(NotIsomorphic):
        find_isomorphism(E2, Curve(E2.ctx, E2.a + theta, E2.b))


def test_serialize_parse_round_trips():
    for p, d in [(2, 4), (3, 3), (5, 2)]:
        E, _ = sample_curve(p, d)
        assert parse_curve(E.ctx, E.serialize()) == E
        kernel = p_torsion_polynomial(E) if p != 2 else E.f_poly()
        assert parse_poly(E.ctx, kernel.serialize()) == kernel
    ctx = make_field(3, 2, seed=0)
    with pytest.raises(ValueError):
        parse_curve(ctx, sample_curve(5, 2)[0].serialize())
    with pytest.raises(ValueError):
        parse_curve(ctx, "3,2,a2")


def test_random_ordinary_curve_is_seeded_and_ordinary():
    ctx = make_field(3, 3, seed=0)
    E1 = random_ordinary_curve(ctx, np.random.default_rng(11))
    E2 = random_ordinary_curve(ctx, np.random.default_rng(11))
    assert E1 == E2
    assert is_ordinary(E1)
