"""The candidate-scan engine: torsion height selection, abscissa tables,
interpolation variants, recognition, and honest rejection."""

import itertools

import numpy as np
import pytest

from conftest import cached_instance
from isogeny.cli import matches_ground_truth
from isogeny.curves import random_ordinary_curve, count_points, velu, x_mul
from isogeny.engine import (
    DEFAULT_VARIANT,
    VARIANTS,
    IsogenySearch,
    NoSharedTorsion,
    _abscissa_chain,
    _p_multiplication_x,
    _sqrt_poly,
    choose_k,
    fast_interpolate,
    find_isogeny,
    interpolate_classic,
    prepare,
    torsion_budget,
)
from isogeny.field import FieldElement, make_field
from isogeny.poly import Poly
from isogeny.factor import random_monic_irreducible


def all_elements(ctx):
    for tup in itertools.product(range(ctx.p), repeat=ctx.deg_abs):
        yield FieldElement(ctx, np.array(tup, dtype=np.int64))


def test_torsion_budget_counts_candidate_classes():
    assert torsion_budget(2, 6) == 16
    assert torsion_budget(3, 3) == 9
    assert torsion_budget(5, 2) == 10
    assert torsion_budget(7, 2) == 21
    assert torsion_budget(3, 3, mode="all") == 13
    with pytest.raises(ValueError):
        torsion_budget(3, 3, mode="everything")


def test_choose_k_meets_reconstruction_demand():
    for p, ell in [(2, 5), (2, 31), (2, 61), (2, 127), (3, 7), (5, 7), (7, 5)]:
        k = choose_k(p, ell)
        assert torsion_budget(p, k) >= 2 * ell - 1
        assert torsion_budget(p, k - 1) < 2 * ell - 1 or torsion_budget(p, k - 1) == 2 * ell - 1
    assert choose_k(2, 31) == 8 and torsion_budget(2, 8) == 64
    assert choose_k(2, 61) == 9 and torsion_budget(2, 9) == 128
    assert choose_k(2, 127) == 10 and torsion_budget(2, 10) == 256


def test_choose_k_bumps_exact_equality():
    # an exact-equality class count leaves the reconstruction lattice
    # two-dimensional, so the height must grow once more
    assert torsion_budget(3, 3) == 2 * 5 - 1 and choose_k(3, 5) == 4
    assert torsion_budget(7, 2) == 2 * 11 - 1 and choose_k(7, 11) == 3


@pytest.mark.parametrize("p,d", [(2, 4), (3, 2), (5, 2), (7, 1)])
def test_p_multiplication_x_map_matches_ladder(p, d):
    ctx = make_field(p, d, seed=0)
    E = random_ordinary_curve(ctx, np.random.default_rng([0x9817, p, d]))
    num, den = _p_multiplication_x(E)
    for x in all_elements(ctx):
        dv = den.eval_vec(x.vec)
        ref = x_mul(E, x, p)
        if not dv.any():
            assert ref is None
        else:
            got = FieldElement(ctx, num.eval_vec(x.vec)) / FieldElement(ctx, dv)
            assert got == ref


def test_sqrt_poly_accepts_exact_squares_and_rejects_the_rest():
    for p, d in [(2, 4), (3, 3), (5, 2)]:
        ctx = make_field(p, d, seed=0)
        rng = np.random.default_rng([0x509, p, d])
        s = random_monic_irreducible(ctx, 3, rng) * random_monic_irreducible(ctx, 2, rng)
        assert _sqrt_poly(s * s) == s
        assert _sqrt_poly(s * random_monic_irreducible(ctx, 5, rng)) is None
        assert _sqrt_poly(s) is None  # odd degree
        if p != 2:
            assert _sqrt_poly((s * s).scale(ctx.from_int(2))) is None  # not monic
        assert _sqrt_poly(Poly.zero(ctx)) is None


# -- search fixtures ---------------------------------------------------------


@pytest.fixture(scope="module")
def search_2_7_5():
    inst = cached_instance(2, 7, 5)
    return inst, prepare(inst["E"], inst["E2"], 5)


@pytest.fixture(scope="module")
def search_3_3_5():
    inst = cached_instance(3, 3, 5)
    return inst, prepare(inst["E"], inst["E2"], 5)


def test_abscissa_tables_match_the_generic_ladder(search_2_7_5):
    _inst, search = search_2_7_5
    xP2 = FieldElement(search.top, search.xs2[1])
    for i in search.reps:
        ref1 = x_mul(search.E_top, search.xP, i)
        ref2 = x_mul(search.E2_top, xP2, i)
        assert ref1 is not None and np.array_equal(ref1.vec, search.xs[i])
        assert ref2 is not None and np.array_equal(ref2.vec, search.xs2[i])


def test_abscissa_chain_helper_agrees_with_ladder(search_3_3_5):
    _inst, search = search_3_3_5
    table = _abscissa_chain(search.E_top, search.xP, 10)
    for i in range(1, 11):
        ref = x_mul(search.E_top, search.xP, i)
        assert np.array_equal(ref.vec, table[i - 1])


def test_find_recovers_the_planted_isogeny(search_2_7_5):
    inst, search = search_2_7_5
    report = search.run(DEFAULT_VARIANT)
    assert report.found is not None and report.verified
    assert matches_ground_truth(report.found, inst["E"], inst["kernel"])
    assert 1 <= report.tries <= report.budget


def test_variants_agree_and_are_deterministic(search_3_3_5):
    inst, search = search_3_3_5
    reports = {v: search.run(v) for v in VARIANTS}
    tries = {r.tries for r in reports.values()}
    maps = {r.found.serialize() for r in reports.values()}
    assert len(tries) == 1 and len(maps) == 1
    for r in reports.values():
        assert r.verified
        assert matches_ground_truth(r.found, inst["E"], inst["kernel"])
    again = search.run(DEFAULT_VARIANT)
    assert again.found.serialize() == reports[DEFAULT_VARIANT].found.serialize()
    assert again.tries == reports[DEFAULT_VARIANT].tries


def test_worker_counts_do_not_change_the_answer(search_2_7_5):
    _inst, search = search_2_7_5
    base = search.run(DEFAULT_VARIANT, workers=1)
    for w in (2, 4):
        r = search.run(DEFAULT_VARIANT, workers=w)
        assert r.found.serialize() == base.found.serialize()
        assert r.tries == base.tries
        assert r.workers == w


def test_scan_all_accepts_exactly_the_ground_truth_class(search_2_7_5):
    inst, search = search_2_7_5
    report = search.run(DEFAULT_VARIANT, scan_all=True)
    assert report.tries == report.budget
    assert len(report.accepted) >= 1
    # the ground-truth image abscissa sits at an accepted class
    gt = velu(inst["E"], inst["kernel"], check=False)
    top = search.top
    xP = FieldElement(top, search.xs[1])
    num = gt.x_num.lift_to(top).eval_elt(xP)
    den = gt.x_den.lift_to(top).eval_elt(xP)
    t_gt = search.locate_image_class(num / den)
    assert t_gt is not None
    assert t_gt in {rep for _pos, rep, _phi in report.accepted}
    assert sum(report.reject_counts.values()) == report.budget - len(report.accepted)


def test_classic_and_fast_interpolation_coincide(search_3_3_5):
    _inst, search = search_3_3_5
    for t in search.reps[:4] + [search.M - 1]:
        assert interpolate_classic(search, t) == fast_interpolate(search, t)


def test_non_isogenous_pair_is_rejected_after_full_scan(search_3_3_5):
    inst, _search = search_3_3_5
    E = inst["E"]
    ctx = E.ctx
    n_e = count_points(E)
    rng = np.random.default_rng(0xD15C)
    for _ in range(400):
        F = random_ordinary_curve(ctx, rng)
        if count_points(F) == n_e:
            continue
        report = find_isogeny(E, F, 5)
        if report.note:
            continue  # torsion-structure mismatch; keep looking
        assert report.found is None and not report.verified
        assert report.tries == report.budget
        assert sum(report.reject_counts.values()) == report.budget
        return
    raise AssertionError("no candidate non-isogenous curve admitted a full scan")


def test_torsion_structure_mismatch_reports_cleanly(search_3_3_5):
    inst, _search = search_3_3_5
    E = inst["E"]
    ctx = E.ctx
    n_e = count_points(E)
    rng = np.random.default_rng(0x4A11)
    for _ in range(400):
        F = random_ordinary_curve(ctx, rng)
        if count_points(F) == n_e:
            continue
        report = find_isogeny(E, F, 5)
        if not report.note:
            continue
        assert report.found is None and report.tries == 0
        assert report.t_loop == 0.0
        return
    raise AssertionError("no torsion-structure mismatch sampled")


def test_input_validation(search_3_3_5):
    inst, _search = search_3_3_5
    E, E2 = inst["E"], inst["E2"]
    # the same curve parsed into a freshly built (equal but distinct) field
    # object must be refused: all table lookups assume one shared context
    from isogeny.curves import parse_curve

    other = make_field(3, 3, seed=0)
    assert other is not E.ctx
    with pytest.raises(ValueError):
        prepare(E, parse_curve(other, E2.serialize()), 5)
    with pytest.raises(ValueError):
        prepare(E, E2, 4)
    with pytest.raises(ValueError):
        prepare(E, E2, 3)
    with pytest.raises(ValueError):
        find_isogeny(E, E2, 5, variant="c2-unknown")
