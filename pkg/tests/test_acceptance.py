"""End-to-end acceptance gate.

Each test runs one numbered acceptance check and records a one-line
pass/fail verdict printed in the terminal summary.  The checks exercise
the full pipeline: instance generation, torsion towers, the candidate
scan in all variants, worker determinism, and the cost ordering of the
interpolation strategies.
"""

import functools
import itertools
import time

import numpy as np

from conftest import cached_instance, run_acceptance
from isogeny.cli import CSV_COLUMNS, main, matches_ground_truth
from isogeny.curves import random_ordinary_curve, velu, x_mul
from isogeny.engine import (
    VARIANTS,
    choose_k,
    fast_interpolate,
    interpolate_classic,
    prepare,
    torsion_budget,
)
from isogeny.field import FieldElement, make_field
from isogeny.torsion import build_torsion_generator
from isogeny.tower import TowerLevel, solve_artin_schreier

import csv as _csv

RECOVERY_GRID = (
    [(2, d, ell) for d in (7, 11) for ell in (5, 7, 13, 31)]
    + [(3, d, ell) for d in (3, 5) for ell in (5, 7, 11, 13)]
    + [(5, d, ell) for d in (2, 3) for ell in (7, 11)]
)
SEEDS_PER_POINT = 5
TIME_LIMIT = 120.0


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(_csv.DictReader(fh))


@functools.lru_cache(maxsize=None)
def cached_tower(p, d, k, tag=0):
    ctx = make_field(p, d, seed=0)
    rng = np.random.default_rng([0xACC5, p, d, tag])
    E = random_ordinary_curve(ctx, rng)
    return E, build_torsion_generator(E, k)


def _lift(z, ctx2):
    if z.ctx is ctx2:
        return z
    return ctx2.element(ctx2.lift_from(z.ctx, z.vec))


def test_acceptance_01_round_trip_recovery(tmp_path):
    def check():
        runs = 0
        slowest = 0.0
        for p, d, ell in RECOVERY_GRID:
            for seed in range(SEEDS_PER_POINT):
                inst_path = tmp_path / f"inst_{p}_{d}_{ell}_{seed}.txt"
                csv_path = tmp_path / f"run_{p}_{d}_{ell}_{seed}.csv"
                t0 = time.perf_counter()
                code = main([
                    "gen", "--p", str(p), "--d", str(d), "--ell", str(ell),
                    "--seed", str(seed), "--out", str(inst_path),
                ])
                assert code == 0, f"gen failed for p={p} d={d} ell={ell} seed={seed}"
                code = main([
                    "find", "--instance", str(inst_path),
                    "--variant", "c2-fi-mc", "--out", str(csv_path),
                ])
                dt = time.perf_counter() - t0
                assert code == 0, f"find failed for p={p} d={d} ell={ell} seed={seed}"
                assert dt < TIME_LIMIT, (
                    f"p={p} d={d} ell={ell} seed={seed} took {dt:.1f}s >= {TIME_LIMIT}s"
                )
                (row,) = _read_rows(csv_path)
                assert list(row.keys()) == CSV_COLUMNS
                assert row["found"] == "1" and row["verified"] == "1", (
                    f"x-map mismatch for p={p} d={d} ell={ell} seed={seed}"
                )
                runs += 1
                slowest = max(slowest, dt)
        assert runs == len(RECOVERY_GRID) * SEEDS_PER_POINT
        return f"{runs}/{runs} instances recovered the planted x-map; slowest run {slowest:.1f}s"

    run_acceptance("01 round-trip recovery", check)


def test_acceptance_02_candidate_budgets():
    def check():
        expect = {31: (8, 64), 61: (9, 128), 127: (10, 256)}
        for ell, (k_want, budget_want) in expect.items():
            k = choose_k(2, ell)
            assert k == k_want, f"ell={ell}: k={k} != {k_want}"
            assert torsion_budget(2, k) == budget_want
        return "p=2 budgets for ell=31/61/127 are exactly 64/128/256"

    run_acceptance("02 candidate budget arithmetic", check)


def test_acceptance_03_interpolation_oracle_equivalence():
    cases = (
        [(2, 7, 5, s) for s in range(4)]
        + [(2, 5, 5, s) for s in range(2)]
        + [(2, 7, 7, s) for s in range(3)]
        + [(3, 3, 5, s) for s in range(3)]
        + [(3, 5, 5, s) for s in range(2)]
        + [(5, 2, 3, s) for s in range(3)]
        + [(7, 2, 3, s) for s in range(2)]
        + [(7, 2, 5, s) for s in range(2)]
    )

    def check():
        compared = 0
        for p, d, ell, seed in cases:
            assert p ** choose_k(p, ell) <= 81
            inst = cached_instance(p, d, ell, seed)
            search = prepare(inst["E"], inst["E2"], ell)
            sample = search.reps[:3] + [search.M - 1]
            for t in sample:
                assert interpolate_classic(search, t) == fast_interpolate(search, t)
                compared += 1
        assert len(cases) >= 20
        return (
            f"{len(cases)} seeded instances (p^k <= 81), {compared} candidate "
            "classes coefficient-identical"
        )

    run_acceptance("03 interpolation oracle equivalence", check)


def test_acceptance_04_tower_degree_law():
    towers = [(2, 7, 6), (2, 5, 6), (3, 3, 4), (3, 5, 4), (5, 2, 3), (5, 3, 3)]

    def check():
        for p, d, k in towers:
            E, gen = cached_tower(p, d, k)
            tower = gen.tower
            assert len(tower.levels) == k >= 3
            assert [lvl.index for lvl in tower.levels] == list(range(1, k + 1))
            rels = [lvl.rel_degree for lvl in tower.levels[1:]]
            assert all(r in (1, p) for r in rels)
            if p in rels:  # once it extends it never stalls again
                first = rels.index(p)
                assert all(r == p for r in rels[first:])
            n_ext = sum(1 for r in rels if r == p)
            assert tower.i0 == k - n_ext
            u1, top = tower.levels[0].ctx, tower.top.ctx
            assert top.deg_abs == u1.deg_abs * p**n_ext
        return f"{len(towers)} towers with k >= 3 obey the degree law"

    run_acceptance("04 tower degree law", check)


def test_acceptance_05_descent_steps():
    plan = (
        [(2, 5, 6, tag) for tag in range(6)]
        + [(3, 3, 4, tag) for tag in range(4)]
        + [(5, 2, 3, tag) for tag in range(5)]
    )

    def check():
        steps = 0
        for p, d, k, tag in plan:
            E, gen = cached_tower(p, d, k, tag)
            for i in range(2, k + 1):
                ctx_i = gen.level_ctx(i)
                if p == 2:
                    El = E.lift_to(ctx_i)
                    x_i = _lift(gen.trail[i - 1], ctx_i)
                    assert x_mul(El, x_i, 2) == _lift(gen.trail[i - 2], ctx_i)
                else:
                    Et_i = gen.Et.lift_to(ctx_i)
                    Q = tuple(_lift(z, ctx_i) for z in gen.trail[i - 1])
                    prev = tuple(_lift(z, ctx_i) for z in gen.trail[i - 2])
                    assert Et_i.mul(p, Q) == prev
                steps += 1
        assert steps >= 50
        return f"{steps} division steps verified exactly, 0 failures"

    run_acceptance("05 descent correctness", check)


def test_acceptance_06_artin_schreier_vs_brute_force():
    exhaustive = [(2, 2), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4)]
    sampled = [(2, 8), (2, 9), (3, 5), (3, 6)]

    def pow_p(x):
        out = x
        for _ in range(x.ctx.p - 1):
            out = out * x
        return out

    def elements(ctx):
        for tup in itertools.product(range(ctx.p), repeat=ctx.deg_abs):
            yield FieldElement(ctx, np.array(tup, dtype=np.int64))

    def verify(ctx, level, theta, solvable_set):
        outcome = solve_artin_schreier(level, theta)
        assert outcome.extended == (theta.vec.tobytes() not in solvable_set)
        if outcome.extended:
            child = outcome.level.ctx
            lifted = child.element(child.lift_from(ctx, theta.vec))
            assert pow_p(outcome.root) - outcome.root == lifted
        else:
            assert pow_p(outcome.z) - outcome.z == theta

    def check():
        total = 0
        for p, d in exhaustive + sampled:
            ctx = make_field(p, d, seed=0)
            level = TowerLevel(1, ctx, None, 1)
            solvable = {(pow_p(z) - z).vec.tobytes() for z in elements(ctx)}
            if (p, d) in exhaustive:
                thetas = list(elements(ctx))
            else:
                rng = np.random.default_rng([0xA506, p, d])
                thetas = [ctx.element(ctx.random_vec(rng)) for _ in range(40)]
            for theta in thetas:
                verify(ctx, level, theta, solvable)
                total += 1
        return f"{total} equations classified and solved identically to brute force"

    run_acceptance("06 equation solver vs brute force", check)


def test_acceptance_07_recognition_selectivity():
    tiny = [(2, 7, 5), (3, 3, 5), (5, 2, 7)]

    def check():
        rejected_total = 0
        details = []
        for p, d, ell in tiny:
            inst = cached_instance(p, d, ell)
            search = prepare(inst["E"], inst["E2"], ell)
            report = search.run(scan_all=True)
            assert report.tries == report.budget
            gt = velu(inst["E"], inst["kernel"], check=False)
            top = search.top
            xP = FieldElement(top, search.xs[1])
            den = gt.x_den.lift_to(top).eval_elt(xP)
            image = gt.x_num.lift_to(top).eval_elt(xP) / den
            t_gt = search.locate_image_class(image)
            assert t_gt is not None
            accepted = {rep for _pos, rep, _phi in report.accepted}
            assert accepted == {t_gt}, (
                f"p={p}: accepted classes {accepted} != ground truth {{{t_gt}}}"
            )
            for _pos, _rep, phi in report.accepted:
                assert matches_ground_truth(phi, inst["E"], inst["kernel"])
            rejected = report.budget - len(report.accepted)
            assert sum(report.reject_counts.values()) == rejected
            rejected_total += rejected
            details.append(f"p={p}:{rejected}R/1A")
        assert rejected_total >= 50
        return (
            f"accepted sets match ground truth exactly; "
            f"{rejected_total} candidates rejected ({', '.join(details)})"
        )

    run_acceptance("07 recognition selectivity", check)


def test_acceptance_08_parallel_determinism():
    subset = [(2, 7, 13), (3, 3, 7), (5, 2, 7)]

    def check():
        for p, d, ell in subset:
            inst = cached_instance(p, d, ell)
            search = prepare(inst["E"], inst["E2"], ell)
            base = search.run(workers=1)
            assert base.found is not None
            for w in (2, 4):
                r = search.run(workers=w)
                assert r.found.serialize() == base.found.serialize(), (
                    f"worker count {w} changed the map on p={p} d={d} ell={ell}"
                )
                assert r.tries == base.tries
        return f"workers 1/2/4 bit-identical maps and tries on {len(subset)} instances"

    run_acceptance("08 parallel determinism", check)


def test_acceptance_09_variant_consistency_and_cost_trend():
    agree_subset = [(2, 7, 5), (3, 3, 5), (5, 2, 7)]
    EPS = 0.15

    def check():
        for p, d, ell in agree_subset:
            inst = cached_instance(p, d, ell)
            search = prepare(inst["E"], inst["E2"], ell)
            maps = {v: search.run(v).found.serialize() for v in VARIANTS}
            assert len(set(maps.values())) == 1, f"variants disagree on p={p} ell={ell}"

        costs = {v: [] for v in VARIANTS}
        for seed in range(3):
            inst = cached_instance(2, 7, 31, seed)
            search = prepare(inst["E"], inst["E2"], 31)
            for v in VARIANTS:
                r = search.run(v, scan_all=True)
                assert r.found is not None
                costs[v].append((r.t_FI + r.t_MC) / r.tries)
        naive = sum(costs["c2-naive"]) / 3
        fi = sum(costs["c2-fi"]) / 3
        mc = sum(costs["c2-fi-mc"]) / 3
        assert mc <= fi * (1 + EPS), f"mc {mc:.6f} !<= fi {fi:.6f}"
        assert fi <= naive * (1 + EPS), f"fi {fi:.6f} !<= naive {naive:.6f}"
        return (
            "variants agree on all subset instances; per-candidate cost "
            f"mc {mc * 1e3:.3f}ms <= fi {fi * 1e3:.3f}ms <= naive {naive * 1e3:.3f}ms"
        )

    run_acceptance("09 variant consistency and cost trend", check)
