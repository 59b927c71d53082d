"""Command-line front end: instance files, CSV output, and exit codes."""

import csv

import numpy as np
import pytest

from conftest import cached_instance
from isogeny.cli import (
    BENCH_EXTRA_COLUMNS,
    CSV_COLUMNS,
    INSTANCE_TAG,
    _second_isogeny_possible,
    _unique_quotient,
    format_instance,
    generate_instance,
    main,
    parse_grid,
    parse_instance,
)
from isogeny.curves import (
    Curve,
    NotIsomorphic,
    find_isomorphism,
    frobenius_eigenvalues_mod,
    is_ordinary,
    kernel_from_point,
    random_ordinary_curve,
    trace_of_frobenius,
    velu,
)
from isogeny.field import make_field


def test_generate_instance_is_deterministic_and_self_consistent():
    a = cached_instance(3, 3, 5)
    b = generate_instance(3, 3, 5, 0)
    assert format_instance(a) == format_instance(b)
    assert a["E2"].ctx is a["ctx"] and a["kernel"].is_monic()
    assert a["kernel"].degree == 2


def test_generate_instance_validates_arguments():
    for bad in [(11, 2, 5), (3, 0, 5), (3, 3, 3), (3, 3, 9), (2, 4, 2)]:
        with pytest.raises(ValueError):
            generate_instance(*bad, 0)


def _quotients_collide(E, ell, seed=0):
    """Whether the two Frobenius eigenlines (when distinct) carry
    ell-isogenies onto isomorphic quotient curves."""
    lams = frobenius_eigenvalues_mod(trace_of_frobenius(E), E.ctx.order, ell)
    if not lams or len(lams) != 2:
        return None
    first = velu(E, kernel_from_point(E, ell, seed=seed, eigenvalue=lams[0])[0])
    second = velu(E, kernel_from_point(E, ell, seed=seed, eigenvalue=lams[1])[0])
    try:
        find_isomorphism(second.codomain, first.codomain)
        return True
    except NotIsomorphic:
        return False


def test_norm_screen_is_necessary_for_quotient_collisions():
    """Whenever two distinct eigenlines land on isomorphic quotients the
    discriminant screen must have fired, and whenever the screen stays
    quiet the quotients must differ.  Checked exhaustively over prime
    fields and on sampled F_25 curves (collisions abound there) plus
    sampled F_27 curves (where the screen mostly stays quiet)."""
    collisions = 0
    quiet = 0

    def check_one(E, ell):
        nonlocal collisions, quiet
        collide = _quotients_collide(E, ell)
        if collide is None:
            return
        t = trace_of_frobenius(E)
        fired = _second_isogeny_possible(t * t - 4 * E.ctx.order, ell)
        if collide:
            collisions += 1
            assert fired, f"collision without screen fire: q={E.ctx.order} ell={ell}"
        if not fired:
            quiet += 1
            assert not collide, f"screen quiet on a collision: q={E.ctx.order} ell={ell}"

    for p, ells in [(5, (3, 7)), (7, (3, 5))]:
        ctx = make_field(p, 1, seed=0)
        for a in range(p):
            for b in range(p):
                try:
                    E = Curve(ctx, a, b)
                except ValueError:
                    continue
                if not is_ordinary(E):
                    continue
                for ell in ells:
                    check_one(E, ell)
    for p, d, ells in [(5, 2, (7, 11)), (3, 3, (5, 7, 11, 13))]:
        ctx = make_field(p, d, seed=0)
        rng = np.random.default_rng([0x5C2E, p, d])
        for _tag in range(12):
            E = random_ordinary_curve(ctx, rng)
            for ell in ells:
                check_one(E, ell)
    assert collisions > 10 and quiet > 10


def test_generated_instances_admit_only_the_planted_answer():
    """Parameter points that are prone to quotient collisions must
    still generate instances whose planted map is the unique answer."""
    for p, d, ell, seed in [
        (3, 3, 5, 4),
        (5, 2, 7, 1),
        (5, 2, 7, 2),
        (5, 2, 11, 2),
        (5, 2, 11, 3),
        (5, 2, 11, 4),
    ]:
        inst = generate_instance(p, d, ell, seed)
        assert _unique_quotient(inst["E"], inst["E2"], ell, seed)


def test_gen_writes_byte_identical_files(tmp_path):
    p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["gen", "--p", "2", "--d", "5", "--ell", "5", "--seed", "1"]
    assert main(args + ["--out", str(p1)]) == 0
    assert main(args + ["--out", str(p2)]) == 0
    data = p1.read_bytes()
    assert data == p2.read_bytes() and data.startswith(INSTANCE_TAG.encode())


def test_instance_file_round_trip():
    inst = cached_instance(2, 7, 5)
    text = format_instance(inst)
    back = parse_instance(text)
    assert (back["p"], back["d"], back["ell"], back["seed"]) == (2, 7, 5, 0)
    assert back["E"].serialize() == inst["E"].serialize()
    assert back["E2"].serialize() == inst["E2"].serialize()
    assert back["kernel"].serialize() == inst["kernel"].serialize()


def test_parse_instance_rejects_malformed_input():
    inst = cached_instance(2, 7, 5)
    text = format_instance(inst)
    with pytest.raises(ValueError):
        parse_instance("not a tag\n" + text)
    with pytest.raises(ValueError):
        parse_instance("\n".join(ln for ln in text.splitlines() if not ln.startswith("E2")))
    with pytest.raises(ValueError):
        parse_instance(text.replace("d 7", "d 6"))
    # a kernel of the wrong degree for the declared ell
    with pytest.raises(ValueError):
        parse_instance(text.replace("ell 5", "ell 7"))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_find_writes_exact_csv_and_exits_zero(tmp_path, capsys):
    inst_path = tmp_path / "inst.txt"
    csv_path = tmp_path / "runs.csv"
    inst_path.write_text(format_instance(cached_instance(2, 7, 5)))
    code = main(["find", "--instance", str(inst_path), "--out", str(csv_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "found" in out and "ground truth: x-map matches" in out
    rows = read_csv(csv_path)
    assert len(rows) == 1
    row = rows[0]
    assert list(row.keys()) == CSV_COLUMNS
    assert (row["ell"], row["p"], row["d"]) == ("5", "2", "7")
    assert row["variant"] == "c2-fi-mc" and row["workers"] == "1"
    assert row["found"] == "1" and row["verified"] == "1"
    assert 1 <= int(row["tries"]) <= 16
    for col in ("t_torsE", "t_torsE2", "t_FI", "t_RFR", "t_MC", "t_loop"):
        assert float(row[col]) >= 0.0 and "." in row[col]
    # appending a second row must not duplicate the header
    assert main(["find", "--instance", str(inst_path), "--out", str(csv_path),
                 "--variant", "c2-naive", "--workers", "2"]) == 0
    rows = read_csv(csv_path)
    assert len(rows) == 2 and rows[1]["variant"] == "c2-naive" and rows[1]["workers"] == "2"


def test_find_reports_failure_with_exit_one(tmp_path, capsys):
    # swap in a non-isogenous second curve (found by scanning point counts)
    import numpy as np

    from isogeny.curves import count_points, random_ordinary_curve

    inst = dict(cached_instance(3, 3, 5))
    ctx = inst["ctx"]
    n_e = count_points(inst["E"])
    rng = np.random.default_rng(0xBEEF)
    while True:
        F = random_ordinary_curve(ctx, rng)
        if count_points(F) != n_e:
            inst["E2"] = F
            break
    text = format_instance(inst)
    inst_path = tmp_path / "bad.txt"
    inst_path.write_text(text)
    csv_path = tmp_path / "runs.csv"
    code = main(["find", "--instance", str(inst_path), "--out", str(csv_path)])
    assert code == 1
    out = capsys.readouterr().out
    assert "no isogeny found (phase=" in out
    row = read_csv(csv_path)[0]
    assert row["found"] == "0" and row["verified"] == "0"


def test_find_missing_file_and_broken_instance_exit_two(tmp_path, capsys):
    assert main(["find", "--instance", str(tmp_path / "nope.txt")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("garbage\n")
    assert main(["find", "--instance", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "error (phase=input)" in err


def test_gen_rejects_unsupported_parameters(capsys):
    assert main(["gen", "--p", "11", "--d", "2", "--ell", "5"]) == 2
    assert "error (phase=input)" in capsys.readouterr().err


def test_parse_grid():
    assert parse_grid("2,7,5") == [(2, 7, 5)]
    assert parse_grid("2,7,5; 3,3,7;") == [(2, 7, 5), (3, 3, 7)]
    with pytest.raises(ValueError):
        parse_grid("2,7")
    with pytest.raises(ValueError):
        parse_grid(";;")


def test_bench_single_point_writes_means_and_extrema(tmp_path, capsys):
    csv_path = tmp_path / "bench.csv"
    code = main(["bench", "--grid", "2,5,5", "--reps", "2",
                 "--variant", "c2-fi", "--out", str(csv_path)])
    assert code == 0
    rows = read_csv(csv_path)
    assert len(rows) == 1
    row = rows[0]
    assert list(row.keys()) == CSV_COLUMNS + BENCH_EXTRA_COLUMNS
    assert row["variant"] == "c2-fi"
    assert row["found"] == "1.00" and row["verified"] == "1.00"
    assert float(row["t_loop_min"]) <= float(row["t_loop"]) <= float(row["t_loop_max"])
    assert "bench p=2 d=5 ell=5" in capsys.readouterr().out


def test_bench_all_variants_one_row_each(tmp_path):
    csv_path = tmp_path / "bench.csv"
    assert main(["bench", "--grid", "3,3,5", "--reps", "1",
                 "--out", str(csv_path)]) == 0
    rows = read_csv(csv_path)
    assert [row["variant"] for row in rows] == ["c2-naive", "c2-fi", "c2-fi-mc"]
    assert all(row["found"] == "1.00" for row in rows)
    tries = {row["tries"] for row in rows}
    assert len(tries) == 1  # variants agree on the accepted class


def test_bench_skips_infeasible_grid_points(tmp_path, capsys):
    csv_path = tmp_path / "bench.csv"
    # ell == p is invalid for generation: the point is skipped, not fatal
    code = main(["bench", "--grid", "3,3,3; 2,5,5", "--reps", "1",
                 "--variant", "c2-fi-mc", "--out", str(csv_path)])
    assert code == 0
    assert "skipping grid point p=3 d=3 ell=3" in capsys.readouterr().err
    rows = read_csv(csv_path)
    assert len(rows) == 1 and rows[0]["p"] == "2"
