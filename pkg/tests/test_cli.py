from __future__ import annotations

import pytest

from hyperham.cli import run, stable_region
from hyperham.graph import format_instance, parse_instance, validate_ell_cycle
from hyperham.models import gen_dirac


@pytest.fixture
def inst(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text(format_instance(gen_dirac(40, 3, 0.55, 2).graph))
    return path


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_formula_psi(capsys):
    code, out, _ = call(capsys, "formula", "--psi", "--n", 6, "--k", 3, "--ell", 1)
    assert code == 0 and out == "120\n"


def test_formula_csv(capsys):
    code, out, _ = call(capsys, "formula", "--psi", "--ck", "--n", 9, "--k", 3, "--ell", 0,
                        "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "# schema=1" and lines[2].startswith("psi,9,3,0,280,")
    assert lines[3].startswith("c_k_ell,,3,0,6,")


def test_formula_needs_quantity(capsys):
    code, _, err = call(capsys, "formula", "--n", 6)
    assert code == 2 and err.startswith("E:")


def test_oracle_edgeless(capsys, tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("3 6\n")
    code, out, _ = call(capsys, "oracle", p, "--ell", 1)
    assert code == 0
    header, row = out.splitlines()[1:3]
    assert header == "instance,n,k,ell,distinct,orderings,seconds"
    assert row.startswith("e.txt,6,3,1,0,0,")


def test_oracle_limit(capsys, tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("2 14\n0 1\n")
    code, _, err = call(capsys, "oracle", p, "--ell", 1)
    assert code == 2 and err.startswith("E:")


def test_bad_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["nope"])
    assert exc.value.code == 2
    assert capsys.readouterr().err.startswith("E:")


def test_runtime_failure(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 5\n0 1 9\n")
    code, _, err = call(capsys, "oracle", p, "--ell", 1)
    assert code == 1 and err.startswith("E:")


def test_missing_file(capsys):
    code, _, err = call(capsys, "oracle", "/nonexistent/x.txt", "--ell", 1)
    assert code == 2 and "E:" in err


def test_gen_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        assert call(capsys, "gen", "--family", "binomial", "--n", 10, "--p", 0.5,
                    "--seed", 4, "--out", p)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(parse_instance(a.read_text())) > 0


def test_gen_records_generated_seed(capsys):
    code, out, err = call(capsys, "gen", "--family", "complete", "--n", 5)
    assert code == 0 and "seed=" in err and "seed=" in out.splitlines()[0]


def test_gen_h_epsilon(capsys):
    code, out, _ = call(capsys, "gen", "--family", "h_epsilon", "--n", 9, "--eps", "1/9", "--seed", 0)
    assert code == 0 and parse_instance(out).n == 9


def test_pipeline_and_verify(capsys, inst, tmp_path):
    code, out, _ = call(capsys, "pipeline", inst, "--count", 5, "--seed", 1)
    assert code == 0
    lines = out.splitlines()
    cycles = lines[:5]
    assert lines[5] == "# schema=1" and lines[6].startswith("seed,n,k,ell,m,t")
    H = parse_instance(inst.read_text())
    for line in cycles:
        assert validate_ell_cycle(H, [int(x) for x in line.split()], 1).ok
    cyc = tmp_path / "cycles.txt"
    cyc.write_text(out)
    code, out, _ = call(capsys, "pipeline", inst, "--verify", cyc)
    assert code == 0 and out == "verified 5/5\n"


def test_verify_rejects_bad_cycle(capsys, inst, tmp_path):
    cyc = tmp_path / "cycles.txt"
    cyc.write_text(" ".join(map(str, range(40))) + "\n")
    code, out, err = call(capsys, "pipeline", inst, "--verify", cyc)
    assert code == 1 and err.startswith("E:")


def test_pipeline_reproducible(capsys, inst, tmp_path):
    outs = []
    for i in range(2):
        summary = tmp_path / f"s{i}.csv"
        cycles = tmp_path / f"c{i}.txt"
        assert call(capsys, "pipeline", inst, "--count", 3, "--seed", 8, "--out", summary,
                    "--cycles", cycles)[0] == 0
        outs.append((stable_region(summary.read_text()), cycles.read_bytes()))
    assert outs[0] == outs[1]


def test_pipeline_infeasible(capsys, tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("3 4\n0 1 2\n")
    code, _, err = call(capsys, "pipeline", p, "--ell", 1, "--seed", 0)
    assert code == 2 and err.startswith("E:")


def test_bpi(capsys, tmp_path):
    H = gen_dirac(30, 3, 0.6, 0).graph
    inst = tmp_path / "h.txt"
    inst.write_text(format_instance(H))
    part = tmp_path / "p.txt"
    part.write_text("\n".join(" ".join(map(str, range(i * 10, i * 10 + 10))) for i in range(3)))
    code, out, _ = call(capsys, "bpi", inst, "--partition", part, "--trials", 20, "--seed", 3)
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("m,eps,trials,seed,delta_star")
    assert "# histogram" in lines and "min_degree,count" in lines


def test_bpi_wrong_part_count(capsys, tmp_path, inst):
    part = tmp_path / "p.txt"
    part.write_text("0 1\n2 3\n")
    code, _, err = call(capsys, "bpi", inst, "--partition", part, "--seed", 0)
    assert code == 2 and err.startswith("E:")


def test_scan_complete(capsys):
    code, out, _ = call(capsys, "scan", "--family", "complete", "--ns", "6,8", "--ell", 1, "--seed", 0)
    rows = out.splitlines()[2:]
    assert code == 0 and len(rows) == 2
    assert rows[0].split(",")[7:9] == ["120", "120"]


def test_scan_refuses_large_cells(capsys):
    code, _, err = call(capsys, "scan", "--ns", "6,14", "--values", "0.9", "--seed", 0)
    assert code == 2 and "limit" in err


def test_stable_region_drops_timing():
    text = "# schema=1\na,seconds,b\n1,0.5,2\n"
    assert stable_region(text) == "# schema=1\na,b\n1,2\n"
