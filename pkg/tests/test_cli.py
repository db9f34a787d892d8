import subprocess
import sys

import numpy as np
import pytest

from stvss.cli import main
from stvss.pbm import Bitmap, read_pbm, write_pbm

DUP22 = ["--scheme", "ex1_2_3", "--nx", "2", "--ny", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_contrast_oracle_dup22(capsys):
    code, out, _ = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,1", "--mode", "oracle")
    assert code == 0 and out.strip() == "-5/72"


def test_contrast_decimals(capsys):
    code, out, _ = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,1", "--decimals", "4")
    assert out.strip() == "-0.0694"


def test_contrast_out_of_range(capsys):
    code, _, err = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:99,0")
    assert code == 2 and "usage" in err


@pytest.mark.parametrize("bad", ["3:1", "x:1,1", "3:1,1,1"])
def test_contrast_bad_shift_syntax(capsys, bad):
    assert run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", bad)[0] == 2


def test_contrast_mixed_signs(capsys):
    assert run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,-1")[0] == 2


def test_negative_shift_is_mirrored(capsys):
    _, neg, _ = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:-2,-1")
    _, pos, _ = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:2,1")
    assert neg == pos


@pytest.mark.parametrize("scheme", ["ns2", "ns3", "ns4", "ex1_2_3"])
@pytest.mark.parametrize("nx, ny", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_analytic_equals_oracle(capsys, scheme, nx, ny):
    m = 3 if scheme == "ex1_2_3" else int(scheme[2:])
    for x in range(m + 1):
        for y in range(ny):
            args = ["contrast", "--scheme", scheme, "--nx", str(nx), "--ny", str(ny), "--shares", "1,2", "--shift", f"2:{x},{y}"]
            _, a, _ = run(capsys, *args, "--mode", "analytic")
            _, o, _ = run(capsys, *args, "--mode", "oracle")
            assert a == o


def test_analytic_refuses_k3(capsys):
    assert run(capsys, "contrast", "--scheme", "ex7_3_4", "--mode", "analytic")[0] == 2


def test_contrast_mc(capsys):
    code, out, _ = run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,1", "--mode", "mc", "--samples", "20000", "--seed", "3")
    value, se = map(float, out.split())
    assert code == 0 and abs(value + 5 / 72) < 5 * se
    assert run(capsys, "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,1", "--mode", "mc", "--samples", "20000", "--seed", "3")[1] == out


def test_contrast_budget(capsys):
    code, _, err = run(capsys, "contrast", "--scheme", "ex7_3_4", "--nx", "2", "--method", "full")
    assert code == 2 and "budget" in err


def test_tables_check(capsys):
    code, out, _ = run(capsys, "tables", "--which", "table9", "--check")
    assert code == 0 and "n=4\tx=1 STVSS\t-7/96" in out


def test_tables_check_reports_mismatch(capsys):
    code, _, err = run(capsys, "tables", "--which", "table8", "--check")
    assert code == 1 and "(1,2)" in err


def test_construct(capsys):
    code, out, _ = run(capsys, "construct", *DUP22, "--expanded")
    assert code == 0 and out.startswith("2 2 vector_dup\n3 3 2\n")
    assert "# B1*" in out


def test_construct_from_file(capsys, tmp_path):
    f = tmp_path / "pair.txt"
    f.write_text("2 2 2\n1 0\n1 0\n---\n1 0\n0 1\n")
    code, out, _ = run(capsys, "construct", "--pair-file", str(f), "--nx", "2")
    assert code == 0 and out.startswith("2 1 vector_dup\n2 2 2\n")
    f.write_text(out)
    assert run(capsys, "construct", "--pair-file", str(f))[1] == out


def test_bad_scheme_is_usage_error(capsys, tmp_path):
    assert run(capsys, "construct", "--scheme", "nope")[0] == 2
    assert run(capsys, "construct", "--nx", "0")[0] == 2
    assert run(capsys, "construct", "--pair-file", str(tmp_path / "missing"))[0] == 2


def test_collection(capsys):
    code, out, _ = run(capsys, "collection", "dump", "--scheme", "ex1_2_3", "--nx", "2", "--color", "black")
    records = out.strip().split("\n\n")
    assert code == 0 and len(records) == 6
    assert records[0].splitlines() == ["word 0 1 2", "0 1 1 0 1 1", "1 1 0 1 1 0", "1 0 1 1 0 1"]
    assert run(capsys, "collection", "count", "--scheme", "ex1_2_3", "--nx", "2", "--method", "2")[1].strip() == "36"


def test_security(capsys):
    code, out, _ = run(capsys, "security", "--scheme", "ex7_3_4", "--nx", "2", "--ny", "2")
    assert code == 0 and out.startswith("PASS")


def test_security_failure(capsys, tmp_path):
    f = tmp_path / "pair.txt"
    f.write_text("2 1 vector_dup\n2 4 2\n1 0 1 0\n1 0 1 0\n---\n1 0 0 1\n0 1 1 0\n")
    code, out, _ = run(capsys, "security", "--pair-file", str(f))
    assert code == 0  # secure as a plain scheme


def test_image_pipeline(capsys, tmp_path):
    secret = Bitmap(np.random.default_rng(0).integers(0, 2, (30, 30)))
    (tmp_path / "secret.pbm").write_bytes(write_pbm(secret))
    code, out, _ = run(capsys, "encode", *DUP22, str(tmp_path / "secret.pbm"), "--outdir", str(tmp_path), "--seed", "4")
    assert code == 0 and len(out.split()) == 3
    share1 = read_pbm((tmp_path / "share_1.pbm").read_bytes())
    assert (share1.height, share1.width) == (60, 180)

    stacked = tmp_path / "stacked.pbm"
    code, _, _ = run(capsys, "stack", str(tmp_path / "share_1.pbm"), str(tmp_path / "share_3.pbm"), "--out", str(stacked))
    assert code == 0
    code, out, _ = run(capsys, "measure", *DUP22, str(tmp_path / "secret.pbm"), str(stacked))
    assert code == 0 and out.split()[0] == "1/3"

    code, _, _ = run(capsys, "stack", str(tmp_path / "share_1.pbm"), str(tmp_path / "share_3.pbm"), "--shift", "3:1,1", "--out", str(stacked))
    code, out, _ = run(capsys, "measure", *DUP22, str(tmp_path / "secret.pbm"), str(stacked), "--shift", "3:1,1")
    value, se = out.split()
    assert code == 0 and se != "0.000000"


def test_stack_rejects_foreign_share(capsys, tmp_path):
    secret = tmp_path / "s.pbm"
    secret.write_bytes(write_pbm(Bitmap([[0, 1]])))
    run(capsys, "encode", *DUP22, str(secret), "--outdir", str(tmp_path / "a"))
    run(capsys, "encode", "--scheme", "ex1_2_3", "--nx", "2", "--ny", "2", "--method", "full", str(secret), "--outdir", str(tmp_path / "b"))
    code, _, err = run(capsys, "stack", str(tmp_path / "a" / "share_1.pbm"), str(tmp_path / "b" / "share_2.pbm"))
    assert code == 1 and "different schemes" in err


def test_unreadable_pbm(capsys, tmp_path):
    bad = tmp_path / "bad.pbm"
    bad.write_bytes(b"P5\n1 1\n255\n\x00")
    assert run(capsys, "encode", str(bad), "--outdir", str(tmp_path))[0] == 1


def test_usage_without_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stvss", "contrast", *DUP22, "--shares", "1,3", "--shift", "3:1,1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "-5/72"
