from fractions import Fraction

import pytest

from stvss.tables import TABLES, Cell, format_rational, generate_table


@pytest.fixture(scope="module")
def tables():
    return {name: generate_table(name) for name in TABLES}


def test_table10_row(tables):
    t = tables["table10"]
    assert t.cell("n=3", "y=0 VSS").value == Fraction(1, 3)
    assert t.cell("n=3", "y=1 STVSS").value == Fraction(1, 6)
    assert t.cell("n=3", "y=1 VSS").value is None


def test_table11_cells(tables):
    t = tables["table11"]
    assert t.cell("n=3", "x=1,y=1 VSS").value == Fraction(-1, 18)
    assert t.cell("n=3", "x=1,y=1 STVSS").value == Fraction(-5, 72)
    assert t.cell("n=4", "x=2,y=1 STVSS").value == Fraction(-1, 32)


def test_table9_cells(tables):
    t = tables["table9"]
    assert t.cell("n=4", "x=1 STVSS").value == Fraction(-7, 96)
    assert t.cell("n=3", "x=3 STVSS").value == Fraction(1, 6)
    assert t.cell("n=2", "x=3 STVSS").source == "oracle"
    assert not t.mismatches()


def test_duplication_comparison_rows(tables):
    t = tables["appB_table1"]
    shifts = ["(0,0)", "(1,0)", "(2,0)", "(0,1)", "(1,1)"]
    assert [t.cell("P22", s).value for s in shifts] == [Fraction(v) for v in ("1/2", "1/8", "-1/4", "1/4", "1/16")]
    assert [t.cell("V22", s).value for s in shifts] == [Fraction(v) for v in ("1/2", "-3/8", "1/4", "1/4", "-3/16")]
    assert not t.mismatches()


def test_permutation_method_rows(tables):
    t = tables["appC_table1"]
    assert [t.cell("Method 3", f"x={x}").value for x in range(4)] == [Fraction(1, 3), Fraction(-5, 36), Fraction(-1, 9), Fraction(1, 6)]
    assert [t.cell("Method 2", f"x={x}").value for x in range(1, 4)] == [Fraction(-1, 9), Fraction(-1, 18), 0]
    assert t.cell("Method 1", "x=2").printed == "-4/90"
    assert not t.mismatches()


@pytest.mark.parametrize("name", TABLES)
def test_regression_golden(tables, name):
    assert all(c.matches_regression for c in tables[name].cells)


def test_known_differences_are_reported(tables):
    t8 = tables["table8"].cell("avg", "(1,2)")
    assert t8.value == Fraction(1, 72) and t8.status == "MISMATCH"
    t11 = tables["table11"].cell("n=2", "x=1,y=1 VSS")
    assert t11.value == Fraction(-1, 8) and t11.status == "MISMATCH"


def test_table8_other_cells(tables):
    t = tables["table8"]
    assert t.cell("avg", "(0,0)").value == Fraction(1, 6)
    assert t.cell("avg", "(1,0)").value == Fraction(-11, 360)
    assert t.cell("avg", "(6,1)").status == "match"


def test_cell_status():
    assert Cell("r", "c", None, "—").status == "blank"
    assert Cell("r", "c", Fraction(1, 8), "—").status == "extra"
    assert Cell("r", "c", None, "1/2").status == "MISMATCH"
    assert Cell("r", "c", Fraction(-2, 45), "-4/90").status == "match"
    assert Cell("r", "c", Fraction(1, 6), "0.1667", decimals=4).status == "match"
    assert Cell("r", "c", Fraction(1, 6), "0.1666", decimals=4).status == "MISMATCH"


def test_tsv(tables):
    lines = tables["table10"].to_tsv().splitlines()
    assert lines[0].split("\t")[:3] == ["row", "column", "value"]
    assert "n=3\ty=1 STVSS\t1/6\t0.1667\t1/6\tmatch" in lines[1 + 8 + 3]


def test_format_rational():
    assert format_rational(Fraction(-5, 72)) == "-5/72"
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-5, 72), 4) == "-0.0694"


def test_unknown_table():
    with pytest.raises(ValueError):
        generate_table("table99")
