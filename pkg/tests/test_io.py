import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttrs.exceptions import ProblemFileError
from ttrs.gen import GenSpec, generate, reference_examples
from ttrs.io import format_problem, parse_problem, read_problem, write_problem


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["class2", "class2e", "class3b", "class4"]), st.sampled_from([1.0, 0.1]),
       st.integers(0, 1000), st.sampled_from([None, True, False]))
def test_round_trip(klass, density, seed, sparse):
    p = generate(GenSpec(7, density, klass, seed)).problem
    back = parse_problem(format_problem(p, {"seed": seed}, sparse=sparse))
    assert back.problem == p
    assert back.meta == {"seed": str(seed)}


def test_file_round_trip(tmp_path):
    p, _ = reference_examples()[1]
    path = tmp_path / "ex2.ttrs"
    write_problem(path, p, {"preset": "class2"})
    pf = read_problem(path)
    assert pf.problem == p and pf.meta["preset"] == "class2" and pf.convention == "half"


TEXT = """# comment
n 2
convention nohalf
delta1 1.0
delta2 1.5   # trailing comment
A sparse 2
0 0 -4
0 1 1
a
1 1
B dense
3 0
0 1
c
0 0
end
"""


def test_nohalf_and_sparse():
    pf = parse_problem(TEXT)
    np.testing.assert_array_equal(pf.problem.A, [[-8.0, 2.0], [2.0, 0.0]])
    assert pf.convention == "nohalf"
    assert pf.problem.delta2 == 1.5


@pytest.mark.parametrize(
    "text,line,col",
    [
        (TEXT.replace("delta1 1.0", "delta1 x"), 4, 8),
        (TEXT.replace("a\n1 1\n", "a\n1 1 1\n"), 10, 5),
        (TEXT.replace("0 1 1", "0 5 1"), 8, 3),
        (TEXT.replace("B dense", "B weird"), 11, 3),
        (TEXT.replace("n 2", "bogus 2"), 2, 1),
        ("n 2\ndelta1 1\n", 3, 1),
    ],
)
def test_errors_report_position(text, line, col):
    with pytest.raises(ProblemFileError) as ei:
        parse_problem(text)
    assert (ei.value.line, ei.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(ei.value)


def test_invalid_data_rejected():
    with pytest.raises(ProblemFileError):
        parse_problem(TEXT.replace("3 0\n0 1", "-3 0\n0 1"))
    with pytest.raises(ProblemFileError):
        parse_problem(TEXT.replace("delta2 1.5", "delta2 inf"))
