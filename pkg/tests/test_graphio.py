import os

import pytest

from rainbowlab.core import ModelParams, generate
from rainbowlab.graphio import (GraphFormatError, format_graph, parse_graph, read_graph,
                                write_atomic, write_graph)


def test_roundtrip(tmp_path):
    G = generate(ModelParams(12, 3, 0.2, 9, seed=4))
    path = tmp_path / "g.cg"
    write_graph(path, G)
    assert read_graph(path) == G
    assert parse_graph(format_graph(G)) == G


def test_one_based_and_comments():
    G = parse_graph("# a triangle\n3 2 3\n1 2 1\n\n2 3 2\n1 3 3\n")
    assert G.edge_tuples() == [(0, 1), (0, 2), (1, 2)]
    assert G.edge_color((0, 2)) == 2


@pytest.mark.parametrize("text, line", [
    ("", 0),
    ("3 2\n", 1),
    ("3 2 3\n1 2\n", 2),
    ("3 2 3\n1 4 1\n", 2),
    ("3 2 3\n2 1 1\n", 2),
    ("3 2 3\n1 2 4\n", 2),
    ("3 2 3\n1 2 1\n1 2 2\n", 3),
    ("3 2 3\n1 x 1\n", 2),
    ("3 1 3\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(GraphFormatError) as err:
        parse_graph(text)
    assert err.value.lineno == line


def test_atomic_write_leaves_no_temp(tmp_path):
    path = tmp_path / "out.txt"
    write_atomic(path, "a\n")
    write_atomic(path, "b\n")
    assert path.read_text() == "b\n"
    assert os.listdir(tmp_path) == ["out.txt"]
