import numpy as np
import pytest

from treecut.generate import (sample8_dag, sample8_network, random_constraint_network, random_criterion,
                              random_influence_diagram)
from treecut.io import ParseError, ProblemFile, load, parse, parse_criterion, serialize
from conftest import CORPUS


def test_minimal_file():
    pf = parse("var A 2\ncpt A\n0.5 0.5\n")
    bn = pf.belief_network()
    assert bn.n == 1 and np.allclose(bn.cpts[0].values, [0.5, 0.5])


def test_comments_and_blank_lines():
    pf = parse("# header\n\nvar A 2   # binary\ncpt A\n  0.25 0.75  # row\n")
    assert pf.kind == "belief"


def test_sample8_corpus_structure():
    bn = load(CORPUS / "sample8.bn").belief_network()
    assert bn.dag == sample8_dag()
    assert bn.names == tuple("ABCDEFGH")


def test_bad_row_names_cpt_and_parents():
    text = "var A 2\nvar B 2\ncpt A\n0.5 0.5\ncpt B | A\n0.5 0.5\n0.5 0.4\n"
    with pytest.raises(ParseError, match=r"cpt B: row for \(A=1\) sums to 0.9") as info:
        parse(text)
    assert (info.value.line, info.value.col) == (7, 1)


def test_parent_order_in_file_is_respected():
    text = "var A 2\nvar B 2\nvar C 2\ncpt A\n.5 .5\ncpt B\n.5 .5\ncpt C | B A\n1 0\n0 1\n.5 .5\n.2 .8\n"
    cpt = parse(text).cpts[2]
    assert cpt.scope == (0, 1, 2)
    # B is slowest: row 2 is (B=0, A=1), row 3 is (B=1, A=0)
    assert np.allclose(cpt.values[1, 0], [0.0, 1.0])
    assert np.allclose(cpt.values[0, 1], [0.5, 0.5])


@pytest.mark.parametrize("text, pattern, line", [
    ("var A 2\ncpt B\n0.5 0.5\n", "undeclared variable 'B'", 2),
    ("var A 2\nvar A 3\n", "declared twice", 2),
    ("var A x\n", "expected an integer", 1),
    ("var A 2\nfoo A\n", "unknown statement", 2),
    ("var A 2\ncpt A\n0.5\n", "row needs 2", 3),
    ("var A 2\nrel A\n0\n", "unexpected end of file", 2),
    ("var A 2\nrel A\n2\nend\n", "out of range", 3),
    ("var A 2\ncrit A\n1\nend\n", "needs 2 values", 2),
    ("var A 2\ncpt A\n0.5 0.5\nrel A\n0\nend\n", "cannot mix", 4),
    ("var A 2\ncpt A | A\n", "own parent", 2),
])
def test_errors_are_anchored(text, pattern, line):
    with pytest.raises(ParseError, match=pattern) as info:
        parse(text)
    assert info.value.line == line


def test_missing_cpt_is_dangling():
    with pytest.raises(ParseError, match="without a cpt: B"):
        parse("var A 2\nvar B 2\ncpt A\n0.5 0.5\n")


def test_cycle_rejected():
    text = "var A 2\nvar B 2\ncpt A | B\n.5 .5\n.5 .5\ncpt B | A\n.5 .5\n.5 .5\n"
    with pytest.raises(ParseError, match="cycle"):
        parse(text)


def test_crit_values_may_span_lines():
    pf = parse("var A 2\nvar B 2\ncrit A B\n1 2\n3 4\nend\n")
    assert pf.kind == "constraint"
    assert np.allclose(pf.criterion.components[0].values, [[1, 2], [3, 4]])


def roundtrip(pf):
    text = serialize(pf)
    again = parse(text)
    assert serialize(again) == text
    return again


def test_roundtrip_belief(rng):
    roundtrip(ProblemFile.from_model(sample8_network(rng, 3)))


def test_roundtrip_constraint_with_criterion(rng):
    cn = random_constraint_network(rng, 7, tightness=0.5)
    back = roundtrip(ProblemFile.from_model(cn, random_criterion(rng, cn.card)))
    assert back.constraint_network() == cn


def test_roundtrip_influence(rng):
    idg = random_influence_diagram(rng, 4, 2)
    back = roundtrip(ProblemFile.from_model(idg)).influence_diagram()
    assert back.decisions == idg.decisions
    for v, t in idg.cpts.items():
        assert back.cpts[v].allclose(t, 0.0)


def test_corpus_files_are_canonical():
    for path in sorted(CORPUS.iterdir()):
        if path.suffix == ".crit":
            continue
        pf = load(path)
        assert serialize(parse(serialize(pf))) == serialize(pf)


def test_parse_criterion_file():
    pf = load(CORPUS / "sample8.csp")
    f = parse_criterion((CORPUS / "sample8.crit").read_text(), pf.names, pf.card)
    assert [t.scope for t in f.components] == [(0, 6), (2,), (3, 4, 5)]
    with pytest.raises(ParseError):
        parse_criterion("var Z 2\ncrit Z\n1 2\nend\n", pf.names, pf.card)


def test_wrong_kind_accessor():
    from treecut.models import ModelError
    with pytest.raises(ModelError):
        parse("var A 2\ncpt A\n0.5 0.5\n").constraint_network()
