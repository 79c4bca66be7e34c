"""Engine answers on the shipped corpus against frozen enumeration results."""
import numpy as np
import pytest

from treecut.cli import problem_graph
from treecut.csp import solve
from treecut.decomposition import decompose
from treecut.inference import belief, mpe
from treecut.io import load
from treecut.optimize import meu, optimize
from treecut.oracle import oracle_belief
from conftest import CORPUS

STRATEGIES = ("elim", "brute", "cutset")
FILES = sorted(p.name for p in CORPUS.iterdir() if p.suffix != ".crit")


@pytest.mark.parametrize("name", FILES)
def test_corpus_against_frozen(name, frozen):
    pf = load(CORPUS / name)
    entry = frozen[name]
    assert entry["kind"] == pf.kind
    dec = decompose(problem_graph(pf))
    for _, t in dec.levels:
        for strat in STRATEGIES:
            if pf.kind == "belief":
                bn = pf.belief_network()
                ev = {pf.names.index(k): v for k, v in entry["evidence"].items()}
                for qname, dist in entry["posteriors"].items():
                    post = belief(bn, t, strat, pf.names.index(qname), ev)
                    assert np.max(np.abs(post.distribution - dist)) <= 1e-9
                res = mpe(bn, t, strat, ev)
                assert abs(res.probability - entry["mpe"]["probability"]) <= 1e-12
            elif pf.kind == "constraint":
                res = solve(pf.constraint_network(), t, "cutset" if strat == "cutset" else "backtracking", count=True)
                assert (res.consistent, res.count) == (entry["consistent"], entry["count"])
                if "optimum" in entry:
                    o = optimize(pf.constraint_network(), pf.criterion, t, strat)
                    assert o.value == pytest.approx(entry["optimum"], abs=1e-9)
            else:
                m = meu(pf.influence_diagram(), t, strat)
                assert m.expected_utility == pytest.approx(entry["meu"], abs=1e-9)
                assert {pf.names[d]: x for d, x in m.decisions.items()} == entry["decisions"]


def test_oracle_still_matches_frozen(frozen):
    pf = load(CORPUS / "sample8.bn")
    entry = frozen["sample8.bn"]
    ev = {pf.names.index(k): v for k, v in entry["evidence"].items()}
    got = oracle_belief(pf.belief_network(), pf.names.index("A"), ev)
    assert np.allclose(got, entry["posteriors"]["A"], atol=1e-15)
