import numpy as np
import pytest

from treecut.generate import sample8_criterion, random_belief_network, random_constraint_network, random_criterion
from treecut.graph import DirectedGraph
from treecut.models import (BeliefNetwork, Constraint, ConstraintNetwork, CriterionFunction, InfluenceDiagram,
                            ModelError, constraint_check, criterion_value, joint_probability)
from treecut.oracle import joint_assignments
from treecut.tables import Table


def test_single_variable_joint():
    bn = BeliefNetwork.from_parents(["A"], [2], {}, {0: [0.3, 0.7]})
    assert joint_probability(bn, [1]) == pytest.approx(0.7)


def test_chain_joint():
    bn = BeliefNetwork.from_parents(["A", "B"], [2, 2], {1: [0]}, {0: [0.5, 0.5], 1: [[0.9, 0.1], [0.2, 0.8]]})
    assert joint_probability(bn, {0: 0, 1: 1}) == pytest.approx(0.05)


def test_random_network_sums_to_one(rng):
    bn = random_belief_network(rng, 5)
    total = sum(joint_probability(bn, x) for x in joint_assignments(bn.card))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_out_of_domain_value():
    bn = BeliefNetwork.from_parents(["A"], [2], {}, {0: [0.3, 0.7]})
    with pytest.raises(ModelError):
        joint_probability(bn, [2])
    with pytest.raises(ModelError):
        joint_probability(bn, [])


def test_unnormalized_cpt_names_row():
    with pytest.raises(ModelError, match=r"CPT for B .*A=1"):
        BeliefNetwork.from_parents(["A", "B"], [2, 2], {1: [0]}, {0: [0.5, 0.5], 1: [[0.5, 0.5], [0.6, 0.3]]})


def test_cpt_scope_must_match_family():
    dag = DirectedGraph(2, [(0, 1)])
    with pytest.raises(ModelError):
        BeliefNetwork(("A", "B"), (2, 2), dag, (Table((0,), [0.5, 0.5]), Table((1,), [0.5, 0.5])))


def test_sample8_criterion_value():
    f = sample8_criterion((3,) * 8)
    x = {0: 1, 6: 1, 2: 2, 3: 1, 4: 1, 5: 1, 1: 0, 7: 0}
    assert criterion_value(f, x) == 10.0
    assert criterion_value(CriterionFunction(), x) == 0.0


def test_random_criterion_matches_naive(rng):
    card = (2, 3, 2, 3)
    f = random_criterion(rng, card, 4)
    for x in joint_assignments(card):
        naive = sum(float(t.values[tuple(x[v] for v in t.scope)]) for t in f.components)
        assert criterion_value(f, x) == pytest.approx(naive, abs=1e-12)


def test_constraint_check():
    assert constraint_check(ConstraintNetwork(("A", "B"), (2, 2)), [1, 1])
    cn = ConstraintNetwork(("A", "B"), (2, 2), (Constraint((0, 1), frozenset({(0, 0)})),))
    assert not constraint_check(cn, [0, 1])
    assert constraint_check(cn, [0, 0])


def test_constraint_check_matches_scan(rng):
    cn = random_constraint_network(rng, 6, tightness=0.5)
    for x in joint_assignments(cn.card):
        naive = all(tuple(x[v] for v in c.scope) in c.allowed for c in cn.constraints)
        assert constraint_check(cn, x) == naive


def test_constraint_validation():
    with pytest.raises(ModelError):
        Constraint((0, 1), frozenset({(0,)}))
    with pytest.raises(ModelError):
        ConstraintNetwork(("A",), (2,), (Constraint((0,), frozenset({(5,)})),))


def test_influence_decisions_must_be_roots():
    dag = DirectedGraph(2, [(1, 0)])
    with pytest.raises(ModelError, match="not a root"):
        InfluenceDiagram(("D", "X"), (2, 2), dag, {1: Table((1,), [0.5, 0.5])}, (0,))


def test_influence_decisions_carry_no_cpt():
    dag = DirectedGraph(2, [(0, 1)])
    cpts = {0: Table((0,), [0.5, 0.5]), 1: Table((0, 1), np.full((2, 2), 0.5))}
    with pytest.raises(ModelError):
        InfluenceDiagram(("D", "X"), (2, 2), dag, cpts, (0,))


def test_influence_augmented_graph():
    dag = DirectedGraph(3, [(0, 1)])
    cpts = {1: Table((0, 1), np.full((2, 2), 0.5)), 2: Table((2,), [0.5, 0.5])}
    u = CriterionFunction((Table((1, 2), np.zeros((2, 2))),))
    idg = InfluenceDiagram(("D", "X", "Y"), (2, 2, 2), dag, cpts, (0,), u)
    assert idg.augmented_graph().edges == frozenset({(0, 1), (1, 2)})
    assert idg.chance == (1, 2)
