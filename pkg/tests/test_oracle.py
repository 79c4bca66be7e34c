import numpy as np
import pytest

from treecut.generate import random_belief_network
from treecut.models import BeliefNetwork, ConstraintNetwork
from treecut.oracle import (OracleBudgetExceeded, joint_assignments, oracle_belief, oracle_csp,
                            oracle_evidence_probability, oracle_mpe)


def test_enumeration_order_and_size():
    xs = list(joint_assignments((2, 3)))
    assert len(xs) == 6
    assert xs[:3] == [(0, 0), (0, 1), (0, 2)]
    assert list(joint_assignments((2, 2), {0: 1})) == [(1, 0), (1, 1)]


def test_budget_refusal_reports_size():
    with pytest.raises(OracleBudgetExceeded) as info:
        joint_assignments((3,) * 20, budget=1000)
    assert info.value.size == 3 ** 20


def test_one_variable_prior():
    bn = BeliefNetwork.from_parents(["A"], [3], {}, {0: [0.2, 0.3, 0.5]})
    assert np.allclose(oracle_belief(bn, 0), [0.2, 0.3, 0.5])


def test_empty_csp_counts_everything():
    truth = oracle_csp(ConstraintNetwork(("A", "B", "C"), (2, 3, 3)))
    assert truth.count == 18 and truth.first_solution == {0: 0, 1: 0, 2: 0}


def test_deterministic_mpe():
    bn = BeliefNetwork.from_parents(["A", "B"], [2, 2], {1: [0]}, {0: [0.0, 1.0], 1: [[1, 0], [0, 1]]})
    x, p = oracle_mpe(bn)
    assert x == {0: 1, 1: 1} and p == 1.0


def test_joint_sums_to_one(rng):
    bn = random_belief_network(rng, 7)
    assert oracle_evidence_probability(bn) == pytest.approx(1.0, abs=1e-12)


def test_impossible_evidence_is_none():
    bn = BeliefNetwork.from_parents(["A", "B"], [2, 2], {1: [0]}, {0: [0.5, 0.5], 1: [[1, 0], [1, 0]]})
    assert oracle_belief(bn, 0, {1: 1}) is None
    assert oracle_mpe(bn, {1: 1}) == (None, 0.0)
