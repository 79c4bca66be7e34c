import numpy as np
import pytest

from treecut.cluster import CostMeter
from treecut.decomposition import JoinTree, decompose
from treecut.generate import SAMPLE8_NAMES, sample8_dag, random_belief_network, random_evidence
from treecut.inference import (InferenceError, assign_functions, belief, cluster_message_bruteforce,
                               cluster_message_cutset, cluster_message_elimination, conditioned_network_belief, mpe)
from treecut.graph import CycleError
from treecut.models import BeliefNetwork, joint_probability
from treecut.oracle import oracle_belief, oracle_evidence_probability, oracle_mpe
from treecut.tables import Table

A, B, C, D, E, F, G, H = range(8)
STRATEGIES = ("elim", "brute", "cutset")


def chain(p0, rows):
    n = len(rows) + 1
    return BeliefNetwork.from_parents([f"X{i}" for i in range(n)], [2] * n, {i: [i - 1] for i in range(1, n)},
                                      {0: p0, **{i + 1: r for i, r in enumerate(rows)}})


def test_chain_forward_computation():
    bn = chain([0.6, 0.4], [[[0.7, 0.3], [0.2, 0.8]], [[0.9, 0.1], [0.5, 0.5]]])
    p1 = np.array([0.6 * 0.7 + 0.4 * 0.2, 0.6 * 0.3 + 0.4 * 0.8])
    p2 = np.array([p1[0] * 0.9 + p1[1] * 0.5, p1[0] * 0.1 + p1[1] * 0.5])
    for s, t in decompose(bn.moral_graph()).levels:
        for strat in STRATEGIES:
            assert np.allclose(belief(bn, t, strat, 2).distribution, p2, atol=1e-12)


def test_assign_functions_big_cluster(sample_bn):
    tree = decompose(sample_bn.moral_graph()).level(1)
    cps = assign_functions(sample_bn, tree)
    big = next(cp for cp in cps if len(cp.variables) == 7)
    assert {f.scope for f in big.functions} == {(B, D, G), (B, C), (C, D), (G, F), (D, F, E), (E, F, G, H)}
    assert sum(len(cp.functions) for cp in cps) == 8


def test_single_clique_gets_everything(sample_bn):
    tree = JoinTree((frozenset(range(8)),), (), 0)
    (cp,) = assign_functions(sample_bn, tree)
    assert len(cp.functions) == 8


@pytest.mark.parametrize("seed", range(10))
def test_every_cpt_placed_once(seed):
    rng = np.random.default_rng(seed)
    bn = random_belief_network(rng, 9)
    for _, t in decompose(bn.moral_graph()).levels:
        cps = assign_functions(bn, t)
        scopes = sorted(f.scope for cp in cps for f in cp.functions)
        assert scopes == sorted(c.scope for c in bn.cpts)
        for cp in cps:
            assert all(set(f.scope) <= cp.variables for f in cp.functions)


def test_sample8_nine_posteriors_agree(sample_bn):
    ev = {H: 1, C: 0}
    truth = oracle_belief(sample_bn, A, ev)
    for _, t in decompose(sample_bn.moral_graph()).levels:
        for strat in STRATEGIES:
            post = belief(sample_bn, t, strat, A, ev)
            assert np.max(np.abs(post.distribution - truth)) <= 1e-9
            assert post.distribution.sum() == pytest.approx(1.0, abs=1e-9)


def deterministic_network():
    # A ~ (0.5, 0.5); B = A; C = not B
    return BeliefNetwork.from_parents(["A", "B", "C"], [2, 2, 2], {1: [0], 2: [1]},
                                      {0: [0.5, 0.5], 1: [[1, 0], [0, 1]], 2: [[0, 1], [1, 0]]})


def test_impossible_evidence():
    bn = deterministic_network()
    t = decompose(bn.moral_graph()).level()
    for strat in STRATEGIES:
        post = belief(bn, t, strat, 0, {1: 0, 2: 0})
        assert post.impossible and post.distribution is None
        assert mpe(bn, t, strat, {1: 1, 2: 1}).impossible


def test_query_in_evidence_rejected(sample_bn):
    with pytest.raises(InferenceError):
        belief(sample_bn, decompose(sample_bn.moral_graph()).level(), "elim", A, {A: 0})


def test_mpe_deterministic_unique():
    bn = deterministic_network()
    t = decompose(bn.moral_graph()).level()
    for strat in STRATEGIES:
        res = mpe(bn, t, strat, {2: 0})
        assert res.assignment == {0: 1, 1: 1, 2: 0}
        assert res.probability == pytest.approx(0.5)


def test_mpe_uniform_takes_smallest():
    dag = sample8_dag()
    cpts = tuple(Table((*dag.parents(v), v), np.full((2,) * (len(dag.parents(v)) + 1), 0.5)) for v in range(8))
    bn = BeliefNetwork(SAMPLE8_NAMES, (2,) * 8, dag, cpts)
    for _, t in decompose(bn.moral_graph()).levels:
        for strat in STRATEGIES:
            assert mpe(bn, t, strat).assignment == dict.fromkeys(range(8), 0)


@pytest.mark.parametrize("seed", range(6))
def test_mpe_random_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    bn = random_belief_network(rng, 8)
    ev = random_evidence(rng, bn.card)
    _, best = oracle_mpe(bn, ev)
    for _, t in decompose(bn.moral_graph()).levels:
        for strat in STRATEGIES:
            res = mpe(bn, t, strat, ev)
            assert abs(res.probability - best) <= 1e-12
            assert joint_probability(bn, res.assignment) == res.probability
            assert all(res.assignment[v] == x for v, x in ev.items())


def test_conditioned_network_belief_sums_to_evidence(sample_bn):
    ev = {H: 1}
    cut = (D, G, E)
    weights = []
    for vals in np.ndindex(2, 2, 2):
        w = conditioned_network_belief(sample_bn, dict(zip(cut, map(int, vals))), ev)
        assert 0.0 <= w <= 1.0
        weights.append(w)
    assert sum(weights) == pytest.approx(oracle_evidence_probability(sample_bn, ev), abs=1e-12)


def test_conditioned_network_empty_cutset_tree():
    bn = chain([0.6, 0.4], [[[0.7, 0.3], [0.2, 0.8]]])
    m = CostMeter()
    assert conditioned_network_belief(bn, {}, {1: 1}, m) == pytest.approx(0.6 * 0.3 + 0.4 * 0.8)
    assert m.scratch_arity <= 2


def test_conditioned_network_rejects_cyclic_residual(sample_bn):
    with pytest.raises(CycleError):
        conditioned_network_belief(sample_bn, {D: 0})


def test_cluster_message_wrappers_agree(sample_bn):
    tree = decompose(sample_bn.moral_graph()).level(1)
    cp = next(cp for cp in assign_functions(sample_bn, tree, {H: 0}) if len(cp.variables) == 7)
    a = cluster_message_elimination(cp)
    assert a.allclose(cluster_message_bruteforce(cp), 1e-12)
    assert a.allclose(cluster_message_cutset(cp), 1e-12)
    assert a.allclose(cluster_message_cutset(cp, (D, G, E)), 1e-12)


def test_space_law_on_sample8(sample_bn):
    for s, t in decompose(sample_bn.moral_graph()).levels:
        post = belief(sample_bn, t, "brute", A, {H: 1})
        assert post.meter.total_entries <= (len(t.edges) + 1) * 2 ** s
        assert belief(sample_bn, t, "cutset", A, {H: 1}).meter.scratch_arity <= 2
