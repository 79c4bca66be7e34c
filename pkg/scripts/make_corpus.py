"""Regenerate the example problem files under corpus/ (fixed seeds)."""
from pathlib import Path

import numpy as np

from treecut.generate import (SAMPLE8_SCOPES, SAMPLE8_NAMES, sample8_criterion, sample8_network,
                              random_belief_network, random_constraint_network, random_criterion,
                              random_influence_diagram, random_relation)
from treecut.io import ProblemFile, serialize
from treecut.models import Constraint, ConstraintNetwork, CriterionFunction
from treecut.oracle import oracle_csp

OUT = Path(__file__).resolve().parent.parent / "corpus"


def write(name: str, pf: ProblemFile, header: str) -> None:
    (OUT / name).write_text(f"# {header}\n" + serialize(pf))


def sample8_constraints(rng, tightness=0.3) -> ConstraintNetwork:
    card = (2,) * 8
    while True:
        cons = tuple(Constraint(s, random_relation(rng, s, card, tightness)) for s in SAMPLE8_SCOPES)
        cn = ConstraintNetwork(SAMPLE8_NAMES, card, cons)
        if oracle_csp(cn).consistent:
            return cn


def main() -> None:
    OUT.mkdir(exist_ok=True)
    write("sample8.bn", ProblemFile.from_model(sample8_network(np.random.default_rng(1))),
          "eight-variable example dag, binary, random CPTs")
    write("sample8_k3.bn", ProblemFile.from_model(sample8_network(np.random.default_rng(2), k=3)),
          "eight-variable example dag, ternary, random CPTs")
    cn = sample8_constraints(np.random.default_rng(3))
    write("sample8.csp", ProblemFile.from_model(cn), "constraint network over the example scheme")
    write("sample8_opt.csp", ProblemFile.from_model(cn, sample8_criterion()),
          "example constraint network with criterion a*g + c^2 + 5*d*e*f")
    crit = ProblemFile(cn.names, cn.card, criterion=sample8_criterion())
    text = serialize(crit).split("\n")
    (OUT / "sample8.crit").write_text("# criterion a*g + c^2 + 5*d*e*f\n"
                                       + "\n".join(ln for ln in text if not ln.startswith("var ")))
    for i, seed in enumerate((11, 12, 13)):
        rng = np.random.default_rng(seed)
        write(f"random_bn_{i}.bn", ProblemFile.from_model(random_belief_network(rng, 9)),
              f"random belief network, seed {seed}")
    for i, (seed, t) in enumerate(((21, 0.2), (22, 0.4), (23, 0.6))):
        rng = np.random.default_rng(seed)
        net = random_constraint_network(rng, 10, tightness=t)
        write(f"random_csp_{i}.csp", ProblemFile.from_model(net), f"random constraint network, tightness {t}")
    rng = np.random.default_rng(31)
    net = random_constraint_network(rng, 8, tightness=0.3)
    write("random_opt_0.csp", ProblemFile.from_model(net, random_criterion(rng, net.card, 4)),
          "random constraint optimisation instance")
    for i, seed in enumerate((41, 42)):
        rng = np.random.default_rng(seed)
        write(f"decision_{i}.id", ProblemFile.from_model(random_influence_diagram(rng, 6, 2)),
              f"random influence diagram, seed {seed}")


if __name__ == "__main__":
    main()
