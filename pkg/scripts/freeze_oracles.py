"""Freeze enumeration answers for the corpus into tests/data/frozen_oracles.json."""
import json
from pathlib import Path

from treecut.io import load
from treecut.oracle import oracle_belief, oracle_csp, oracle_meu, oracle_mpe, oracle_opt

ROOT = Path(__file__).resolve().parent.parent
EVIDENCE = {"sample8.bn": {"H": 1, "C": 0}, "sample8_k3.bn": {"E": 2}}


def main() -> None:
    frozen = {}
    for path in sorted((ROOT / "corpus").iterdir()):
        if path.suffix == ".crit":
            continue
        pf = load(path)
        entry: dict = {"kind": pf.kind}
        if pf.kind == "belief":
            bn = pf.belief_network()
            ev_names = EVIDENCE.get(path.name, {})
            ev = {pf.names.index(k): v for k, v in ev_names.items()}
            entry["evidence"] = ev_names
            entry["posteriors"] = {pf.names[q]: oracle_belief(bn, q, ev).tolist()
                                   for q in range(pf.n) if q not in ev}
            x, p = oracle_mpe(bn, ev)
            entry["mpe"] = {"probability": p, "assignment": [x[v] for v in range(pf.n)]}
        elif pf.kind == "constraint":
            truth = oracle_csp(pf.constraint_network())
            entry["consistent"], entry["count"] = truth.consistent, truth.count
            if pf.criterion.components:
                o = oracle_opt(pf.constraint_network(), pf.criterion)
                entry["optimum"] = o.value if o.consistent else None
        else:
            m = oracle_meu(pf.influence_diagram())
            entry["meu"] = m.expected_utility
            entry["decisions"] = {pf.names[d]: x for d, x in m.decisions.items()}
        frozen[path.name] = entry
    (ROOT / "tests" / "data" / "frozen_oracles.json").write_text(json.dumps(frozen, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
