"""Join-tree decompositions with separator-bounded levels, per-cluster
elimination / brute-force / conditioning, and time-space tradeoff reports."""
from .cluster import CostMeter, Strategy
from .csp import SolveOutcome, block_tree, nonseparable_solve, solve
from .decomposition import (Decomposition, DecompositionError, JoinTree, TradeoffReport, cycle_cutset,
                            decompose, tradeoff_report)
from .graph import DirectedGraph, UndirectedGraph, moralize
from .inference import belief, conditioned_network_belief, mpe
from .io import ParseError, ProblemFile, load, parse, serialize
from .models import (BeliefNetwork, Constraint, ConstraintNetwork, CriterionFunction, InfluenceDiagram,
                     ModelError, constraint_check, criterion_value, joint_probability)
from .optimize import meu, optimize
from .tables import Table

__version__ = "0.1.0"

__all__ = [
    "BeliefNetwork", "Constraint", "ConstraintNetwork", "CostMeter", "CriterionFunction", "Decomposition",
    "DecompositionError", "DirectedGraph", "InfluenceDiagram", "JoinTree", "ModelError", "ParseError",
    "ProblemFile", "SolveOutcome", "Strategy", "Table", "TradeoffReport", "UndirectedGraph", "belief",
    "block_tree", "conditioned_network_belief", "constraint_check", "criterion_value", "cycle_cutset",
    "decompose", "joint_probability", "load", "meu", "moralize", "mpe", "nonseparable_solve", "optimize",
    "parse", "serialize", "solve", "tradeoff_report",
]
