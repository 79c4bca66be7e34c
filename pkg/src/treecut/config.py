"""Tolerances, budgets and tie-break helpers shared by the engine and the
enumeration oracle, so cross-checks compare like with like."""

PROB_ATOL = 1e-9
VALUE_TOL = 1e-9
CUTSET_BUDGET = 25
ORACLE_BUDGET = 2 ** 24


def improves(value: float, best: float | None, tol: float = VALUE_TOL) -> bool:
    """True if ``value`` beats ``best`` by more than ``tol`` (relative once
    magnitudes exceed 1). Candidates are scanned in lexicographic order, so
    near-ties keep the earlier, lexicographically smaller candidate."""
    if best is None:
        return True
    return value > best + tol * max(1.0, abs(best))
