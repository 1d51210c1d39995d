# Offloading decision package exports
from .baselines import bm_baseline, cm_baseline, rm_baseline
from .branch_and_bound import (
    SearchNode,
    branch_and_bound,
    full_capacity_options,
    lower_bound,
    quantized_options,
    search,
)
from .candidates import candidate_set
from .decisions import (
    CandidateTask,
    DecisionSet,
    LinkEstimate,
    OffloadDecision,
    OffloadProblem,
    SearchStats,
    feasible,
)
from .oracle import OracleReport, brute_force, feasible_assignments, oracle_check, random_instance

ALGORITHMS = ("bnb", "rm", "cm", "bm")

__all__ = [
    "ALGORITHMS",
    "bm_baseline",
    "cm_baseline",
    "rm_baseline",
    "SearchNode",
    "branch_and_bound",
    "full_capacity_options",
    "lower_bound",
    "quantized_options",
    "search",
    "candidate_set",
    "CandidateTask",
    "DecisionSet",
    "LinkEstimate",
    "OffloadDecision",
    "OffloadProblem",
    "SearchStats",
    "feasible",
    "OracleReport",
    "brute_force",
    "feasible_assignments",
    "oracle_check",
    "random_instance",
]
