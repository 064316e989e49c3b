"""Parallel criterion-based partitioning MOEA for the multiobjective knapsack problem."""
from .momkp import Individual, Instance, evaluate, load_instance, parse_instance, random_individual, repair
from .pareto import Archive, dominates, ideal_of, nondominated_filter, weakly_dominates
from .partition import partition
from .master import RunConfig, run

__all__ = [
    "Archive",
    "Individual",
    "Instance",
    "RunConfig",
    "dominates",
    "evaluate",
    "ideal_of",
    "load_instance",
    "nondominated_filter",
    "parse_instance",
    "partition",
    "random_individual",
    "repair",
    "run",
    "weakly_dominates",
]
