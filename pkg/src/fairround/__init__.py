"""Pareto-efficient allocations of goods and chores that are fair up to one object."""
from .core import (
    ConsumptionGraph,
    Cycle,
    DiscreteAllocation,
    FractionalAllocation,
    Instance,
    PreconditionError,
    StructuralError,
    build_consumption_graph,
    strongly_dominates,
    utilities,
    utility,
    weakly_dominates,
)
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"
