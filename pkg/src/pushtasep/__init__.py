"""Verification lab for the site-inhomogeneous multispecies PushTASEP on a ring."""

from .dynamics import apply_bell, build_generator, exact_stationary, stationary_distribution
from .multiline import MultilineDiagram, asep_value, partition_function, project
from .states import ColorMap, Content

__all__ = [
    "ColorMap",
    "Content",
    "MultilineDiagram",
    "apply_bell",
    "asep_value",
    "build_generator",
    "exact_stationary",
    "partition_function",
    "project",
    "stationary_distribution",
]
