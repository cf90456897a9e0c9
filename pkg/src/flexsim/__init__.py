"""Deterministic SR-MPLS Flexible Algorithm simulator and path controller."""

from .core import Simulator
from .scenario import load_builtin_scenario, load_scenario

__all__ = ["Simulator", "load_scenario", "load_builtin_scenario"]
