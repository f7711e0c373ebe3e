"""Domain types: graphs, preference systems, linear systems and reports."""
from kernelkit.models.graph import Arc, Digraph, Edge, Multigraph
from kernelkit.models.linear import LinearSystem, LPResult, Row
from kernelkit.models.preference import PreferenceCycle, PreferenceSystem

__all__ = [
    "Arc",
    "Digraph",
    "Edge",
    "Multigraph",
    "LinearSystem",
    "LPResult",
    "Row",
    "PreferenceCycle",
    "PreferenceSystem",
]
