"""
Error hierarchy for the toolkit.

Every error is a ValueError subclass carrying structured witness data in
`details`, so the CLI and the HTTP layer can serialize refutations as data.
"""
from typing import Any, Optional


class KernelKitError(ValueError):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict:
        """Serialize for JSON output."""
        return {
            'error': type(self).__name__,
            'message': self.message,
            'details': self.details,
        }


class InvalidInput(KernelKitError):
    """Malformed text input or violated precondition."""


class UnknownVertex(InvalidInput):
    def __init__(self, vertex: Any):
        super().__init__(f"Unknown vertex: {vertex}", {'vertex': str(vertex)})


class UnknownId(InvalidInput):
    def __init__(self, identifier: Any, kind: str = 'id'):
        super().__init__(f"Unknown {kind}: {identifier}", {kind: str(identifier)})


class UnknownEdge(UnknownId):
    def __init__(self, edge: Any):
        super().__init__(edge, kind='edge')


class NotAnEndpoint(InvalidInput):
    def __init__(self, vertex: Any, edge: Any):
        super().__init__(f"{vertex} is not an endpoint of {edge}", {'vertex': str(vertex), 'edge': str(edge)})


class UnknownVariable(UnknownId):
    def __init__(self, variable: Any):
        super().__init__(variable, kind='variable')


class InstanceTooLarge(KernelKitError):
    """An enumeration exceeded its configured budget."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what} exceeds budget of {budget}", {'what': what, 'budget': budget})


class NotCliqueAcyclic(KernelKitError):
    def __init__(self, vertex: Any, cycle: list):
        super().__init__(
            f"Tournament at {vertex} has a directed cycle: {' '.join(map(str, cycle))}",
            {'vertex': str(vertex), 'cycle': [str(c) for c in cycle]},
        )


class AmbiguousAttribution(KernelKitError):
    def __init__(self, arc: Any):
        super().__init__(
            f"Arc {arc} joins edges with two common ends but has no provenance label",
            {'arc': str(arc)},
        )


class IncompleteTournament(KernelKitError):
    def __init__(self, vertex: Any, pair: tuple):
        super().__init__(
            f"No arc attributed to {vertex} between {pair[0]} and {pair[1]}",
            {'vertex': str(vertex), 'pair': [str(p) for p in pair]},
        )


class InvalidTable(KernelKitError):
    """Internal gadget order table is malformed or fails validation."""


class NoValidTable(KernelKitError):
    """The internal order search found no table."""


class NotInFSM(KernelKitError):
    def __init__(self, violated: list):
        super().__init__(
            f"Point violates {len(violated)} row(s): {', '.join(violated[:5])}",
            {'violated': list(violated)},
        )


class ProjectionMismatch(KernelKitError):
    def __init__(self, edge: Any, left: Any, right: Any):
        super().__init__(
            f"Gadget of {edge}: hanging edges disagree ({left} != {right})",
            {'edge': str(edge), 'u_side': str(left), 'v_side': str(right)},
        )


class NotHalfIntegral(KernelKitError):
    def __init__(self, variable: Any, value: Any):
        super().__init__(f"{variable} = {value} is not 1/2-integral", {'variable': str(variable), 'value': str(value)})


class StructureViolation(KernelKitError):
    def __init__(self, reason: str, component: list):
        super().__init__(f"{reason}: {' '.join(map(str, component))}", {'reason': reason, 'component': [str(c) for c in component]})


class OddCycle(KernelKitError):
    def __init__(self, cycle: list):
        super().__init__(f"Odd cycle has no alternating sign pattern: {' '.join(map(str, cycle))}", {'cycle': [str(c) for c in cycle]})


class InconsistentLabeling(KernelKitError):
    def __init__(self, cycle: list, position: int):
        super().__init__(
            f"Cycle {' '.join(map(str, cycle))} breaks cyclic preferences at position {position}",
            {'cycle': [str(c) for c in cycle], 'position': position},
        )


class OddCyclicCycle(KernelKitError):
    def __init__(self, cycle: list, edges: Optional[list] = None):
        details = {'cycle': [str(c) for c in cycle]}
        if edges is not None:
            details['edges'] = [str(e) for e in edges]
        super().__init__(f"Odd cycle with cyclic preferences: {' '.join(map(str, cycle))}", details)


class Degenerate(KernelKitError):
    """No sign pattern of the perturbation vector moves the point."""


class Unbounded(KernelKitError):
    """The polyhedron (or LP) is unbounded."""


class Infeasible(KernelKitError):
    """The polyhedron is empty."""


class CertificateError(KernelKitError):
    """A self-check on a computed certificate failed (internal bug)."""
