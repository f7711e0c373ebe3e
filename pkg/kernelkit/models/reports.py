"""
Report models returned by verdict-producing operations.

All reports are pydantic models so the CLI and HTTP layer can serialize them
directly with model_dump().
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class GoodnessReport(BaseModel):
    """Outcome of the goodness check; certificate is empty on `good`."""
    verdict: Literal['good', 'not_clique_acyclic', 'chordless_odd_cycle']
    certificate: Optional[Dict[str, Any]] = None

    @property
    def is_good(self) -> bool:
        return self.verdict == 'good'


class IntegralityReport(BaseModel):
    k: int
    integral: bool
    vertex_count: int
    witness: Optional[Dict[str, str]] = None


class TdiFailure(BaseModel):
    objective: Dict[str, int]
    optimum: str
    reason: str


class TdiReport(BaseModel):
    """
    Bounded total dual 1/k-integrality evidence.

    `passed` means no violation exists for any objective inside the box;
    every listed failure is a genuine refutation.
    """
    k: int
    c_bound: int
    objectives_checked: int
    passed: bool
    failures: List[TdiFailure] = Field(default_factory=list)
    evidence: str = 'bounded'


class OrientationVerdict(BaseModel):
    encoding: str
    source: Literal['prefs', 'raw']
    preferences: Optional[Dict[str, List[str]]] = None
    good: bool
    kernel_perfect: bool
    kernel_ideal: bool
    tdi: Literal['pass', 'fail', 'implied_fail']
    goodness_certificate: Optional[Dict[str, Any]] = None
    kernel_free_subset: Optional[List[str]] = None
    nonintegral_subset: Optional[List[str]] = None
    nonintegral_vertex: Optional[Dict[str, str]] = None
    tdi_subset: Optional[List[str]] = None
    tdi_objective: Optional[Dict[str, int]] = None

    @property
    def consistent(self) -> bool:
        verdicts = {self.good, self.kernel_perfect, self.kernel_ideal}
        if len(verdicts) != 1:
            return False
        return (self.tdi == 'pass') == self.good


class TheoremReport(BaseModel):
    """Equivalence sweep over the orientations of one line multigraph."""
    root: str
    tdi_c_bound: int
    tdi_evidence: str = 'bounded'
    orientations: List[OrientationVerdict] = Field(default_factory=list)
    violations: List[str] = Field(default_factory=list)

    def summary(self) -> Dict[str, int]:
        """Counts per verdict combination (good, kp, ki, tdi)."""
        counts: Dict[str, int] = {}
        for item in self.orientations:
            key = '/'.join([
                'good' if item.good else 'bad',
                'kp' if item.kernel_perfect else 'not-kp',
                'ki' if item.kernel_ideal else 'not-ki',
                item.tdi,
            ])
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))


class CorollaryReport(BaseModel):
    """Half-integrality and TDI/2 corollaries for one preference system."""
    simple: bool
    bipartite: bool
    fsm_half_integral: bool
    fsm_integral: bool
    pi_tdi_half: bool
    pi_tdi: bool
    tdi_iff_integral: bool
    sigma_checked: bool = False
    sigma_empty: bool = False
    sigma_tdi_half: Optional[bool] = None
    sigma_tdi_iff_integral: Optional[bool] = None
    rothblum_holds: Optional[bool] = None
    c_bound: int

    @property
    def holds(self) -> bool:
        checks = [self.fsm_half_integral, self.pi_tdi_half, self.tdi_iff_integral]
        if self.sigma_checked:
            checks += [bool(self.sigma_tdi_half), bool(self.sigma_tdi_iff_integral)]
        if self.rothblum_holds is not None:
            checks.append(self.rothblum_holds)
        return all(checks)
