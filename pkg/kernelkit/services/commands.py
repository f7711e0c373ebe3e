"""
Command handlers shared by the CLI and the HTTP API.

Each handler takes text sources and options and returns a CommandResult
carrying an exit code (0 true, 1 false, 2 input error, 3 budget exceeded),
a JSON payload and a plain-text rendering. Negative verdicts always carry a
certificate that `check-certificate` re-validates.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional

from kernelkit.config import budget_cap, settings
from kernelkit.exceptions import (
    InstanceTooLarge,
    InvalidInput,
    KernelKitError,
    OddCyclicCycle,
    UnknownId,
)
from kernelkit.models.linear import LinearSystem, as_fraction, format_fraction, point_is_integral
from kernelkit.models.preference import PreferenceCycle
from kernelkit.services import formats
from kernelkit.services.bridge import (
    find_cyclic_preference_cycles,
    is_cyclic_preference_cycle,
    is_good,
    orientation_from_prefs,
    prefs_from_orientation,
    replay_goodness_certificate,
)
from kernelkit.services.gadget import (
    InternalOrderTable,
    derive_internal_orders,
    expand,
    lift_point,
    load_default_table,
    project_point,
)
from kernelkit.services.graphcore import build_line_multigraph, induced_subdigraph
from kernelkit.services.oracles import (
    TheoremVerifier,
    enumerate_kernels,
    has_kernel,
    is_kernel_perfect,
    verify_half_tdi,
    verify_main_theorem,
)
from kernelkit.services.polyhedra import (
    build_pi,
    build_sigma,
    check_integrality,
    check_tdi,
    check_tdi_objective,
    enumerate_vertices,
    fm_eliminate_sequence,
    solve_lp_exact,
)
from kernelkit.services.stable import enumerate_stable_matchings, half_integral_decomposition, perturb_and_round
from kernelkit.services.vertices import is_vertex

logger = logging.getLogger(__name__)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class Source:
    """One text input; `name` is a file name or an API field name."""
    name: str
    text: str

    @property
    def kind(self) -> str:
        return formats.detect_kind(self.text, self.name)


@dataclass
class CommandResult:
    exit_code: int
    payload: Dict = field(default_factory=dict)
    text: str = ''

    @property
    def verdict(self) -> Optional[bool]:
        return {EXIT_TRUE: True, EXIT_FALSE: False}.get(self.exit_code)


@dataclass(frozen=True)
class Command:
    name: str
    slots: tuple
    handler: Callable
    help: str = ''

    @property
    def variadic(self) -> bool:
        """Trailing slot ending in '*' takes zero or more inputs."""
        return bool(self.slots) and self.slots[-1].endswith('*')


COMMANDS: Dict[str, Command] = {}


def command(name: str, *slots: str, help: str = ''):
    """Register a handler under `name` with its input slots ('x*' = zero or more)."""
    def register(handler: Callable) -> Callable:
        COMMANDS[name] = Command(name, slots, handler, help)
        return handler
    return register


def run_command(name: str, sources: List[Source], options: Optional[Mapping] = None) -> CommandResult:
    """
    Dispatch a command with budget handling and error mapping.

    Raises:
        UnknownId: If the command does not exist
    """
    if name not in COMMANDS:
        raise UnknownId(name, kind='command')
    spec = COMMANDS[name]
    options = dict(options or {})
    try:
        budget = None if options.get('budget') is None else int(options['budget'])
        required = len(spec.slots) - (1 if spec.variadic else 0)
        if len(sources) < required:
            raise InvalidInput(f"{name} expects inputs: {' '.join(spec.slots)}")
        if not spec.variadic and len(sources) > len(spec.slots):
            raise InvalidInput(f"{name} expects inputs: {' '.join(spec.slots)}")
        with budget_cap(budget):
            return spec.handler(sources, options)
    except InstanceTooLarge as e:
        logger.warning("[Budget] %s", e.message)
        return CommandResult(EXIT_BUDGET, e.to_dict(), f"budget exceeded: {e.message}\n")
    except KernelKitError as e:
        return CommandResult(EXIT_INPUT, e.to_dict(), f"error: {e.message}\n")
    except ValueError as e:
        return CommandResult(EXIT_INPUT, {'error': 'InvalidInput', 'message': str(e), 'details': {}}, f"error: {e}\n")


def _k(options: Mapping) -> int:
    k = 1 if options.get('k') is None else int(options['k'])
    if k < 1:
        raise InvalidInput("--k must be a positive integer")
    return k


def _cbound(options: Mapping) -> int:
    bound = settings.tdi_c_bound if options.get('cbound') is None else int(options['cbound'])
    if bound < 1:
        raise InvalidInput("--cbound must be a positive integer")
    return bound


def _table(options: Mapping) -> InternalOrderTable:
    text = options.get('table')
    return InternalOrderTable.from_text(text) if text else load_default_table()


def _system(source: Source) -> LinearSystem:
    kind = source.kind
    if kind == 'system':
        return formats.system_from_json(source.text)
    if kind == 'digraph':
        return build_sigma(formats.parse_digraph(source.text))
    if kind == 'prefs':
        return build_pi(formats.parse_preferences(source.text))
    raise InvalidInput(f"{source.name}: expected a system, digraph or preference file")


def _digraph(source: Source):
    """Digraph input; preference files are turned into their orientation."""
    if source.kind == 'prefs':
        return orientation_from_prefs(formats.parse_preferences(source.text))
    return formats.parse_digraph(source.text)


def _row(point: Mapping, variables) -> str:
    return '(' + ', '.join(format_fraction(point.get(v, 0)) for v in variables) + ')'


def _verdict(ok: bool, payload: dict, text: str) -> CommandResult:
    return CommandResult(EXIT_TRUE if ok else EXIT_FALSE, payload, text)


@command('good', 'digraph', help='Check clique-acyclicity and chords of odd cycles')
def _good(sources, options):
    D = _digraph(sources[0])
    report = is_good(D)
    text = 'good\n' if report.is_good else f"not good ({report.verdict}): {' '.join(report.certificate['cycle'])}\n"
    return _verdict(report.is_good, report.model_dump(), text)


@command('kernel', 'digraph', help='First kernel, or none')
def _kernel(sources, options):
    D = _digraph(sources[0])
    kernels = enumerate_kernels(D)
    if not kernels:
        certificate = {'kind': 'kernel_free_subset', 'subset': list(D.vertices)}
        return _verdict(False, {'kernel': None, 'certificate': certificate}, 'none\n')
    return _verdict(True, {'kernel': kernels[0]}, ' '.join(kernels[0]) + '\n')


@command('kernels', 'digraph', help='All kernels')
def _kernels(sources, options):
    D = _digraph(sources[0])
    kernels = enumerate_kernels(D)
    payload = {'kernels': kernels}
    if not kernels:
        payload['certificate'] = {'kind': 'kernel_free_subset', 'subset': list(D.vertices)}
    text = ''.join('{' + ' '.join(U) + '}\n' for U in kernels) or 'none\n'
    return _verdict(bool(kernels), payload, text)


@command('kernel-perfect', 'digraph', help='Check that every induced subdigraph has a kernel')
def _kernel_perfect(sources, options):
    D = _digraph(sources[0])
    ok, witness = is_kernel_perfect(D)
    payload = {'kernel_perfect': ok}
    if not ok:
        payload['certificate'] = {'kind': 'kernel_free_subset', 'subset': witness}
        return _verdict(False, payload, f"not kernel perfect: {{{' '.join(witness)}}} has no kernel\n")
    return _verdict(True, payload, 'kernel perfect\n')


@command('linegraph', 'multigraph', help='Line multigraph of a root')
def _linegraph(sources, options):
    L = build_line_multigraph(formats.parse_multigraph(sources[0].text))
    payload = {
        'vertices': list(L.vertices),
        'edges': [{'id': e.id, 'u': e.u, 'v': e.v, 'at': e.label} for e in L.edges],
    }
    return CommandResult(EXIT_TRUE, payload, formats.render_multigraph(L))


@command('to-prefs', 'multigraph', 'digraph', help='Preference system encoded by an orientation')
def _to_prefs(sources, options):
    H = formats.parse_multigraph(sources[0].text)
    PS = prefs_from_orientation(H, formats.parse_digraph(sources[1].text))
    payload = {'orders': {v: list(order) for v, order in PS.orders.items()}}
    return CommandResult(EXIT_TRUE, payload, formats.render_preferences(PS))


@command('to-digraph', 'prefs', help='Orientation of the line multigraph')
def _to_digraph(sources, options):
    D = orientation_from_prefs(formats.parse_preferences(sources[0].text))
    payload = {'vertices': list(D.vertices), 'arcs': [[a.tail, a.head, a.provenance] for a in D.arcs]}
    return CommandResult(EXIT_TRUE, payload, formats.render_digraph(D))


@command('expand', 'prefs', help='Replace parallel edges by gadgets')
def _expand(sources, options):
    exp = expand(formats.parse_preferences(sources[0].text), _table(options))
    payload = {
        'replaced': list(exp.replaced),
        'vertices': len(exp.expanded.graph.vertices),
        'edges': len(exp.expanded.graph.edges),
        'orders': {v: list(order) for v, order in exp.expanded.orders.items()},
    }
    return CommandResult(EXIT_TRUE, payload, formats.render_preferences(exp.expanded))


def _vertex_listing(sys: LinearSystem) -> CommandResult:
    vertices = enumerate_vertices(sys)
    payload = {
        'variables': list(sys.variables),
        'vertices': [formats.point_to_json(p, sys.variables) for p in vertices],
    }
    header = '# ' + ' '.join(sys.variables) + '\n'
    return CommandResult(EXIT_TRUE, payload, header + ''.join(_row(p, sys.variables) + '\n' for p in vertices))


@command('fk-vertices', 'digraph', help='Vertices of the fractional kernel polytope')
def _fk_vertices(sources, options):
    return _vertex_listing(build_sigma(_digraph(sources[0])))


@command('fsm-vertices', 'prefs', help='Vertices of the fractional stable matching polytope')
def _fsm_vertices(sources, options):
    return _vertex_listing(build_pi(formats.parse_preferences(sources[0].text)))


@command('integral', 'polyhedron', help='Check 1/k-integrality of every vertex')
def _integral(sources, options):
    sys = _system(sources[0])
    k = _k(options)
    report = check_integrality(sys, k)
    payload = report.model_dump()
    if report.integral:
        return _verdict(True, payload, f"1/{k}-integral ({report.vertex_count} vertices)\n")
    payload['certificate'] = {'kind': 'nonintegral_vertex', 'k': k, 'vertex': report.witness}
    return _verdict(False, payload, f"not 1/{k}-integral: {_row(report.witness, sys.variables)}\n")


@command('tdi', 'polyhedron', help='Bounded TDI/k check')
def _tdi(sources, options):
    sys = _system(sources[0])
    k, bound = _k(options), _cbound(options)
    report = check_tdi(sys, k, bound, stop_at_first=True)
    payload = report.model_dump()
    if report.passed:
        return _verdict(True, payload, f"TDI/{k} on box {bound}: pass ({report.objectives_checked} objectives)\n")
    failure = report.failures[0]
    payload['certificate'] = {'kind': 'tdi_objective', 'k': k, 'objective': failure.objective}
    objective = ' '.join(f"{v}={c}" for v, c in failure.objective.items())
    return _verdict(False, payload, f"TDI/{k} on box {bound}: fail at {objective} ({failure.reason})\n")


@command('lp', 'polyhedron', 'objective', help='Exact LP optimum with a dual certificate')
def _lp(sources, options):
    sys = _system(sources[0])
    sense = options.get('sense') or 'max'
    result = solve_lp_exact(sys, formats.parse_point(sources[1].text), sense)
    payload = formats.lp_result_to_json(result, sys)
    if not result.is_optimal:
        return CommandResult(EXIT_TRUE, payload, f"{result.status}\n")
    text = f"{sense} = {format_fraction(result.value)} at {_row(result.primal, sys.variables)}\n"
    return CommandResult(EXIT_TRUE, payload, text)


@command('fm', 'system', help='Fourier-Motzkin elimination in the given order')
def _fm(sources, options):
    sys = _system(sources[0])
    order = options.get('order') or []
    if isinstance(order, str):
        order = [v for v in order.split(',') if v]
    reduced = fm_eliminate_sequence(sys, order)
    text = ''.join(f"{row.label}: {row.describe()}\n" for row in reduced.rows)
    return CommandResult(EXIT_TRUE, formats.system_to_json(reduced), text)


@command('lift', 'prefs', 'point', help='Lift an FSM point through the gadget expansion')
def _lift(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    exp = expand(PS, _table(options))
    lifted = lift_point(formats.parse_point(sources[1].text), exp)
    payload = formats.point_to_json(lifted, exp.expanded.edge_ids)
    return CommandResult(EXIT_TRUE, payload, formats.dumps(payload))


@command('project', 'prefs', 'point', help='Project a point of the expansion back')
def _project(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    exp = expand(PS, _table(options))
    projected = project_point(formats.parse_point(sources[1].text), exp)
    payload = formats.point_to_json(projected, PS.edge_ids)
    return CommandResult(EXIT_TRUE, payload, formats.dumps(payload))


@command('round', 'prefs', 'point', help='Round a half-integral FSM point to a stable matching')
def _round(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    try:
        point = perturb_and_round(PS, formats.parse_point(sources[1].text))
    except OddCyclicCycle as e:
        certificate = {'kind': 'odd_cyclic_cycle', 'vertices': e.details['cycle'], 'edges': e.details.get('edges', [])}
        return _verdict(False, {**e.to_dict(), 'certificate': certificate}, f"cannot round: {e.message}\n")
    matching = [e for e in PS.edge_ids if point[e] == 1]
    payload = {'point': formats.point_to_json(point, PS.edge_ids), 'matching': matching}
    return _verdict(True, payload, ' '.join(matching) + '\n')


@command('decompose', 'prefs', 'point', help='Cycles of the half-valued edges of an FSM point')
def _decompose(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    cycles = half_integral_decomposition(PS, formats.parse_point(sources[1].text))
    payload = {'cycles': [c.to_dict() for c in cycles]}
    text = ''.join(f"{c.parity}: {' '.join(c.edges)}\n" for c in cycles) or 'integral\n'
    return CommandResult(EXIT_TRUE, payload, text)


@command('cyclic-cycles', 'prefs', help='Cycles with cyclic preferences')
def _cyclic_cycles(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    cycles = find_cyclic_preference_cycles(PS, options.get('parity'))
    payload = {'cycles': [c.to_dict() for c in cycles]}
    text = ''.join(f"{c.parity}: {' '.join(c.edges)}\n" for c in cycles) or 'none\n'
    return CommandResult(EXIT_TRUE, payload, text)


@command('stable', 'prefs', help='All stable matchings')
def _stable(sources, options):
    PS = formats.parse_preferences(sources[0].text)
    matchings = enumerate_stable_matchings(PS)
    ordered = [[e for e in PS.edge_ids if e in M] for M in matchings]
    payload = {'stable_matchings': ordered}
    if not matchings:
        payload['certificate'] = {'kind': 'kernel_free_subset', 'subset': list(PS.edge_ids)}
    text = ''.join('{' + ' '.join(M) + '}\n' for M in ordered) or 'none\n'
    return _verdict(bool(matchings), payload, text)


@command('derive-table', 'prefs', 'prefs*', help='Search the internal gadget orders')
def _derive_table(sources, options):
    corpus = [formats.parse_preferences(source.text) for source in sources]
    tables = derive_internal_orders(corpus)
    payload = {'count': len(tables), 'tables': [table.to_text() for table in tables]}
    return CommandResult(EXIT_TRUE, payload, tables[0].to_text())


@command('corollaries', 'prefs', help='Half-integrality and TDI/2 corollaries')
def _corollaries(sources, options):
    report = verify_half_tdi(formats.parse_preferences(sources[0].text), _cbound(options))
    payload = {**report.model_dump(), 'holds': report.holds}
    text = ''.join(f"{key:<24}{value}\n" for key, value in payload.items())
    return _verdict(report.holds, payload, text)


def _summary_table(counts: Mapping) -> str:
    width = max([len('verdicts')] + [len(key) for key in counts])
    lines = [f"{'verdicts':<{width}}  count"]
    lines += [f"{key:<{width}}  {count:>5}" for key, count in counts.items()]
    return '\n'.join(lines) + '\n'


@command('verify', 'multigraph', help='Equivalence sweep over the orientations of L(root)')
def _verify(sources, options):
    H = formats.parse_multigraph(sources[0].text)
    bound = _cbound(options)
    report = verify_main_theorem(H, bound)
    payload = {**report.model_dump(), 'summary': report.summary()}
    text = _summary_table(report.summary())
    if report.violations:
        encoding = report.violations[0].split(': ', 1)[0]
        payload['certificate'] = {'kind': 'theorem_violation', 'encoding': encoding, 'c_bound': bound}
        text += ''.join(f"violation: {line}\n" for line in report.violations)
        return _verdict(False, payload, text)
    return _verdict(True, payload, text + 'no violations\n')


def _check_kernel_free(certificate: dict, inputs: List[Source]) -> bool:
    D = _digraph(_require(inputs, 'digraph'))
    subset = [str(v) for v in certificate.get('subset', [])]
    if not subset or any(v not in D.vertex_index for v in subset):
        return False
    return not has_kernel(induced_subdigraph(D, subset))


def _require(inputs: List[Source], what: str) -> Source:
    if not inputs:
        raise InvalidInput(f"certificate check needs a {what} input")
    return inputs[0]


def _check_nonintegral(certificate: dict, inputs: List[Source]) -> bool:
    sys = _system(_require(inputs, 'system'))
    point = {v: as_fraction(value) for v, value in certificate.get('vertex', {}).items()}
    k = int(certificate.get('k', 1))
    return set(point) == set(sys.variables) and is_vertex(sys, point) and not point_is_integral(point, k)


def _check_tdi_objective(certificate: dict, inputs: List[Source]) -> bool:
    sys = _system(_require(inputs, 'system'))
    objective = {str(v): int(c) for v, c in certificate.get('objective', {}).items()}
    if any(v not in sys.variables for v in objective):
        return False
    return check_tdi_objective(sys, int(certificate.get('k', 1)), objective) is not None


def _check_odd_cyclic(certificate: dict, inputs: List[Source]) -> bool:
    PS = formats.parse_preferences(_require(inputs, 'preference').text)
    cycle = PreferenceCycle(tuple(certificate.get('vertices', [])), tuple(certificate.get('edges', [])))
    return len(cycle) % 2 == 1 and is_cyclic_preference_cycle(PS, cycle)


def _check_theorem_violation(certificate: dict, inputs: List[Source]) -> bool:
    D = formats.digraph_from_encoding(str(certificate.get('encoding', '')))
    verifier = TheoremVerifier(int(certificate.get('c_bound') or settings.tdi_c_bound))
    goodness = is_good(D)
    verdict = verifier.orientation_verdict(D, 'raw', goodness=goodness)
    return bool(verifier.violations(D, verdict, goodness))


CERTIFICATE_CHECKS = {
    'clique_cycle': lambda cert, inputs: replay_goodness_certificate(_digraph(_require(inputs, 'digraph')), cert),
    'chordless_odd_cycle': lambda cert, inputs: replay_goodness_certificate(_digraph(_require(inputs, 'digraph')), cert),
    'kernel_free_subset': _check_kernel_free,
    'nonintegral_vertex': _check_nonintegral,
    'tdi_objective': _check_tdi_objective,
    'odd_cyclic_cycle': _check_odd_cyclic,
    'theorem_violation': _check_theorem_violation,
}


def _certificate_from(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"Certificate is not valid JSON: {e}") from None
    if isinstance(data, dict) and isinstance(data.get('certificate'), dict):
        data = data['certificate']
    if not isinstance(data, dict) or data.get('kind') not in CERTIFICATE_CHECKS:
        raise InvalidInput(f"Unknown certificate kind; expected one of {', '.join(CERTIFICATE_CHECKS)}")
    return data


@command('check-certificate', 'certificate', 'inputs*', help='Re-validate a certificate')
def _check_certificate(sources, options):
    certificate = _certificate_from(sources[0].text)
    holds = CERTIFICATE_CHECKS[certificate['kind']](certificate, list(sources[1:]))
    payload = {'kind': certificate['kind'], 'holds': holds}
    return _verdict(holds, payload, f"{certificate['kind']}: {'holds' if holds else 'does not hold'}\n")
