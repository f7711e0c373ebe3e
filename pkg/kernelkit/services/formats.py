"""
Text formats and JSON codecs.

Line-oriented inputs (one record per line, '#' starts a comment line):

    v <name>
    e <edge-id> <u> <v>                      multigraph / preference files
    a <arc-id> <tail> <head> [<provenance>]  digraph files
    p <vertex> : <edge-id> <edge-id> ...     preference files, most preferred first

Outputs are JSON with rationals rendered as "p/q" strings (integers plain).
"""
import json
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from kernelkit.exceptions import InvalidInput
from kernelkit.models.graph import Arc, Digraph, Edge, Multigraph
from kernelkit.models.linear import LinearSystem, LPResult, Row, as_fraction, format_fraction
from kernelkit.models.preference import PreferenceSystem

KINDS = ('system', 'digraph', 'prefs', 'multigraph')


def _records(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        yield number, line.split()


def _parse_graph_records(text: str, allowed: str) -> tuple:
    vertices, edges, arcs, orders = [], [], [], {}
    for number, tokens in _records(text):
        kind = tokens[0]
        if kind not in allowed:
            raise InvalidInput(f"line {number}: unexpected record '{kind}'")
        if kind == 'v':
            if len(tokens) != 2:
                raise InvalidInput(f"line {number}: expected 'v <name>'")
            vertices.append(tokens[1])
        elif kind == 'e':
            if len(tokens) != 4:
                raise InvalidInput(f"line {number}: expected 'e <edge-id> <u> <v>'")
            edges.append(Edge(tokens[1], tokens[2], tokens[3]))
        elif kind == 'a':
            if len(tokens) not in (4, 5):
                raise InvalidInput(f"line {number}: expected 'a <arc-id> <tail> <head> [<provenance>]'")
            provenance = tokens[4] if len(tokens) == 5 else None
            arcs.append(Arc(tokens[1], tokens[2], tokens[3], provenance))
        elif kind == 'p':
            if len(tokens) < 3 or tokens[2] != ':':
                raise InvalidInput(f"line {number}: expected 'p <vertex> : <edge-id> ...'")
            if tokens[1] in orders:
                raise InvalidInput(f"line {number}: second order for {tokens[1]}")
            orders[tokens[1]] = tuple(tokens[3:])
    return vertices, edges, arcs, orders


def parse_multigraph(text: str) -> Multigraph:
    vertices, edges, _, _ = _parse_graph_records(text, 've')
    return Multigraph(tuple(vertices), tuple(edges))


def parse_digraph(text: str) -> Digraph:
    vertices, _, arcs, _ = _parse_graph_records(text, 'va')
    return Digraph(tuple(vertices), tuple(arcs))


def parse_preferences(text: str) -> PreferenceSystem:
    vertices, edges, _, orders = _parse_graph_records(text, 'vep')
    return PreferenceSystem(Multigraph(tuple(vertices), tuple(edges)), orders)


def parse_order_fragment(text: str) -> dict:
    """Only 'p' records: vertex name -> order tuple."""
    _, _, _, orders = _parse_graph_records(text, 'p')
    return orders


def render_multigraph(H: Multigraph) -> str:
    lines = [f"v {v}" for v in H.vertices]
    lines += [f"e {e.id} {e.u} {e.v}" for e in H.edges]
    return '\n'.join(lines) + '\n'


def render_digraph(D: Digraph) -> str:
    lines = [f"v {v}" for v in D.vertices]
    for arc in D.arcs:
        tail = f" {arc.provenance}" if arc.provenance is not None else ''
        lines.append(f"a {arc.id} {arc.tail} {arc.head}{tail}")
    return '\n'.join(lines) + '\n'


def render_orders(orders: Mapping, vertices: Iterable[str]) -> list:
    return [f"p {v} : {' '.join(orders[v])}" for v in vertices if orders.get(v)]


def render_preferences(PS: PreferenceSystem) -> str:
    body = render_multigraph(PS.graph)
    return body + '\n'.join(render_orders(PS.orders, PS.graph.vertices)) + '\n'


def detect_kind(text: str, name: str = '') -> str:
    """Guess the input kind from the file name, then from the records present."""
    suffix = name.rsplit('.', 1)[-1].lower() if '.' in name else ''
    by_suffix = {'json': 'system', 'dg': 'digraph', 'pref': 'prefs', 'mg': 'multigraph'}
    if suffix in by_suffix:
        return by_suffix[suffix]
    if text.lstrip().startswith('{'):
        return 'system'
    kinds = {tokens[0] for _, tokens in _records(text)}
    if 'p' in kinds:
        return 'prefs'
    if 'a' in kinds:
        return 'digraph'
    return 'multigraph'


def point_to_json(point: Mapping, variables: Optional[Iterable[str]] = None) -> dict:
    """Fractional point as {var: "p/q"} in variable order."""
    keys = list(variables) if variables is not None else list(point)
    return {v: format_fraction(point.get(v, 0)) for v in keys}


def parse_point(text: str) -> dict:
    """JSON object var -> rational (string "p/q" or integer)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"Point is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise InvalidInput("Point must be a JSON object mapping variable ids to rationals")
    return {str(k): as_fraction(v) for k, v in raw.items()}


def system_to_json(sys: LinearSystem) -> dict:
    return {
        'variables': list(sys.variables),
        'rows': [
            {
                'label': row.label,
                'coeffs': {v: format_fraction(row.coeffs[v]) for v in sys.variables if v in row.coeffs},
                'rel': row.rel,
                'rhs': format_fraction(row.rhs),
                **({'family': row.family} if row.family else {}),
            }
            for row in sys.rows
        ],
    }


def system_from_json(data) -> LinearSystem:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"System is not valid JSON: {e}") from None
    try:
        rows = tuple(
            Row(str(row['label']), {str(v): as_fraction(c) for v, c in row['coeffs'].items()},
                row['rel'], as_fraction(row['rhs']), str(row.get('family', '')))
            for row in data['rows']
        )
        return LinearSystem(tuple(str(v) for v in data['variables']), rows)
    except (KeyError, TypeError, AttributeError) as e:
        raise InvalidInput(f"Malformed system JSON: {e}") from None


def lp_result_to_json(result: LPResult, sys: LinearSystem) -> dict:
    body = {'status': result.status, 'sense': result.sense}
    if result.is_optimal:
        body['value'] = format_fraction(result.value)
        body['primal'] = point_to_json(result.primal, sys.variables)
        body['dual'] = {row.label: format_fraction(result.dual.get(row.label, Fraction(0))) for row in sys.rows}
    return body


def dumps(payload) -> str:
    """Deterministic JSON text (insertion order preserved, trailing newline)."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + '\n'


def digraph_from_encoding(encoding: str) -> Digraph:
    """Inverse of Digraph.encoding()."""
    try:
        names, body = encoding.split('|', 1)
        arcs = []
        for item in filter(None, body.split(';')):
            pair, _, provenance = item.partition('@')
            tail, head = pair.split('>', 1)
            arcs.append(Arc(item, tail, head, provenance or None))
    except ValueError:
        raise InvalidInput(f"Malformed digraph encoding: {encoding!r}") from None
    return Digraph(tuple(filter(None, names.split(','))), tuple(arcs))
