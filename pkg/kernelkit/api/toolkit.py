"""
Toolkit endpoints: every CLI command over HTTP.

Inputs travel as text fields of the JSON body instead of file paths.
"""
import json

from flask import Blueprint, jsonify, request

from kernelkit.services.commands import COMMANDS, EXIT_BUDGET, EXIT_INPUT, Source, run_command

toolkit_bp = Blueprint('toolkit', __name__, url_prefix='/api/v1/toolkit')

# body fields accepted for each input slot, first match wins
SLOT_FIELDS = {
    'digraph': ('digraph', 'prefs'),
    'prefs': ('prefs',),
    'multigraph': ('multigraph',),
    'point': ('point',),
    'objective': ('objective',),
    'system': ('system',),
    'polyhedron': ('system', 'digraph', 'prefs'),
    'certificate': ('certificate',),
    'prefs*': ('corpus',),
    'inputs*': ('inputs',),
}

FIELD_SUFFIX = {
    'digraph': '.dg',
    'prefs': '.pref',
    'multigraph': '.mg',
    'point': '.json',
    'objective': '.json',
    'system': '.json',
    'certificate': '.json',
    'corpus': '.pref',
    'inputs': '',
}

OPTION_FIELDS = ('k', 'cbound', 'order', 'parity', 'table', 'budget', 'sense')


def _as_text(value) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _sources(slots: tuple, data: dict) -> list:
    sources = []
    for slot in slots:
        field = next((name for name in SLOT_FIELDS[slot] if name in data), None)
        if field is None:
            continue
        if slot.endswith('*'):
            values = data[field] if isinstance(data[field], list) else [data[field]]
            sources.extend(Source(f"{field}{FIELD_SUFFIX[field]}", _as_text(v)) for v in values)
        else:
            sources.append(Source(f"{field}{FIELD_SUFFIX[field]}", _as_text(data[field])))
    return sources


@toolkit_bp.route('', methods=['GET'])
def list_commands():
    """Available commands with their input fields."""
    return jsonify({
        'commands': {
            name: {'inputs': list(spec.slots), 'help': spec.help}
            for name, spec in sorted(COMMANDS.items())
        }
    }), 200


@toolkit_bp.route('/<command>', methods=['POST'])
def run(command: str):
    """
    Run one toolkit command.

    Request body:
        {
            "digraph": "v 1\\nv 2\\na a1 1 2\\n",   // input fields per command
            "k": 2, "cbound": 2                      // optional flags
        }

    Returns:
        200 with {"command", "verdict", "exit_code", "result"} for any
        verdict; 400 on input errors; 413 when a budget is exceeded;
        404 for unknown commands

    Example:
        POST /api/v1/toolkit/kernel
        Body: {"digraph": "v a\\nv b\\na x a b\\n"}

        Response:
        {
            "command": "kernel",
            "verdict": true,
            "exit_code": 0,
            "result": {"kernel": ["b"]}
        }
    """
    spec = COMMANDS.get(command)
    if spec is None:
        return jsonify({'error': 'Not found', 'message': f"Unknown command: {command}"}), 404

    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        return jsonify({'error': 'Request body is required'}), 400

    options = {name: data[name] for name in OPTION_FIELDS if name in data}
    result = run_command(command, _sources(spec.slots, data), options)

    if result.exit_code == EXIT_INPUT:
        return jsonify(result.payload), 400
    if result.exit_code == EXIT_BUDGET:
        return jsonify(result.payload), 413
    return jsonify({
        'command': command,
        'verdict': result.verdict,
        'exit_code': result.exit_code,
        'result': result.payload,
    }), 200
