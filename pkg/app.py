import json
import logging

from flask import (Flask, request, Response)

import app_tasks
import config
from core.api import accepts_json, flag_arg
from core.errors import ShptError
from core.harness import random_keys
from core.trie import validate_label

logger = logging.getLogger(__name__)

API_COMMANDS = [
    {'url': '/', 'request': 'GET', 'function': 'This Page'},
    {'url': '/run', 'request': 'GET', 'function': 'Run One Scenario Until Legal'},
    {'url': '/query', 'request': 'GET', 'function': 'Prefix Search On A Legal Random Trie'},
    {'url': '/check', 'request': 'POST', 'function': 'Check A State Dump'},
]


def _as_text(data) -> str:
    if isinstance(data, list):
        return '\n'.join(_as_text(item) for item in data)
    if isinstance(data, dict):
        return '\n'.join('%s: %s' % (k, json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in data.items())
    return str(data)


class App(Flask):
    def __init__(self, import_name: str) -> None:
        super().__init__(import_name)
        config.configure_logging()

        def respond(data, status: int = 200) -> Response:
            if accepts_json(request):
                return Response(json.dumps(data), status=status, mimetype='application/json')
            return Response(_as_text(data) + '\n', status=status, mimetype='text/plain')

        def int_arg(name: str, default: int) -> int:
            value = request.args.get(name)
            if value is None:
                return default
            try:
                return int(value)
            except ValueError:
                raise ShptError('%s must be an integer, got %r' % (name, value))

        @self.errorhandler(ShptError)
        def shpt_error(ex: ShptError):
            logger.warning('request failed: %s', ex)
            return Response(json.dumps({'error': str(ex)}), status=400, mimetype='application/json')

        @self.route('/', methods=['GET'])
        def home_page():
            return respond(API_COMMANDS)

        @self.route('/run', methods=['GET'])
        def run_page():
            seed = int_arg('seed', config.simulation['seed'])
            peers = int_arg('peers', config.simulation['peers'])
            keys = random_keys(int_arg('random_keys', config.simulation['random_keys']),
                               int_arg('key_len', config.simulation['key_len']), seed)
            level = request.args.get('corruption', 'none')
            script = app_tasks.load_script(keys, level, seed=seed, peers=peers)
            scenario = app_tasks.Scenario(keys, script, peers, int_arg('max_rounds', config.simulation['max_rounds']),
                                          flag_arg(request, 'strict'))
            metrics, _ = app_tasks.scenario_metrics(scenario)
            return respond(metrics.model_dump())

        @self.route('/query', methods=['GET'])
        def query_page():
            x = validate_label(request.args.get('x', ''))
            seed = int_arg('seed', config.simulation['seed'])
            keys = random_keys(int_arg('random_keys', config.simulation['random_keys']),
                               int_arg('key_len', config.simulation['key_len']), seed)
            state = app_tasks.legal_state(keys, int_arg('peers', config.simulation['peers']), seed)
            answer = app_tasks.answer_queries(state, keys, [x])[0]
            return respond({'query': x, 'key': answer.result.key, 'reads': answer.result.reads,
                            'node': answer.result.node, 'correct': answer.correct})

        @self.route('/check', methods=['POST'])
        def check_page():
            strict = flag_arg(request, 'strict')
            report = app_tasks.check_dump(request.get_data(as_text=True), strict)
            return respond({
                'legal': report.legal,
                'violations': [{'rule': v.rule, 'label': v.label, 'description': v.description}
                               for v in report.violations],
                'counters': report.counters.as_dict(),
            })

    def start(self):
        self.run(host=config.server['host'], port=config.server['port'])


if __name__ == "__main__":
    App(__name__).start()
