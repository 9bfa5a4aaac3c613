# Scenario tasks shared by the command line and the web app
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import config
from core.api import SystemState
from core.engine import QueryResult, SearchEngine
from core.errors import KeysFileError
from core.harness import (LegalityReport, RunStats, check_legal, generate_initial_state, metrics_document,
                          random_keys, run_until_legal, script_for_level)
from core.parsers import CorruptionScript, DumpParser, KeysParser, MetricsDocument, ScriptParser
from core.trie import BitLabel, build_ideal_hpt, lcp

logger = logging.getLogger(__name__)


@dataclass
class Scenario:
    keys: List[BitLabel]
    script: CorruptionScript
    peers: int = config.simulation['peers']
    max_rounds: int = config.simulation['max_rounds']
    strict: bool = False


@dataclass
class QueryAnswer:
    result: QueryResult
    best_lcp: int

    @property
    def correct(self) -> bool:
        return self.result.key is not None and len(lcp(self.result.query, self.result.key)) == self.best_lcp


def load_keys(keys_file: Optional[str] = None, count: Optional[int] = None,
              key_len: int = config.simulation['key_len'], seed: int = config.simulation['seed']) -> List[BitLabel]:
    """
Key set of a scenario, read from a file or drawn at random
    :param keys_file: path of a keys file
    :param count: number of random keys when no file is given
    :param key_len: bits per random key
    :param seed: random seed
    :return: keys
    """
    if keys_file is not None:
        return KeysParser.load(keys_file)
    if count is None:
        raise KeysFileError('either a keys file or a random key count is needed')
    return random_keys(count, key_len, seed)


def load_script(keys: Iterable[BitLabel], level: Optional[str] = None, script_file: Optional[str] = None,
                seed: int = config.simulation['seed'], peers: int = config.simulation['peers']) -> CorruptionScript:
    if script_file is not None:
        return ScriptParser.load(script_file)
    return script_for_level(keys, level or 'none', seed, peers)


def run_scenario(scenario: Scenario) -> Tuple[RunStats, SystemState]:
    state = generate_initial_state(scenario.keys, scenario.script, peers=scenario.peers)
    stats = run_until_legal(state, scenario.keys, scenario.max_rounds, strict=scenario.strict)
    return stats, state


def scenario_metrics(scenario: Scenario) -> Tuple[MetricsDocument, SystemState]:
    stats, state = run_scenario(scenario)
    return metrics_document(stats, state), state


def sweep(seeds: Iterable[int], count: int, key_len: int, level: str, peers: int = config.simulation['peers'],
          max_rounds: int = config.simulation['max_rounds'], workers: int = 4) -> List[RunStats]:
    """
Run one independent scenario per seed
    :return: run statistics in seed order
    """
    def run_seed(seed: int) -> RunStats:
        keys = random_keys(count, key_len, seed)
        script = script_for_level(keys, level, seed, peers)
        stats, _ = run_scenario(Scenario(keys, script, peers, max_rounds))
        logger.info('seed %d: %s', seed, 'legal after %d rounds' % stats.rounds_to_legal
                    if stats.converged else 'not converged')
        return stats

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        return list(pool.map(run_seed, seeds))


def best_lcp(x: BitLabel, keys: Iterable[BitLabel]) -> int:
    return max(len(lcp(x, k)) for k in keys)


def answer_queries(state: SystemState, keys: Iterable[BitLabel], queries: Iterable[BitLabel]) -> List[QueryAnswer]:
    keys = list(keys)
    engine = SearchEngine(state)
    return [QueryAnswer(engine.prefix_search(x), best_lcp(x, keys)) for x in queries]


def legal_state(keys: Iterable[BitLabel], peers: int = config.simulation['peers'], seed: int = 0) -> SystemState:
    # materialized ideal trie, legal by construction
    return generate_initial_state(keys, CorruptionScript(seed=seed), peers=peers, ideal=build_ideal_hpt(keys))


def check_dump(text: str, strict: bool = False) -> LegalityReport:
    state, keys = DumpParser.parse(text)
    return check_legal(state, keys, strict=strict)


def check_dump_file(path: str, strict: bool = False) -> LegalityReport:
    state, keys = DumpParser.load(path)
    return check_legal(state, keys, strict=strict)


def save_outputs(metrics: MetricsDocument, metrics_out: Optional[str] = None, state: Optional[SystemState] = None,
                 keys: Optional[Iterable[BitLabel]] = None, dump_out: Optional[str] = None):
    if metrics_out is not None:
        Path(metrics_out).write_text(metrics.model_dump_json(indent=2), encoding='utf-8')
    if dump_out is not None and state is not None:
        DumpParser.save(state, keys or [], dump_out)
