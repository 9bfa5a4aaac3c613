import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from core.api.dht_api import SystemState
from core.engine.shpt_engine import ShptEngine
from core.harness.legality import LegalityReport, check_legal
from core.parsers.schemas import MetricsDocument
from core.services.scheduler import RoundScheduler
from core.trie.ideal import build_ideal_hpt
from core.trie.labels import BitLabel

logger = logging.getLogger(__name__)


@dataclass
class RunStats:
    seed: int
    num_keys: int
    d_bits: int
    rounds_to_legal: Optional[int] = None
    rounds: int = 0
    max_reads_per_timeout: int = 0
    max_writes_per_timeout: int = 0
    max_msgs_per_timeout: int = 0
    total_reads: int = 0
    total_writes: int = 0
    total_messages: int = 0
    phase_counters: List[Dict[str, int]] = field(default_factory=list)
    final_report: Optional[LegalityReport] = None

    @property
    def converged(self) -> bool:
        return self.rounds_to_legal is not None

    def __settle_round(self, counter: str) -> int:
        # first round after which the counter stays zero
        settled = len(self.phase_counters)
        for i in reversed(range(len(self.phase_counters))):
            if self.phase_counters[i][counter] != 0:
                break
            settled = i
        return settled

    @property
    def phase_order_ok(self) -> bool:
        return self.__settle_round('unnecessary_nodes') <= self.__settle_round('missing_msd')

    def counters_settled(self) -> bool:
        """
Every counter is zero at the convergence round and stays zero thereafter
        """
        if not self.converged:
            return False
        return all(value == 0 for counters in self.phase_counters[self.rounds_to_legal:]
                   for value in counters.values())


@dataclass
class ClosureReport:
    rounds: int = 0
    illegal_rounds: List[int] = field(default_factory=list)
    changes: int = 0
    creations: List[Tuple[BitLabel, str]] = field(default_factory=list)
    max_reads_per_timeout: int = 0
    max_writes_per_timeout: int = 0
    max_msgs_per_timeout: int = 0

    @property
    def closed(self) -> bool:
        return not self.illegal_rounds and self.changes == 0 and not self.creations


def run_until_legal(state: SystemState, keys: Iterable[BitLabel], max_rounds: int,
                    engine: Optional[ShptEngine] = None, strict: bool = False) -> RunStats:
    """
Run rounds until the state is legal
    :param state: system to stabilize
    :param keys: key set the system stores
    :param max_rounds: round cap
    :param engine: protocol engine, a fresh one by default
    :param strict: require quiescent channels as well
    :return: statistics of the run
    """
    keys = set(keys)
    ideal = build_ideal_hpt(keys)
    scheduler = RoundScheduler(state, engine)
    stats = RunStats(seed=state.rng_seed, num_keys=len(keys), d_bits=sum(len(k) for k in keys))
    start = (state.metrics.dht_reads, state.metrics.dht_writes, state.metrics.messages_sent)
    state.metrics.reset_window()

    report = check_legal(state, keys, strict=strict, ideal=ideal)
    stats.phase_counters.append(report.counters.as_dict())
    while not report.legal and stats.rounds < max_rounds:
        scheduler.run_round()
        stats.rounds += 1
        report = check_legal(state, keys, strict=strict, ideal=ideal)
        stats.phase_counters.append(report.counters.as_dict())
    if report.legal:
        stats.rounds_to_legal = stats.rounds
        logger.info('legal after %d rounds (%d keys)', stats.rounds, len(keys))
    else:
        logger.warning('not legal after %d rounds: %s', stats.rounds, sorted(report.rules()))

    metrics = state.metrics
    stats.max_reads_per_timeout = metrics.max_reads_per_timeout
    stats.max_writes_per_timeout = metrics.max_writes_per_timeout
    stats.max_msgs_per_timeout = metrics.max_msgs_per_timeout
    stats.total_reads = metrics.dht_reads - start[0]
    stats.total_writes = metrics.dht_writes - start[1]
    stats.total_messages = metrics.messages_sent - start[2]
    stats.final_report = report
    return stats


def closure_probe(state: SystemState, keys: Iterable[BitLabel], rounds: int,
                  engine: Optional[ShptEngine] = None) -> ClosureReport:
    """
Keep running a legal system and record every round that leaves it illegal or changes it
    :param state: legal system
    :param keys: key set the system stores
    :param rounds: number of rounds to run
    :param engine: protocol engine, a fresh one by default
    :return: closure report with the access maxima of the window
    """
    keys = set(keys)
    ideal = build_ideal_hpt(keys)
    engine = engine or ShptEngine(state)
    report = ClosureReport()
    engine.creation_hooks.append(lambda node, reason: report.creations.append((node.label, reason)))
    scheduler = RoundScheduler(state, engine)
    state.metrics.reset_window()
    before = state.snapshot()
    try:
        for _ in range(rounds):
            scheduler.run_round()
            report.rounds += 1
            after = state.snapshot()
            report.changes += sum(1 for key in set(before) | set(after) if before.get(key) != after.get(key))
            before = after
            if not check_legal(state, keys, ideal=ideal).legal:
                report.illegal_rounds.append(state.round)
    finally:
        engine.creation_hooks.pop()
    report.max_reads_per_timeout = state.metrics.max_reads_per_timeout
    report.max_writes_per_timeout = state.metrics.max_writes_per_timeout
    report.max_msgs_per_timeout = state.metrics.max_msgs_per_timeout
    if not report.closed:
        logger.warning('closure broken: %d changes, %d illegal rounds', report.changes, len(report.illegal_rounds))
    return report


def node_stats(state: SystemState) -> Dict[str, int]:
    stats = {'total_nodes': 0, 'patricia_nodes': 0, 'msd_nodes': 0, 'sum_label_bits': 0}
    for _, node in state.all_nodes():
        stats['total_nodes'] += 1
        stats['msd_nodes' if node.is_msd else 'patricia_nodes'] += 1
        stats['sum_label_bits'] += len(node.label)
    return stats


def metrics_document(stats: RunStats, state: SystemState) -> MetricsDocument:
    return MetricsDocument(
        seed=stats.seed,
        num_keys=stats.num_keys,
        d_bits=stats.d_bits,
        rounds_to_legal=stats.rounds_to_legal,
        max_reads_per_timeout=stats.max_reads_per_timeout,
        max_msgs_per_timeout=stats.max_msgs_per_timeout,
        phase_counters=stats.phase_counters,
        converged=stats.converged,
        **node_stats(state),
    )


def summarize(runs: List[RunStats]) -> Dict[str, object]:
    """
Aggregate a batch of runs
    """
    rounds = [r.rounds_to_legal for r in runs if r.converged]
    return {
        'runs': len(runs),
        'converged': len(rounds),
        'mean_rounds': round(sum(rounds) / len(rounds), 2) if rounds else None,
        'max_rounds': max(rounds) if rounds else None,
        'max_reads_per_timeout': max((r.max_reads_per_timeout for r in runs), default=0),
        'max_msgs_per_timeout': max((r.max_msgs_per_timeout for r in runs), default=0),
        'phase_order_rate': round(sum(r.phase_order_ok for r in runs) / len(runs), 3) if runs else None,
    }
