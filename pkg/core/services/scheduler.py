import logging
from typing import Optional

from core.api.dht_api import SystemState
from core.engine.shpt_engine import ShptEngine

logger = logging.getLogger(__name__)


class RoundScheduler:
    """
Deterministic round-based scheduler. A round first delivers every message that was
queued when it started, then runs one Timeout per peer.
    """

    def __init__(self, state: SystemState, engine: Optional[ShptEngine] = None) -> None:
        super().__init__()
        self.state = state
        self.engine = engine or ShptEngine(state)

    def run_round(self) -> SystemState:
        peers = self.state.peers
        pending = [len(peer.channel) for peer in peers]
        for peer, count in zip(peers, pending):
            for _ in range(count):
                self.engine.process_message(peer, peer.channel.popleft())
        for peer in peers:
            self.engine.timeout(peer)
        self.state.round += 1
        return self.state

    def run_rounds(self, rounds: int) -> SystemState:
        for _ in range(rounds):
            self.run_round()
        return self.state


def run_round(state: SystemState, engine: Optional[ShptEngine] = None) -> SystemState:
    return RoundScheduler(state, engine).run_round()
