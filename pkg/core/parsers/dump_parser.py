import logging
from pathlib import Path
from typing import Iterable, List, Tuple, Union

from pydantic import ValidationError

from core.api.dht_api import SystemState
from core.api.messages import Message, MessageKind
from core.errors import DumpFormatError
from core.parsers.schemas import MessageRecord, NodeRecord, PeerRecord, StateDump
from core.trie.labels import BitLabel
from core.trie.node import HptNode, NodeKind

logger = logging.getLogger(__name__)


class DumpParser:
    """
Converts a system state to and from its versioned JSON dump
    """

    @staticmethod
    def __node_record(node: HptNode) -> NodeRecord:
        return NodeRecord(label=node.label, kind=node.kind.value, parent_edge=node.parent_edge, child0=node.child0,
                          child1=node.child1, key=node.key, key2_slots=list(node.key2_slots), r_ref=node.r_ref)

    @staticmethod
    def __node(record: NodeRecord) -> HptNode:
        return HptNode(label=record.label, kind=NodeKind(record.kind), parent_edge=record.parent_edge,
                       child0=record.child0, child1=record.child1, key=record.key,
                       key2_slots=list(record.key2_slots), r_ref=record.r_ref)

    @staticmethod
    def to_dump(state: SystemState, keys: Iterable[BitLabel]) -> StateDump:
        peers = []
        for peer in state.peers:
            peers.append(PeerRecord(
                id=peer.id,
                timeout_cursor=peer.timeout_cursor,
                loose_keys=list(peer.loose_keys),
                nodes=[DumpParser.__node_record(peer.store[label]) for label in sorted(peer.store)],
                channel=[MessageRecord(kind=m.kind.value, target=m.target, presented=m.presented, origin=m.origin,
                                       hops_left=m.hops_left) for m in peer.channel],
            ))
        return StateDump(seed=state.rng_seed, round=state.round, keys=sorted(set(keys)), peers=peers)

    @staticmethod
    def from_dump(dump: StateDump) -> Tuple[SystemState, List[BitLabel]]:
        """
Rebuild a system state from a dump
        :param dump: validated dump document
        :return: state and its key set
        """
        state = SystemState(peers=len(dump.peers), seed=dump.seed)
        state.round = dump.round
        for peer, record in zip(state.peers, dump.peers):
            if peer.id != record.id:
                raise DumpFormatError('peer id %r does not match seed %d' % (record.id, dump.seed))
            peer.timeout_cursor = record.timeout_cursor
            peer.loose_keys = list(record.loose_keys)
            for node in record.nodes:
                if node.label in peer.store:
                    raise DumpFormatError('label %r listed twice at peer %r' % (node.label, record.id))
                state.store_direct(DumpParser.__node(node), peer)
            for m in record.channel:
                peer.channel.append(Message(MessageKind(m.kind), m.target, presented=m.presented, origin=m.origin,
                                            hops_left=m.hops_left))
        logger.debug('restored %d peers at round %d', len(state.peers), state.round)
        return state, list(dump.keys)

    @staticmethod
    def parse(text: str) -> Tuple[SystemState, List[BitLabel]]:
        try:
            dump = StateDump.model_validate_json(text)
        except ValidationError as ex:
            raise DumpFormatError('invalid state dump: %s' % ex) from ex
        return DumpParser.from_dump(dump)

    @staticmethod
    def load(path: Union[str, Path]) -> Tuple[SystemState, List[BitLabel]]:
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as ex:
            raise DumpFormatError('cannot read %s: %s' % (path, ex)) from ex
        return DumpParser.parse(text)

    @staticmethod
    def dumps(state: SystemState, keys: Iterable[BitLabel]) -> str:
        return DumpParser.to_dump(state, keys).model_dump_json(indent=2)

    @staticmethod
    def save(state: SystemState, keys: Iterable[BitLabel], path: Union[str, Path]):
        Path(path).write_text(DumpParser.dumps(state, keys), encoding='utf-8')
