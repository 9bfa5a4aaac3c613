import hashlib
import logging
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Dict, Iterator, List, Optional, Set, Tuple

from core.api.messages import Message
from core.errors import HashCollisionError
from core.trie.labels import BitLabel
from core.trie.node import HptNode, neighbour_labels

logger = logging.getLogger(__name__)

HASH_SPACE = 2 ** 64


class InsertVerdict(str, Enum):
    STORED = 'stored'
    REJECTED = 'rejected'
    KEPT = 'kept'


@dataclass
class AccessCounters:
    dht_reads: int = 0
    dht_writes: int = 0
    messages_sent: int = 0
    max_reads_per_timeout: int = 0
    max_writes_per_timeout: int = 0
    max_msgs_per_timeout: int = 0
    d_bits: int = 0
    _mark: Optional[Tuple[int, int, int]] = field(default=None, repr=False)

    def begin_timeout(self):
        self._mark = (self.dht_reads, self.dht_writes, self.messages_sent)

    def end_timeout(self):
        reads, writes, msgs = self._mark
        self.max_reads_per_timeout = max(self.max_reads_per_timeout, self.dht_reads - reads)
        self.max_writes_per_timeout = max(self.max_writes_per_timeout, self.dht_writes - writes)
        self.max_msgs_per_timeout = max(self.max_msgs_per_timeout, self.messages_sent - msgs)
        self._mark = None

    def reset_window(self):
        self.max_reads_per_timeout = 0
        self.max_writes_per_timeout = 0
        self.max_msgs_per_timeout = 0


@dataclass
class Peer:
    id: float
    store: Dict[BitLabel, HptNode] = field(default_factory=dict)
    channel: Deque[Message] = field(default_factory=deque)
    timeout_cursor: Optional[BitLabel] = None
    loose_keys: List[BitLabel] = field(default_factory=list)

    def next_label(self) -> Optional[BitLabel]:
        """
Advance the cursor cyclically over the stored labels in lexicographic order
        :return: label of the node to check, None on an empty store
        """
        if not self.store:
            return None
        labels = sorted(self.store)
        if self.timeout_cursor is not None:
            i = bisect_left(labels, self.timeout_cursor)
            if i < len(labels) and labels[i] == self.timeout_cursor:
                i += 1
            label = labels[i % len(labels)]
        else:
            label = labels[0]
        self.timeout_cursor = label
        return label


class SystemState:
    """
Simulated legal DHT: peers on the [0,1) ring, synchronous search and insert against the
responsible peer, and FIFO channels for protocol traffic.
    """
    DEFAULT_PEERS = 8

    def __init__(self, peers: int = DEFAULT_PEERS, seed: int = 0) -> None:
        super().__init__()
        self.rng_seed = seed & (HASH_SPACE - 1)
        self.round = 0
        self.metrics = AccessCounters()
        self._hash_key = self.rng_seed.to_bytes(8, 'big')
        self._points: Dict[BitLabel, float] = {}
        self._owners: Dict[int, BitLabel] = {}
        ids = sorted({self.__hash_int('peer:%d' % i) / HASH_SPACE for i in range(max(peers, 1))})
        self.peers = [Peer(id=i) for i in ids]
        self._peer_ids = ids

    def __hash_int(self, text: str) -> int:
        digest = hashlib.blake2b(text.encode('ascii'), digest_size=8, key=self._hash_key).digest()
        return int.from_bytes(digest, 'big')

    def hash_point(self, label: BitLabel) -> float:
        point = self._points.get(label)
        if point is None:
            value = self.__hash_int('label:' + label)
            other = self._owners.setdefault(value, label)
            if other != label:
                raise HashCollisionError('labels %r and %r hash to the same point' % (other, label))
            point = value / HASH_SPACE
            self._points[label] = point
        return point

    def responsible_peer(self, label: BitLabel) -> Peer:
        # successor rule on the ring
        i = bisect_left(self._peer_ids, self.hash_point(label))
        return self.peers[i % len(self.peers)]

    def dht_search(self, label: BitLabel) -> Optional[HptNode]:
        self.metrics.dht_reads += 1
        node = self.responsible_peer(label).store.get(label)
        return node.copy() if node is not None else None

    def dht_insert(self, node: HptNode) -> InsertVerdict:
        """
Store a node at its responsible peer and present it to its neighbours
        :param node: node to store, copied on insertion
        :return: insertion verdict
        """
        self.metrics.dht_writes += 1
        peer = self.responsible_peer(node.label)
        existing = peer.store.get(node.label)
        if existing is not None and not existing.is_msd and existing.key is not None:
            if node.key == existing.key:
                return InsertVerdict.KEPT
            if node.key is not None:
                # keep the key alive until Timeout integrates it
                peer.loose_keys.append(node.key)
            logger.debug('insert of %r rejected by key-storing occupant', node.label)
            return InsertVerdict.REJECTED
        peer.store[node.label] = node.copy()
        if not node.is_msd:
            for target in neighbour_labels(node):
                self.send(Message.linearize(target, node.label))
        return InsertVerdict.STORED

    def dht_update(self, node: HptNode) -> bool:
        # write back a modified copy, only over a node of the same kind
        self.metrics.dht_writes += 1
        peer = self.responsible_peer(node.label)
        existing = peer.store.get(node.label)
        if existing is None or existing.kind != node.kind:
            return False
        peer.store[node.label] = node.copy()
        return True

    def send(self, message: Message):
        self.metrics.messages_sent += 1
        self.responsible_peer(message.target).channel.append(message)

    @staticmethod
    def delete_local(peer: Peer, label: BitLabel):
        peer.store.pop(label, None)

    def store_direct(self, node: HptNode, peer: Optional[Peer] = None):
        # harness placement, no accounting and no presentations
        self.hash_point(node.label)
        (peer or self.responsible_peer(node.label)).store[node.label] = node.copy()

    def all_nodes(self) -> Iterator[Tuple[Peer, HptNode]]:
        for peer in self.peers:
            for label in sorted(peer.store):
                yield peer, peer.store[label]

    def find_anywhere(self, label: BitLabel) -> List[Tuple[Peer, HptNode]]:
        return [(p, p.store[label]) for p in self.peers if label in p.store]

    def stored_keys(self) -> Set[BitLabel]:
        keys = set()
        for peer, node in self.all_nodes():
            if node.key is not None:
                keys.add(node.key)
        for peer in self.peers:
            keys.update(peer.loose_keys)
        return keys

    def pending_messages(self) -> int:
        return sum(len(p.channel) for p in self.peers)

    def snapshot(self) -> Dict[Tuple[float, BitLabel], HptNode]:
        return {(peer.id, node.label): node.copy() for peer, node in self.all_nodes()}
